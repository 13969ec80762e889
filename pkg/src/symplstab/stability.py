"""Analytic stability verdicts and their certificates.

For a torus the admissible directions of a point form the polyhedral cone
``C = {s : <chi_j, s> <= 0 for j in supp(v)}`` and the maximal weight is the
linear function ``<tau, s>`` on it (``+inf`` off it).  All four levels are
read off the vertices of ``C`` intersected with the box ``|s|_inf <= 1``,
enumerated in exact rational arithmetic.

For GL(r) every Hermitian direction is diagonal in some unitary frame, so
the same cone analysis runs on the torus of each sampled frame.  Only a
negative value found this way is a proof; everything else is heuristic
unless the descent flow confirms it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np
from scipy.stats import unitary_group

from . import flow, momentum
from .representation import Symplectization

Level = Literal["unstable", "semistable_not_polystable", "polystable_not_stable", "stable"]
LEVELS: tuple[Level, ...] = ("unstable", "semistable_not_polystable", "polystable_not_stable", "stable")
Confidence = Literal["exact", "heuristic"]

CERT_TOL = 1e-8
WEIGHT_ROUND = 1e-8
DEFAULT_BUDGET = 32


def level_rank(level: Level) -> int:
    return LEVELS.index(level)


def is_semistable(level: Level) -> bool:
    return level != "unstable"


def is_polystable(level: Level) -> bool:
    return level in ("polystable_not_stable", "stable")


class CertificateError(RuntimeError):
    """A certificate failed re-verification; ``condition`` names the failed check."""

    def __init__(self, condition: str, detail: str = ""):
        super().__init__(f"{condition}: {detail}" if detail else condition)
        self.condition = condition


class NotSemistableError(ValueError):
    """Raised by degeneration_certificate on unstable points."""

    def __init__(self, destabilizer: "Destabilizer"):
        super().__init__(f"point is unstable: lambda = {destabilizer.value:.6g} along the returned direction")
        self.destabilizer = destabilizer


# -- certificates -------------------------------------------------------------


@dataclass
class Destabilizer:
    s: np.ndarray
    value: float
    kind: str = field(default="destabilizer", init=False)

    def verify(self, sympl: Symplectization, v) -> None:
        lam = momentum.maximal_weight(sympl, self.s, v)
        if not np.isfinite(lam) or lam >= 0:
            raise CertificateError("negative maximal weight", f"lambda = {lam}")
        if abs(lam - self.value) > CERT_TOL * max(1.0, abs(self.value)):
            raise CertificateError("witness value", f"recorded {self.value}, recomputed {lam}")


@dataclass
class ZeroMoment:
    g: np.ndarray
    kind: str = field(default="zero_moment", init=False)

    def verify(self, sympl: Symplectization, v) -> None:
        gv = sympl.rep.rho(self.g) @ momentum._as_point(v)
        mu = momentum.moment_norm(sympl, gv)
        if mu > CERT_TOL:
            raise CertificateError("moment vanishes at g v", f"|mu| = {mu:.3g}")


@dataclass
class Degeneration:
    s_m: np.ndarray
    y: np.ndarray
    s0: np.ndarray
    kind: str = field(default="degeneration", init=False)

    def verify(self, sympl: Symplectization, v) -> None:
        rep = sympl.rep
        v = momentum._as_point(v)
        lam = momentum.maximal_weight(sympl, self.s_m, v)
        if not abs(lam) <= CERT_TOL:
            raise CertificateError("(a) lambda^{s_m}(v) = 0", f"lambda = {lam}")
        if rep.kind == "gl":
            comm = float(np.linalg.norm(self.s_m @ self.s0 - self.s0 @ self.s_m))
            if comm > CERT_TOL * max(1.0, float(np.linalg.norm(self.s_m)) * float(np.linalg.norm(self.s0))):
                raise CertificateError("(b) [s_m, s0] = 0", f"|[s_m, s0]| = {comm:.3g}")
            stab = momentum.stabilizer_algebra(rep, v)
            for b in stab.k_basis:
                err = float(np.linalg.norm(self.s_m @ b - b @ self.s_m))
                if err > 1e-7:
                    raise CertificateError("s_m centralizes k_v", f"|[s_m, b]| = {err:.3g}")
        limit = momentum.limit_point(sympl, self.s_m, v)
        if limit is None:
            raise CertificateError("(c) limit exists", "the curve escapes")
        if np.linalg.norm(limit - self.y) > CERT_TOL * max(1.0, float(np.linalg.norm(v))):
            raise CertificateError("(c) limit equals y", f"distance {np.linalg.norm(limit - self.y):.3g}")
        mu = momentum.moment_norm(sympl, momentum.act(rep, self.s0, 1.0, self.y))
        if mu > CERT_TOL:
            raise CertificateError("(d) mu(exp(s0) y) = 0", f"|mu| = {mu:.3g}")


@dataclass
class AnalyticOnly:
    """Directions on which the maximal weight was evaluated, with the values found."""

    directions: list[np.ndarray]
    values: list[float]
    margin: float
    kind: str = field(default="analytic_only", init=False)

    def verify(self, sympl: Symplectization, v) -> None:
        for s, val in zip(self.directions, self.values):
            lam = momentum.maximal_weight(sympl, s, v)
            if lam < -CERT_TOL:
                raise CertificateError("nonnegative maximal weights", f"lambda = {lam}")
            if abs(lam - val) > CERT_TOL * max(1.0, abs(val)):
                raise CertificateError("recorded values", f"recorded {val}, recomputed {lam}")


Certificate = Destabilizer | ZeroMoment | Degeneration | AnalyticOnly


@dataclass
class Verdict:
    level: Level
    certificate: Certificate
    confidence: Confidence = "exact"
    margin: float = 0.0  # LP optimum (negative iff unstable)
    stable_margin: float = 0.0  # minimum of the tau-term over nonzero vertices
    stabilizer_dim: int = 0
    frames: int = 1

    @property
    def semistable(self) -> bool:
        return is_semistable(self.level)

    @property
    def polystable(self) -> bool:
        return is_polystable(self.level)

    @property
    def stable(self) -> bool:
        return self.level == "stable"


# -- exact cone analysis ------------------------------------------------------


def to_fraction(x: float) -> Fraction:
    r = round(float(x))
    if abs(float(x) - r) <= WEIGHT_ROUND:
        return Fraction(int(r))
    return Fraction(float(x))


def _solve_exact(a: list[tuple[Fraction, ...]], b: list[Fraction]) -> tuple[Fraction, ...] | None:
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return tuple(m[i][n] for i in range(n))


def _dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class ConeAnalysis:
    """Vertices of {<chi_j, s> <= 0 (j in supp), |s|_inf <= 1} and the tau-values on them."""

    weights: tuple[tuple[Fraction, ...], ...]
    tau: tuple[Fraction, ...]
    vertices: tuple[tuple[Fraction, ...], ...]
    values: tuple[Fraction, ...]

    @property
    def rank(self) -> int:
        return len(self.tau)

    @property
    def minimum(self) -> Fraction:
        return min(self.values)

    @property
    def argmin(self) -> tuple[Fraction, ...]:
        i = min(range(len(self.values)), key=lambda j: (self.values[j], self.vertices[j]))
        return self.vertices[i]

    @property
    def semistable(self) -> bool:
        return self.minimum >= 0

    def _nonzero(self):
        zero = tuple([Fraction(0)] * self.rank)
        return [(w, val) for w, val in zip(self.vertices, self.values) if w != zero]

    @property
    def stable(self) -> bool:
        return all(val > 0 for _, val in self._nonzero())

    @property
    def stable_margin(self) -> Fraction:
        vals = [val for _, val in self._nonzero()]
        return min(vals) if vals else Fraction(1)

    @property
    def face(self) -> list[tuple[Fraction, ...]]:
        """Vertices on which the tau-term vanishes (the optimal face when semistable)."""
        return [w for w, val in zip(self.vertices, self.values) if val == 0]

    def in_lineality(self, s) -> bool:
        return all(_dot(chi, s) == 0 for chi in self.weights)

    @property
    def polystable(self) -> bool:
        return self.semistable and all(self.in_lineality(w) for w in self.face)

    def face_point(self) -> tuple[Fraction, ...]:
        """A relative-interior point of the zero face, scaled to |s|_inf = 1 (or 0)."""
        face = self.face
        total = [sum((w[a] for w in face), Fraction(0)) for a in range(self.rank)]
        top = max((abs(x) for x in total), default=Fraction(0))
        if top == 0:
            return tuple(Fraction(0) for _ in total)
        return tuple(x / top for x in total)


def cone_analysis(weights: Sequence[Sequence[float]], tau: Sequence[float]) -> ConeAnalysis:
    """Exact vertex enumeration for the support weights ``weights`` and shift ``tau``."""
    tau_f = tuple(to_fraction(t) for t in tau)
    k = len(tau_f)
    chis = sorted({tuple(to_fraction(x) for x in w) for w in weights})
    chis = [c for c in chis if any(x != 0 for x in c)]
    rows: list[tuple[tuple[Fraction, ...], Fraction]] = [(c, Fraction(0)) for c in chis]
    for a in range(k):
        for sign in (1, -1):
            e = tuple(Fraction(sign if b == a else 0) for b in range(k))
            rows.append((e, Fraction(1)))
    verts = set()
    for combo in itertools.combinations(rows, k):
        sol = _solve_exact([r[0] for r in combo], [r[1] for r in combo])
        if sol is None:
            continue
        if all(_dot(r[0], sol) <= r[1] for r in rows):
            verts.add(sol)
    vertices = tuple(sorted(verts))
    values = tuple(_dot(tau_f, w) for w in vertices)
    return ConeAnalysis(tuple(chis), tau_f, vertices, values)


def _support_mask(v: np.ndarray, comps: list[float]) -> np.ndarray:
    nv = float(np.linalg.norm(v))
    if nv == 0:
        return np.zeros(len(comps), bool)
    comps = np.asarray(comps)
    band = (comps > momentum.SUPPORT_TOL * nv) & (comps <= momentum.SUPPORT_BAND * nv)
    if np.any(band):
        raise momentum.IndeterminateSupportError("a weight component sits inside the support tolerance band")
    return comps > momentum.SUPPORT_BAND * nv


def torus_cone(sympl: Symplectization, v) -> ConeAnalysis:
    rep = sympl.rep
    if rep.kind != "torus":
        raise ValueError("torus_cone needs a torus action")
    v = momentum._as_point(v)
    mask = _support_mask(v, list(np.abs(v)))
    return cone_analysis(rep.weights[mask], sympl.tau)


@dataclass(frozen=True)
class FrameProblem:
    """The torus problem seen in the unitary frame ``u``."""

    u: np.ndarray
    cone: ConeAnalysis

    def direction(self, w: Sequence[Fraction]) -> np.ndarray:
        d = np.array([float(x) for x in w])
        s = self.u @ np.diag(d) @ self.u.conj().T
        return (s + s.conj().T) / 2


_GENERIC = np.sqrt(np.array([2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0]))


def frame_problem(sympl: Symplectization, v, u: np.ndarray) -> FrameProblem:
    """Weights of the torus u T u* and the support of v with respect to them."""
    rep = sympl.rep
    v = momentum._as_point(v)
    r = rep.rank
    diag_images = []
    for a in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[a, a] = 1.0
        diag_images.append(rep.sigma(u @ e @ u.conj().T))
    coeffs = np.resize(_GENERIC, r)
    h = sum(c * a for c, a in zip(coeffs, diag_images))
    _, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    chi = np.array([[float(np.vdot(vecs[:, j], a @ vecs[:, j]).real) for a in diag_images]
                    for j in range(vecs.shape[1])])
    chi_r = np.where(np.abs(chi - np.round(chi)) <= 1e-6, np.round(chi), chi)
    comps = vecs.conj().T @ v
    groups: dict[tuple, float] = {}
    for j in range(len(comps)):
        key = tuple(chi_r[j])
        groups[key] = groups.get(key, 0.0) + abs(comps[j]) ** 2
    keys = list(groups)
    mask = _support_mask(v, [np.sqrt(groups[key]) for key in keys])
    supp = [keys[i] for i in range(len(keys)) if mask[i]]
    return FrameProblem(u, cone_analysis(supp, sympl.tau_vector()))


# -- frames for GL ------------------------------------------------------------


def _eigenframe(h: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    return vecs


def candidate_frames(sympl: Symplectization, v, budget: int = DEFAULT_BUDGET, seed: int = 0,
                     descent: flow.FlowResult | None = None) -> list[np.ndarray]:
    """Identity, moment-adapted and descent-adapted frames, then Haar-random ones."""
    r = sympl.rep.rank
    v = momentum._as_point(v)
    frames = [np.eye(r, dtype=complex), _eigenframe(momentum.moment_vector(sympl, v))]
    if descent is not None:
        if np.linalg.norm(descent.exponent) > 0:
            frames.append(_eigenframe(descent.exponent))
        try:
            frames.append(_eigenframe(descent.polar_exponent()))
        except (ValueError, np.linalg.LinAlgError):
            pass
        frames.append(_eigenframe(momentum.moment_vector(sympl, descent.point)))
    rng = np.random.default_rng(seed)
    for _ in range(max(0, budget)):
        frames.append(unitary_group.rvs(r, random_state=rng) if r > 1 else np.eye(1, dtype=complex))
    return frames


def _frame_problems(sympl, v, frames):
    out = []
    skipped = 0
    for u in frames:
        try:
            out.append(frame_problem(sympl, v, u))
        except momentum.IndeterminateSupportError:
            skipped += 1
    return out, skipped


# -- destabilizer search ------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    direction: np.ndarray
    value: float
    exact: bool
    frames: int = 1


def destabilizer_search(sympl: Symplectization, v, budget: int = DEFAULT_BUDGET, seed: int = 0,
                        descent: flow.FlowResult | None = None) -> SearchResult:
    """Minimize the finite branch of s -> lambda^s(v) over normalized admissible s."""
    v = momentum._as_point(v)
    if sympl.kind == "torus":
        cone = torus_cone(sympl, v)
        s = np.array([float(x) for x in cone.argmin])
        value = momentum.maximal_weight(sympl, s, v)
        return SearchResult(s, float(value), True)
    if descent is None:
        descent = flow.kn_descent(sympl, v, max_iter=2000)
    frames = candidate_frames(sympl, v, budget, seed, descent)
    problems, _ = _frame_problems(sympl, v, frames)
    if not problems:
        raise momentum.IndeterminateSupportError("support is indeterminate in every sampled frame")
    best = min(problems, key=lambda p: p.cone.minimum)
    s = best.direction(best.cone.argmin)
    value = momentum.maximal_weight(sympl, s, v)
    if float(best.cone.minimum) < 0 and not value < 0:
        raise CertificateError("frame destabilizer re-verification", f"lambda = {value}")
    return SearchResult(s, float(value), bool(value < 0), len(problems))


# -- verdicts -----------------------------------------------------------------


def _torus_direction(w) -> np.ndarray:
    return np.array([float(x) for x in w])


def analytic_verdict_torus(sympl: Symplectization, v) -> Verdict:
    if sympl.kind != "torus":
        raise ValueError("analytic_verdict_torus needs a torus action")
    v = momentum._as_point(v)
    cone = torus_cone(sympl, v)
    stab = momentum.stabilizer_algebra(sympl.rep, v)
    margin, smargin = float(cone.minimum), float(cone.stable_margin)
    if not cone.semistable:
        s = _torus_direction(cone.argmin)
        cert = Destabilizer(s, momentum.maximal_weight(sympl, s, v))
        cert.verify(sympl, v)
        return Verdict("unstable", cert, "exact", margin, smargin, stab.dim)
    if cone.polystable:
        level: Level = "stable" if cone.stable else "polystable_not_stable"
        if level == "stable" and stab.dim:
            raise RuntimeError("stable cone with a nontrivial stabilizer")
        try:
            shift = flow.find_zero_shift(sympl, v)
            cert: Certificate = ZeroMoment(np.exp(shift.s0))
            cert.verify(sympl, v)
        except (flow.FlowError, CertificateError):
            cert = _analytic_only(sympl, v, cone)
        return Verdict(level, cert, "exact", margin, smargin, stab.dim)
    try:
        cert = degeneration_certificate(sympl, v, cone=cone)
    except (flow.FlowError, CertificateError):
        cert = _analytic_only(sympl, v, cone)
    return Verdict("semistable_not_polystable", cert, "exact", margin, smargin, stab.dim)


def _analytic_only(sympl, v, cone: ConeAnalysis) -> AnalyticOnly:
    dirs = [_torus_direction(w) for w in cone.vertices]
    vals = [momentum.maximal_weight(sympl, s, v) for s in dirs]
    return AnalyticOnly(dirs, vals, float(cone.minimum))


def analytic_verdict_gl(sympl: Symplectization, v, budget: int = DEFAULT_BUDGET, seed: int = 0,
                        confirm: bool = True) -> Verdict:
    """Frame-sampling verdict; non-negative outcomes are exact only when the flow confirms them."""
    if sympl.kind != "gl":
        raise ValueError("analytic_verdict_gl needs a gl action")
    v = momentum._as_point(v)
    descent = flow.kn_descent(sympl, v) if confirm else flow.kn_descent(sympl, v, max_iter=200)
    frames = candidate_frames(sympl, v, budget, seed, descent)
    problems, _ = _frame_problems(sympl, v, frames)
    if not problems:
        raise momentum.IndeterminateSupportError("support is indeterminate in every sampled frame")
    stab = momentum.stabilizer_algebra(sympl.rep, v)
    best = min(problems, key=lambda p: p.cone.minimum)
    margin = float(best.cone.minimum)
    smargin = float(min(p.cone.stable_margin for p in problems))
    if best.cone.minimum < 0:
        s = best.direction(best.cone.argmin)
        cert = Destabilizer(s, momentum.maximal_weight(sympl, s, v))
        cert.verify(sympl, v)
        return Verdict("unstable", cert, "exact", margin, smargin, stab.dim, len(problems))
    if confirm and descent.classification == "reached_zero":
        level: Level = "stable" if stab.dim == 0 else "polystable_not_stable"
        cert: Certificate = ZeroMoment(descent.group)
        cert.verify(sympl, v)
        return Verdict(level, cert, "exact", margin, smargin, stab.dim, len(problems))
    if confirm and descent.classification == "degenerating":
        try:
            cert = degeneration_certificate(sympl, v, budget=budget, seed=seed, descent=descent)
            confidence: Confidence = "exact"
        except (flow.FlowError, CertificateError):
            cert, confidence = _frame_analytic_only(sympl, v, problems), "heuristic"
        return Verdict("semistable_not_polystable", cert, confidence, margin, smargin, stab.dim, len(problems))
    # heuristic path: no destabilizer found and no flow confirmation
    face_ok = all(all(np.linalg.norm(sympl.rep.sigma(p.direction(w)) @ v) <= CERT_TOL * max(1.0, np.linalg.norm(v))
                      for w in p.cone.face) for p in problems)
    if stab.reductive and face_ok:
        level = "stable" if stab.dim == 0 and all(p.cone.stable for p in problems) else "polystable_not_stable"
    else:
        level = "semistable_not_polystable"
    return Verdict(level, _frame_analytic_only(sympl, v, problems), "heuristic", margin, smargin,
                   stab.dim, len(problems))


def _frame_analytic_only(sympl, v, problems: list[FrameProblem]) -> AnalyticOnly:
    dirs, vals = [], []
    for p in problems[:4]:
        for w in p.cone.vertices:
            s = p.direction(w)
            dirs.append(s)
            vals.append(momentum.maximal_weight(sympl, s, v))
    return AnalyticOnly(dirs, vals, float(min(p.cone.minimum for p in problems)))


def analytic_verdict(sympl: Symplectization, v, budget: int = DEFAULT_BUDGET, seed: int = 0,
                     confirm: bool = True) -> Verdict:
    if sympl.kind == "torus":
        return analytic_verdict_torus(sympl, v)
    return analytic_verdict_gl(sympl, v, budget, seed, confirm)


# -- degeneration -------------------------------------------------------------


def _finish_degeneration(sympl, v, s_m, tol) -> Degeneration:
    y = momentum.limit_point(sympl, s_m, v)
    if y is None:
        raise CertificateError("(c) limit exists", "the chosen s_m has positive weights on v")
    shift = flow.find_zero_shift(sympl, y, tol=tol)
    cert = Degeneration(s_m, y, shift.s0)
    cert.verify(sympl, v)
    return cert


def degeneration_certificate(sympl: Symplectization, v, budget: int = DEFAULT_BUDGET, seed: int = 0,
                             tol: float = flow.DEFAULT_TOL, cone: ConeAnalysis | None = None,
                             descent: flow.FlowResult | None = None) -> Degeneration:
    """(s_m, y, s0) with lambda^{s_m}(v) = 0, y = lim e^{t s_m} v and mu(exp(s0) y) = 0."""
    rep = sympl.rep
    v = momentum._as_point(v)
    if rep.kind == "torus":
        cone = cone if cone is not None else torus_cone(sympl, v)
        if not cone.semistable:
            s = _torus_direction(cone.argmin)
            raise NotSemistableError(Destabilizer(s, momentum.maximal_weight(sympl, s, v)))
        s_m = np.zeros(rep.rank) if cone.polystable else _torus_direction(cone.face_point())
        return _finish_degeneration(sympl, v, s_m, tol)
    descent = descent if descent is not None else flow.kn_descent(sympl, v, tol=tol)
    search = destabilizer_search(sympl, v, budget, seed, descent)
    if search.value < 0:
        raise NotSemistableError(Destabilizer(search.direction, search.value))
    if descent.classification == "reached_zero":
        return _finish_degeneration(sympl, v, np.zeros((rep.rank, rep.rank), dtype=complex), tol)
    stab = momentum.stabilizer_algebra(rep, v)
    problems, _ = _frame_problems(sympl, v, candidate_frames(sympl, v, budget, seed, descent))
    last: Exception | None = None
    for p in problems:
        if p.cone.polystable or not p.cone.semistable:
            continue
        s_m = p.direction(p.cone.face_point())
        if any(np.linalg.norm(s_m @ b - b @ s_m) > 1e-7 for b in stab.k_basis):
            continue
        try:
            return _finish_degeneration(sympl, v, s_m, tol)
        except (flow.FlowError, CertificateError) as exc:
            last = exc
    raise CertificateError("degeneration search", f"no sampled frame produced a certificate ({last})")


# -- structural checks --------------------------------------------------------


@dataclass(frozen=True)
class VanishingReport:
    values: tuple[float, ...]
    max_abs: float
    passed: bool

    @property
    def vacuous(self) -> bool:
        return not self.values


def stabilizer_weight_check(sympl: Symplectization, v, tol: float = CERT_TOL) -> VanishingReport:
    """lambda^s(v) on a basis of the Hermitian directions stabilizing v (and their negatives)."""
    v = momentum._as_point(v)
    stab = momentum.stabilizer_algebra(sympl.rep, v)
    vals = []
    for s in stab.hermitian_basis():
        for sign in (1.0, -1.0):
            vals.append(float(momentum.maximal_weight(sympl, sign * s, v)))
    m = max((abs(x) for x in vals), default=0.0)
    return VanishingReport(tuple(vals), m, m <= tol)


@dataclass(frozen=True)
class PropernessProbe:
    radii: tuple[float, ...]
    minima: tuple[float, ...]
    c1: float | None
    c2: float | None
    residual: float | None
    proper: bool


def linear_properness_probe(sympl: Symplectization, v, radii=(1.0, 2.0, 4.0, 8.0), samples: int = 32,
                            seed: int = 0) -> PropernessProbe:
    """Fit |s| <= c1 Psi(v, e^s) + c2 on sampled spheres; proper iff the minimum grows."""
    rep = sympl.rep
    v = momentum._as_point(v)
    rng = np.random.default_rng(seed)
    dirs = []
    for _ in range(samples):
        if rep.kind == "torus":
            d = rng.standard_normal(rep.rank)
        else:
            a = rng.standard_normal((rep.rank, rep.rank)) + 1j * rng.standard_normal((rep.rank, rep.rank))
            d = (a + a.conj().T) / 2
        dirs.append(d / np.linalg.norm(d))
    try:
        search = destabilizer_search(sympl, v, budget=8, seed=seed)
        if np.linalg.norm(search.direction) > 0:
            dirs.append(search.direction / np.linalg.norm(search.direction))
    except momentum.IndeterminateSupportError:
        pass
    minima = tuple(min(momentum.kempf_ness(sympl, d, float(r), v) for d in dirs) for r in radii)
    slope = (minima[-1] - minima[-2]) / (radii[-1] - radii[-2])
    if not np.isfinite(slope) or slope <= 0:
        return PropernessProbe(tuple(radii), minima, None, None, None, False)
    c1 = 1.0 / slope
    c2 = max(r - c1 * m for r, m in zip(radii, minima))
    resid = float(np.sqrt(np.mean([(r - c1 * m - c2) ** 2 for r, m in zip(radii, minima)])))
    return PropernessProbe(tuple(radii), minima, c1, c2, resid, True)
