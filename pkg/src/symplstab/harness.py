"""Instances, JSON documents, random suites, the gallery and engine comparison."""
from __future__ import annotations

import json
import math
import re
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import flow, momentum, stability
from .representation import (
    Representation,
    RepresentationError,
    Symplectization,
    explicit_representation,
    named_representation,
    torus_representation,
)

ENGINES = ("analytic", "flow", "kn")
FLOAT_DIGITS = 12


class InstanceError(ValueError):
    """Schema or validation failure; ``field`` is a dotted path into the document."""

    def __init__(self, field: str, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{field}: {message}")
        self.field = field
        self.line = line


# -- instances ----------------------------------------------------------------


@dataclass(eq=False)
class Instance:
    id: str
    kind: str  # "torus" | "gl"
    rank: int
    representation: dict[str, Any]  # {"weights": ...} | {"name": ...} | {"images": ...}
    tau: list[float]
    points: dict[str, np.ndarray] = field(default_factory=dict)

    def rep(self) -> Representation:
        r = self.representation
        if "weights" in r:
            return torus_representation(np.asarray(r["weights"], dtype=float))
        if "name" in r:
            return named_representation(r["name"], self.rank)
        return explicit_representation(np.asarray(r["images"], dtype=complex))

    def symplectization(self) -> Symplectization:
        tau = self.tau if self.kind == "torus" else self.tau[0]
        return Symplectization(self.rep(), tau)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return to_document(self) == to_document(other)


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _encode_complex_array(a: np.ndarray):
    if a.ndim == 0:
        return _complex_pair(complex(a))
    return [_encode_complex_array(x) for x in a]


def to_document(inst: Instance) -> dict[str, Any]:
    rep: dict[str, Any]
    r = inst.representation
    if "weights" in r:
        rep = {"weights": [[int(x) for x in row] for row in np.asarray(r["weights"]).tolist()]}
    elif "name" in r:
        rep = {"name": r["name"]}
    else:
        rep = {"images": _encode_complex_array(np.asarray(r["images"], dtype=complex))}
    return {
        "id": inst.id,
        "group": {"kind": inst.kind, "rank": inst.rank},
        "representation": rep,
        "tau": [float(t) for t in inst.tau],
        "points": {name: [_complex_pair(z) for z in np.asarray(p, dtype=complex)]
                   for name, p in inst.points.items()},
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(to_document(inst), indent=2) + "\n"


def _require(doc: dict, key: str, path: str):
    if not isinstance(doc, dict):
        raise InstanceError(path or "<root>", "expected an object")
    if key not in doc:
        raise InstanceError(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def _decode_complex(x, path: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(c, (int, float)) for c in x):
        return complex(x[0], x[1])
    raise InstanceError(path, "complex scalars are [re, im] pairs")


def _decode_complex_array(x, path: str) -> np.ndarray:
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise InstanceError(path, "expected a nested array of [re, im] pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InstanceError(path, "expected a nested array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def from_document(doc: dict[str, Any]) -> Instance:
    inst_id = _require(doc, "id", "")
    if not isinstance(inst_id, str):
        raise InstanceError("id", "expected a string")
    group = _require(doc, "group", "")
    kind = _require(group, "kind", "group")
    if kind not in ("torus", "gl"):
        raise InstanceError("group.kind", f"unknown group kind {kind!r}")
    rank = _require(group, "rank", "group")
    if not isinstance(rank, int) or rank < 1:
        raise InstanceError("group.rank", "expected a positive integer")
    rep_doc = _require(doc, "representation", "")
    if not isinstance(rep_doc, dict):
        raise InstanceError("representation", "expected an object")
    if kind == "torus":
        w = _require(rep_doc, "weights", "representation")
        try:
            arr = np.asarray(w, dtype=float)
        except (TypeError, ValueError):
            raise InstanceError("representation.weights", "expected an integer matrix") from None
        if arr.ndim != 2 or arr.shape[1] != rank:
            raise InstanceError("representation.weights", f"expected an n x {rank} matrix")
        if not np.all(arr == np.round(arr)):
            raise InstanceError("representation.weights", "weights must be integers")
        representation = {"weights": arr.astype(int)}
    elif "name" in rep_doc:
        representation = {"name": rep_doc["name"]}
    elif "images" in rep_doc:
        images = _decode_complex_array(rep_doc["images"], "representation.images")
        representation = {"images": images}
    else:
        raise InstanceError("representation", "gl representations need 'name' or 'images'")
    tau = _require(doc, "tau", "")
    if isinstance(tau, (int, float)) and not isinstance(tau, bool):
        tau = [tau]
    if not isinstance(tau, list) or not all(isinstance(t, (int, float)) for t in tau):
        raise InstanceError("tau", "expected a list of real numbers")
    expected = rank if kind == "torus" else 1
    if len(tau) != expected:
        raise InstanceError("tau", f"expected {expected} coordinate(s), got {len(tau)}")
    inst = Instance(inst_id, kind, rank, representation, [float(t) for t in tau], {})
    try:
        rep = inst.rep()
    except RepresentationError as exc:
        raise InstanceError("representation", str(exc)) from None
    pts = _require(doc, "points", "")
    if not isinstance(pts, dict):
        raise InstanceError("points", "expected an object mapping names to vectors")
    for name, vec in pts.items():
        path = f"points.{name}"
        if not isinstance(vec, list):
            raise InstanceError(path, "expected a list of [re, im] pairs")
        p = np.array([_decode_complex(z, f"{path}[{i}]") for i, z in enumerate(vec)], dtype=complex)
        if p.shape != (rep.dim,):
            raise InstanceError(path, f"expected {rep.dim} coordinates, got {p.shape[0]}")
        inst.points[name] = p
    return inst


def parse_instance(text: str | dict) -> Instance:
    if isinstance(text, dict):
        return from_document(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("<document>", exc.msg, exc.lineno) from None
    try:
        return from_document(doc)
    except InstanceError as exc:
        raise InstanceError(exc.field, str(exc).split(": ", 1)[-1], _field_line(text, exc.field)) from None


def _field_line(text: str, path: str) -> int | None:
    """Line of the deepest key of ``path`` present in the text, if any."""
    keys = [k.split("[")[0] for k in path.split(".") if k and not k.startswith("<")]
    for key in reversed(keys):
        m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
        if m:
            return text.count("\n", 0, m.start()) + 1
    return None


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


# -- random suites ------------------------------------------------------------


@dataclass(frozen=True)
class RandomParams:
    count: int = 200
    kind: str = "torus"
    k_max: int = 3  # torus rank bound, or gl rank bound
    n_max: int = 6
    bound: int = 5
    tau_set: tuple[float, ...] = (-1.0, 0.0, 1.0)
    points: int = 4
    sparse: int = 2  # sparse-support points per instance


def _sparse_variant(rng: np.random.Generator, p: np.ndarray) -> np.ndarray:
    n = len(p)
    keep = rng.integers(0, n) if n > 1 else 0
    mask = rng.random(n) < 0.5
    q = p.copy()
    q[mask] = 0
    if rng.random() < 0.2:
        q[:] = 0
    elif not np.any(q):
        q[keep] = p[keep]
    return q


def generate_random(seed: int, params: RandomParams = RandomParams()) -> list[Instance]:
    """Deterministic suite; ``params.sparse`` of every ``params.points`` points have zeroed coordinates."""
    rng = np.random.default_rng(seed)
    out = []
    gl_names = (("standard", 2), ("standard", 3), ("sym^2", 2), ("sym^3", 2), ("adjoint", 2), ("sym^2", 3))
    for i in range(params.count):
        if params.kind == "torus":
            k = int(rng.integers(1, params.k_max + 1))
            n = int(rng.integers(1, params.n_max + 1))
            weights = rng.integers(-params.bound, params.bound + 1, size=(n, k))
            tau = [float(rng.choice(params.tau_set)) for _ in range(k)]
            representation: dict[str, Any] = {"weights": weights}
        else:
            choices = [c for c in gl_names if c[1] <= params.k_max]
            name, k = choices[int(rng.integers(len(choices)))]
            n = named_representation(name, k).dim
            tau = [float(rng.choice(params.tau_set))]
            representation = {"name": name}
        pts: dict[str, np.ndarray] = {}
        for j in range(params.points):
            p = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
            if j >= params.points - params.sparse:
                p = _sparse_variant(rng, p)
            pts[f"p{j}"] = p
        out.append(Instance(f"rand-{seed}-{i:04d}", params.kind, k, representation, tau, pts))
    return out


def sparse_fraction(instances: Iterable[Instance]) -> float:
    total = sparse = 0
    for inst in instances:
        for p in inst.points.values():
            total += 1
            sparse += bool(np.any(p == 0))
    return sparse / total if total else 0.0


# -- gallery ------------------------------------------------------------------


def gallery() -> list[Instance]:
    s2 = 1 / math.sqrt(2)
    out = [
        Instance("A", "torus", 1, {"weights": np.array([[1], [-1]])}, [0.0],
                 {"p11": np.array([1, 1], complex), "p10": np.array([1, 0], complex),
                  "p00": np.array([0, 0], complex)}),
    ]
    for t, tag in ((-1.0, "m1"), (0.0, "0"), (1.0, "p1")):
        out.append(Instance(f"B_tau{tag}", "torus", 1, {"weights": np.array([[1]])}, [t],
                            {"p1": np.array([1], complex)}))
    out.append(Instance("C", "torus", 2, {"weights": np.array([[1, 0], [0, 1], [-1, -1]])}, [0.0, 0.0],
                        {"p111": np.array([1, 1, 1], complex), "p110": np.array([1, 1, 0], complex)}))
    out.append(Instance("D", "gl", 2, {"name": "standard"}, [0.0],
                        {"e1": np.array([1, 0], complex), "zero": np.array([0, 0], complex)}))
    # Sym^2 in the orthonormal basis (x^2, sqrt2 xy, y^2)
    for t, tag in ((-1.0, "m1"), (0.0, "0"), (1.0, "p1")):
        out.append(Instance(f"E_tau{tag}", "gl", 2, {"name": "sym^2"}, [t],
                            {"x2": np.array([1, 0, 0], complex), "xy": np.array([0, s2, 0], complex),
                             "x2_plus_y2": np.array([1, 0, 1], complex)}))
    return out


# -- comparison ---------------------------------------------------------------


def _round(x: float) -> float | str:
    if x is None:
        return None
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if x == 0:
        return 0.0
    return float(f"{x:.{FLOAT_DIGITS}g}")


@dataclass
class EngineResult:
    engine: str
    level: str | None  # None when inconclusive
    semistable: bool | None
    certificate: str | None
    verified: bool | None
    margin: float | None
    confidence: str
    detail: str = ""
    wall_time: float = 0.0

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        d = {
            "level": self.level,
            "semistable": self.semistable,
            "certificate": self.certificate,
            "verified": self.verified,
            "margin": _round(self.margin),
            "confidence": self.confidence,
        }
        if self.detail:
            d["detail"] = self.detail
        if timings:
            d["wall_time"] = _round(self.wall_time)
        return d


@dataclass
class PointReport:
    name: str
    results: dict[str, EngineResult]
    agreement: dict[str, bool | None]
    checks: dict[str, bool | None]

    @property
    def failures(self) -> list[str]:
        return [k for k, ok in self.checks.items() if ok is False]


@dataclass
class Report:
    instance: str
    engines: tuple[str, ...]
    points: list[PointReport]

    @property
    def disagreements(self) -> int:
        return sum(1 for p in self.points for ok in p.agreement.values() if ok is False)

    @property
    def inconclusive(self) -> int:
        return sum(1 for p in self.points for r in p.results.values() if r.level is None and r.semistable is None)

    @property
    def check_failures(self) -> int:
        return sum(len(p.failures) for p in self.points)

    def agreement_matrix(self) -> dict[str, dict[str, int]]:
        """Counts of agreeing points for each ordered engine pair (symmetric); empty for one engine."""
        if len(self.engines) < 2:
            return {}
        m = {a: {b: 0 for b in self.engines} for a in self.engines}
        for p in self.points:
            for a in self.engines:
                for b in self.engines:
                    key = _pair_key(a, b)
                    if a == b or p.agreement.get(key):
                        m[a][b] += 1
        return m

    def exit_code(self) -> int:
        if self.disagreements or self.check_failures:
            return 2
        if self.inconclusive:
            return 3
        return 0

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "engines": list(self.engines),
            "points": [
                {
                    "name": p.name,
                    "results": {e: r.to_dict(timings) for e, r in p.results.items()},
                    "agreement": p.agreement,
                    "checks": p.checks,
                }
                for p in self.points
            ],
            "agreement_matrix": self.agreement_matrix(),
            "summary": {
                "points": len(self.points),
                "disagreements": self.disagreements,
                "check_failures": self.check_failures,
                "inconclusive": self.inconclusive,
            },
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"


def _pair_key(a: str, b: str) -> str:
    return "|".join(sorted((a, b)))


@dataclass(frozen=True)
class CompareOptions:
    tol: float = flow.DEFAULT_TOL
    max_iter: int = flow.DEFAULT_MAX_ITER
    budget: int = stability.DEFAULT_BUDGET
    seed: int = 0
    structural: bool = True
    timings: bool = False


def _flow_level(res: flow.FlowResult, stab_dim: int) -> str | None:
    return {
        "reached_zero": "stable" if stab_dim == 0 else "polystable_not_stable",
        "degenerating": "semistable_not_polystable",
        "stalled_positive": "unstable",
    }.get(res.classification)


def _verify(cert, sympl, v) -> tuple[bool, str]:
    try:
        cert.verify(sympl, v)
        return True, ""
    except (stability.CertificateError, momentum.IndeterminateSupportError) as exc:
        return False, str(exc)


def compare_point(sympl: Symplectization, v: np.ndarray, engines: Sequence[str],
                  opts: CompareOptions = CompareOptions(), name: str = "") -> PointReport:
    results: dict[str, EngineResult] = {}
    checks: dict[str, bool | None] = {}
    stab = momentum.stabilizer_algebra(sympl.rep, v)
    descent = None
    verdict = None
    if "flow" in engines or "kn" in engines or sympl.kind == "gl":
        t0 = time.perf_counter()
        descent = flow.kn_descent(sympl, v, tol=opts.tol, max_iter=opts.max_iter)
        flow_time = time.perf_counter() - t0
    if "analytic" in engines:
        t0 = time.perf_counter()
        verdict = stability.analytic_verdict(sympl, v, opts.budget, opts.seed)
        ok, why = _verify(verdict.certificate, sympl, v)
        results["analytic"] = EngineResult("analytic", verdict.level, verdict.semistable,
                                           verdict.certificate.kind, ok, verdict.margin, verdict.confidence,
                                           why, time.perf_counter() - t0)
    if "flow" in engines:
        level = _flow_level(descent, stab.dim)
        cert_kind, ok = None, None
        if descent.classification == "reached_zero":
            cert = stability.ZeroMoment(descent.group)
            ok, _ = _verify(cert, sympl, v)
            cert_kind = cert.kind
        margin = min(descent.mu_trajectory) if descent.mu_trajectory else descent.mu_norm
        results["flow"] = EngineResult("flow", level, descent.semistable, cert_kind, ok, margin,
                                       "exact" if sympl.kind == "torus" else "heuristic",
                                       descent.classification, flow_time)
    if "kn" in engines:
        t0 = time.perf_counter()
        probe = flow.boundedness_probe(sympl, v, budget=opts.budget, seed=opts.seed, tol=opts.tol,
                                       max_iter=opts.max_iter, descent=descent)
        cert_kind, ok = None, None
        if not probe.bounded:
            cert = stability.Destabilizer(probe.direction, probe.slope)
            ok, _ = _verify(cert, sympl, v)
            cert_kind = cert.kind
        results["kn"] = EngineResult("kn", None, probe.bounded, cert_kind, ok,
                                     probe.infimum if probe.bounded else probe.slope,
                                     "heuristic" if probe.heuristic else "exact",
                                     "bounded_below" if probe.bounded else "unbounded",
                                     time.perf_counter() - t0)

    agreement: dict[str, bool | None] = {}
    names = [e for e in ENGINES if e in results]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            ra, rb = results[a], results[b]
            if "kn" in (a, b):
                # only semistability is comparable with the boundedness probe
                agreement[_pair_key(a, b)] = (None if ra.semistable is None or rb.semistable is None
                                              else ra.semistable == rb.semistable)
            else:
                agreement[_pair_key(a, b)] = None if ra.level is None or rb.level is None else ra.level == rb.level

    for e, r in results.items():
        if r.verified is not None:
            checks[f"certificate_{e}"] = r.verified
    if verdict is not None and "flow" in results and results["flow"].level is not None:
        fl = results["flow"].level
        checks["polystable_iff_zero_moment"] = (stability.is_polystable(verdict.level)
                                                == stability.is_polystable(fl)
                                                and (verdict.level == "stable") == (fl == "stable"))
        checks["semistable_iff_moment_infimum_zero"] = verdict.semistable == results["flow"].semistable
    if verdict is not None and "kn" in results:
        checks["semistable_iff_bounded"] = verdict.semistable == results["kn"].semistable
    if verdict is not None:
        checks["degeneration_or_destabilizer"] = _degeneration_check(sympl, v, verdict, opts, descent)
    if opts.structural:
        checks.update(structural_checks(sympl, v, descent, verdict, opts))
    return PointReport(name, results, agreement, checks)


def _degeneration_check(sympl, v, verdict, opts, descent) -> bool:
    if verdict.certificate.kind == "degeneration":
        ok, _ = _verify(verdict.certificate, sympl, v)
        return ok
    try:
        cert = stability.degeneration_certificate(sympl, v, opts.budget, opts.seed, opts.tol, descent=descent)
    except stability.NotSemistableError as exc:
        if verdict.semistable:
            return False
        ok, _ = _verify(exc.destabilizer, sympl, v)
        return ok
    except (flow.FlowError, stability.CertificateError):
        return False
    if not verdict.semistable:
        return False
    ok, _ = _verify(cert, sympl, v)
    return ok


def structural_checks(sympl: Symplectization, v, descent: flow.FlowResult | None,
                      verdict: stability.Verdict | None, opts: CompareOptions = CompareOptions()) -> dict[str, bool]:
    """Invariants that must hold at every point, whatever its level."""
    rep = sympl.rep
    out: dict[str, bool] = {}
    zeros = []
    if descent is not None and descent.classification == "reached_zero":
        zeros.append(descent.point)
    if verdict is not None and verdict.certificate.kind == "degeneration":
        c = verdict.certificate
        zeros.append(momentum.act(rep, c.s0, 1.0, c.y))
    if zeros:
        out["zero_moment_stabilizer_reductive"] = all(
            momentum.stabilizer_algebra(rep, z).reductive for z in zeros if momentum.moment_norm(sympl, z) <= 1e-8)
    if rep.kind == "gl":
        m = momentum.moment_vector(sympl, v)
        stab = momentum.stabilizer_algebra(rep, v)
        out["moment_in_stabilizer_commutant"] = all(np.linalg.norm(m @ b - b @ m) <= 1e-8 * max(1.0, np.linalg.norm(m))
                                                    for b in stab.k_basis)
    if verdict is not None and verdict.semistable:
        out["stabilizer_weights_vanish"] = stability.stabilizer_weight_check(sympl, v).passed
    out["psi_convex_along_rays"] = psi_convexity_check(sympl, v, seed=opts.seed)
    return out


def psi_convexity_check(sympl: Symplectization, v, rays: int = 4, seed: int = 0) -> bool:
    """Second differences of t -> Psi(v, e^{ts}) on [-2, 2] are nonnegative."""
    rep = sympl.rep
    rng = np.random.default_rng(seed)
    ts = np.linspace(-2.0, 2.0, 17)
    for _ in range(rays):
        if rep.kind == "torus":
            s = rng.standard_normal(rep.rank)
        else:
            a = rng.standard_normal((rep.rank, rep.rank)) + 1j * rng.standard_normal((rep.rank, rep.rank))
            s = (a + a.conj().T) / 2
        vals = np.array([momentum.kempf_ness(sympl, s, t, v) for t in ts])
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        if np.any(second < -1e-9 * max(1.0, float(np.max(np.abs(vals))))):
            return False
    return True


def compare(instance: Instance, engines: Sequence[str] = ENGINES, opts: CompareOptions = CompareOptions(),
            points: Sequence[str] | None = None) -> Report:
    unknown = [e for e in engines if e not in ENGINES]
    if unknown:
        raise ValueError(f"unknown engine(s): {', '.join(unknown)}")
    sympl = instance.symplectization()
    names = list(points) if points else list(instance.points)
    reports = [compare_point(sympl, instance.points[n], engines, opts, n) for n in names]
    return Report(instance.id, tuple(e for e in ENGINES if e in engines), reports)


def golden_summary(report: Report) -> dict[str, Any]:
    """The frozen part of a gallery report: levels and certificate kinds."""
    return {
        p.name: {e: {"level": r.level, "semistable": r.semistable, "certificate": r.certificate,
                     "confidence": r.confidence}
                 for e, r in p.results.items()}
        for p in report.points
    }
