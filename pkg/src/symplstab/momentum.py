"""Moment maps, maximal weights, energies and the Kempf-Ness integral.

Conventions (flat metric on C^n, pairing <a, b> = Re tr(a* b) on Hermitian
matrices, dot product on R^k for tori):

* for Hermitian ``s`` the moment component is
  ``mu^{-is}(v) = 1/2 <sigma(s) v, v> + TAU_SIGN * <tau, s>``;
* the moment vector is the Hermitian matrix (real k-vector) ``M(v)`` with
  ``<M(v), s> = mu^{-is}(v)`` for every Hermitian ``s``.

``TAU_SIGN`` is frozen from :func:`calibrate_tau_sign`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from . import reductive
from .representation import Representation, Symplectization

# Components below SUPPORT_TOL * |v| are zero, above SUPPORT_BAND * |v| nonzero.
SUPPORT_TOL = 1e-12
SUPPORT_BAND = 1e-9
EIG_RTOL = 1e-9

# Sign of the tau-term in mu^{-is}; see calibrate_tau_sign.
TAU_SIGN = 1


class IndeterminateSupportError(ValueError):
    """A component of the point sits inside the support tolerance band."""


def _as_point(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("point has non-finite entries")
    return v


def as_hermitian(rep: Representation, s) -> np.ndarray:
    """Return ``s`` as an element of i*k (real vector / Hermitian matrix) or raise."""
    if isinstance(s, (reductive.HermitianTypeElement, reductive.AlgebraElement)):
        s = s.entries if isinstance(s, reductive.AlgebraElement) else s.raw.entries
    s = np.asarray(s, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(s), initial=0.0)))
    if rep.kind == "torus":
        if s.shape != (rep.rank,):
            raise ValueError("shape mismatch for torus element")
        if np.max(np.abs(s.imag), initial=0.0) > reductive.MATRIX_RTOL * scale:
            raise ValueError("torus direction must be real")
        return s.real.astype(float)
    if s.shape != (rep.rank, rep.rank):
        raise ValueError("shape mismatch for gl element")
    if np.max(np.abs(s - s.conj().T), initial=0.0) > reductive.MATRIX_RTOL * scale:
        raise ValueError("direction must be Hermitian")
    return (s + s.conj().T) / 2


def infinitesimal_action(rep: Representation, s, v) -> np.ndarray:
    v = _as_point(v)
    if v.shape != (rep.dim,):
        raise ValueError(f"point must have {rep.dim} coordinates")
    return rep.sigma(s) @ v


@dataclass(frozen=True)
class _Spectrum:
    """Eigen-data of sigma(s) for Hermitian s, grouped into eigenvalue clusters."""

    values: np.ndarray  # one per cluster, ascending
    bases: tuple[np.ndarray, ...]  # orthonormal columns per cluster
    comps: tuple[np.ndarray, ...]  # components of v per cluster


def _spectrum(rep: Representation, s: np.ndarray, v: np.ndarray) -> _Spectrum:
    if rep.kind == "torus":
        lam = rep.weights @ s
        order = np.argsort(lam, kind="stable")
        eye = np.eye(rep.dim)
        lam_sorted = lam[order]
        basis = eye[:, order]
    else:
        a = rep.sigma(s)
        lam_sorted, basis = np.linalg.eigh((a + a.conj().T) / 2)
    scale = max(1.0, float(np.max(np.abs(lam_sorted), initial=0.0)))
    groups: list[list[int]] = []
    for i, val in enumerate(lam_sorted):
        if groups and val - lam_sorted[groups[-1][-1]] <= EIG_RTOL * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    values, bases, comps = [], [], []
    for g in groups:
        b = basis[:, g]
        values.append(float(np.mean(lam_sorted[g])))
        bases.append(b)
        comps.append(b.conj().T @ v)
    vals = np.array(values)
    # exact zero for the kernel cluster
    vals[np.abs(vals) <= EIG_RTOL * scale] = 0.0
    return _Spectrum(vals, tuple(bases), tuple(comps))


def _support_state(spec: _Spectrum, v: np.ndarray) -> tuple[bool, bool]:
    """(positive part present, positive part indeterminate)."""
    nv = float(np.linalg.norm(v))
    present = indeterminate = False
    for val, c in zip(spec.values, spec.comps):
        if val <= 0:
            continue
        m = float(np.linalg.norm(c))
        if m > SUPPORT_BAND * nv:
            present = True
        elif m > SUPPORT_TOL * nv:
            indeterminate = True
    return present, indeterminate


def act(rep: Representation, s, t: float, v) -> np.ndarray:
    """exp(t sigma(s)) v.  Overflowing entries come back as inf."""
    v = _as_point(v)
    s = np.asarray(s, dtype=complex)
    try:
        sh = as_hermitian(rep, s)
    except ValueError:
        sh = None
    with np.errstate(over="ignore", invalid="ignore"):
        if sh is not None:
            spec = _spectrum(rep, sh, v)
            out = np.zeros(rep.dim, dtype=complex)
            for val, b, c in zip(spec.values, spec.bases, spec.comps):
                if np.any(c):  # an absent component stays zero, never inf * 0
                    out = out + np.exp(t * val) * (b @ c)
            return out
        return linalg.expm(t * rep.sigma(s)) @ v


def moment_pairing(sympl: Symplectization, s, v) -> float:
    """mu_tau^{-is}(v) for Hermitian s."""
    rep = sympl.rep
    s = as_hermitian(rep, s)
    v = _as_point(v)
    quad = 0.5 * float(np.vdot(v, rep.sigma(s) @ v).real)
    return quad + TAU_SIGN * sympl.tau_pairing(s)


def moment_vector(sympl: Symplectization, v) -> np.ndarray:
    """M(v): Hermitian matrix (real vector for tori) with <M(v), s> = mu^{-is}(v)."""
    rep = sympl.rep
    v = _as_point(v)
    if rep.kind == "torus":
        return 0.5 * rep.weights.T @ (np.abs(v) ** 2) + TAU_SIGN * sympl.tau
    t = np.einsum("i,abij,j->ab", v.conj(), rep.images, v)
    m = 0.5 * t.conj() + TAU_SIGN * sympl.tau * np.eye(rep.rank)
    return (m + m.conj().T) / 2


def moment_norm(sympl: Symplectization, v) -> float:
    return float(np.linalg.norm(moment_vector(sympl, v)))


def lambda_curve(sympl: Symplectization, s, v, t: float) -> float:
    """lambda_v^s(t) = mu^{-is}(e^{ts} v), evaluated spectrally."""
    rep = sympl.rep
    s = as_hermitian(rep, s)
    v = _as_point(v)
    spec = _spectrum(rep, s, v)
    with np.errstate(over="ignore"):
        quad = sum(0.5 * val * np.exp(2 * t * val) * float(np.vdot(c, c).real)
                   for val, c in zip(spec.values, spec.comps))
    return float(quad) + TAU_SIGN * sympl.tau_pairing(s)


def maximal_weight(sympl: Symplectization, s, v) -> float:
    """lambda^s(v) in R or +inf, for Hermitian s."""
    rep = sympl.rep
    s = as_hermitian(rep, s)
    v = _as_point(v)
    spec = _spectrum(rep, s, v)
    present, indeterminate = _support_state(spec, v)
    if present:
        return float("inf")
    if indeterminate:
        raise IndeterminateSupportError("positive eigencomponent inside the support tolerance band")
    return TAU_SIGN * sympl.tau_pairing(s)


def maximal_weight_general(sympl: Symplectization, s, v) -> float:
    """lambda^s(v) for any Hermitian-type s, via its Hermitian representative."""
    rep = sympl.rep
    h = reductive.hermitian_type(reductive.algebra_element(s, rep.kind))
    rep_h = reductive.retract_to_compact(h)
    return maximal_weight(sympl, rep_h.hermitian_part(), v)


def maximal_weight_in_conjugate_triple(sympl: Symplectization, gamma, s, v) -> float:
    """lambda^s(v) computed with the triple conjugated by gamma.

    Requires ad_{gamma^{-1}}(s) to be Hermitian (s Hermitian for both
    compact subgroups).
    """
    rep = sympl.rep
    gamma = np.asarray(gamma, dtype=complex)
    if rep.kind == "torus":
        s2 = as_hermitian(rep, s)
        v2 = rep.rho(1 / gamma) @ _as_point(v)
    else:
        s2 = as_hermitian(rep, reductive.adjoint(np.linalg.inv(gamma), s))
        v2 = rep.rho(np.linalg.inv(gamma)) @ _as_point(v)
    return maximal_weight(sympl, s2, v2)


def energy(sympl: Symplectization, s, v) -> float:
    """Energy of the curve t -> e^{ts} v on [0, inf)."""
    rep = sympl.rep
    s = as_hermitian(rep, s)
    v = _as_point(v)
    spec = _spectrum(rep, s, v)
    present, indeterminate = _support_state(spec, v)
    if present:
        return float("inf")
    if indeterminate:
        raise IndeterminateSupportError("positive eigencomponent inside the support tolerance band")
    return float(sum(-0.5 * val * float(np.vdot(c, c).real)
                     for val, c in zip(spec.values, spec.comps) if val < 0))


def limit_point(sympl: Symplectization, s, v) -> np.ndarray | None:
    """lim e^{ts} v as t -> inf, or None when the curve escapes."""
    rep = sympl.rep
    s = as_hermitian(rep, s)
    v = _as_point(v)
    spec = _spectrum(rep, s, v)
    present, indeterminate = _support_state(spec, v)
    if present:
        return None
    if indeterminate:
        raise IndeterminateSupportError("positive eigencomponent inside the support tolerance band")
    out = np.zeros(rep.dim, dtype=complex)
    for val, b, c in zip(spec.values, spec.bases, spec.comps):
        if val == 0.0:
            out = out + b @ c
    return out


def kempf_ness(sympl: Symplectization, s, t: float, v) -> float:
    """Psi(v, e^{ts}) for Hermitian s; +inf on overflow."""
    rep = sympl.rep
    s = as_hermitian(rep, s)
    v = _as_point(v)
    spec = _spectrum(rep, s, v)
    with np.errstate(over="ignore", invalid="ignore"):
        total = sum(0.25 * float(np.vdot(c, c).real) * np.expm1(2 * t * val)
                    for val, c in zip(spec.values, spec.comps))
        total = float(total) + TAU_SIGN * t * sympl.tau_pairing(s)
    if not np.isfinite(total):
        return float("inf")
    return total


def group_polar_exponent(rep: Representation, g) -> np.ndarray:
    """Hermitian s with g = k e^s, k in K (log|g| for tori)."""
    g = np.asarray(g, dtype=complex)
    if rep.kind == "torus":
        if np.any(g == 0):
            raise ValueError("singular group element")
        return np.log(np.abs(g))
    return reductive.polar_decompose(g).log_h()


def kempf_ness_group(sympl: Symplectization, g, v) -> float:
    """Psi(v, g) via g = k e^s and left K-invariance."""
    s = group_polar_exponent(sympl.rep, g)
    return kempf_ness(sympl, s, 1.0, v)


def kempf_ness_potential(sympl: Symplectization, g, v) -> float:
    """Psi(v, g) = phi(g v) - phi(v) + <tau, log|g|> with phi = |.|^2 / 4.

    The second term is the character of G attached to the central shift;
    it vanishes for tau = 0.
    """
    rep = sympl.rep
    v = _as_point(v)
    gv = rep.rho(g) @ v
    phi = 0.25 * (np.vdot(gv, gv).real - np.vdot(v, v).real)
    g = np.asarray(g, dtype=complex)
    if rep.kind == "torus":
        char = float(np.dot(sympl.tau, np.log(np.abs(g))))
    else:
        char = float(sympl.tau * np.log(abs(np.linalg.det(g))))
    return float(phi) + TAU_SIGN * char


@dataclass(frozen=True)
class StabilizerData:
    """Bases of g_v (complex) and k_v (real, anti-Hermitian), and reductivity."""

    g_basis: list[np.ndarray]
    k_basis: list[np.ndarray]

    @property
    def reductive(self) -> bool:
        return len(self.g_basis) == len(self.k_basis)

    @property
    def dim(self) -> int:
        return len(self.g_basis)

    def hermitian_basis(self) -> list[np.ndarray]:
        """Real basis of i k_v (the Hermitian directions fixing v)."""
        return [(-1j * b) if b.ndim == 2 else (-1j * b).real for b in self.k_basis]


def stabilizer_algebra(rep: Representation, v) -> StabilizerData:
    v = _as_point(v)
    if rep.kind == "torus":
        nv = float(np.linalg.norm(v))
        supp = np.abs(v) > SUPPORT_TOL * nv if nv > 0 else np.zeros(rep.dim, bool)
        w = rep.weights[supp].astype(float)
        null = reductive._real_null_space(w) if w.size else np.eye(rep.rank)
        g_basis = [col.astype(complex) for col in null.T]
        return StabilizerData(g_basis, [1j * col for col in null.T])
    r = rep.rank
    units = []
    for a in range(r):
        for b in range(r):
            e = np.zeros((r, r), dtype=complex)
            e[a, b] = 1.0
            units.append(e)
    cols = np.stack([rep.images[a, b] @ v for a in range(r) for b in range(r)], axis=1)
    null = reductive.complex_null_space(cols)
    g_basis = [sum(c * u for c, u in zip(vec, units)) for vec in null.T]
    kb = reductive.compact_basis(r)
    rcols = np.stack([np.concatenate([(rep.sigma(b) @ v).real, (rep.sigma(b) @ v).imag]) for b in kb], axis=1)
    rnull = reductive._real_null_space(rcols)
    k_basis = reductive.orthonormalize_real([sum(c * b for c, b in zip(vec, kb)) for vec in rnull.T])
    return StabilizerData(g_basis, k_basis)


def calibrate_tau_sign() -> int:
    """Pick the sign of the tau-term from the energy identity on a probe.

    On weights {1, -1}, tau = 1, v = (1, 0), s = -1 the quadrature energy
    of t -> e^{ts} v must equal <tau, s> - mu_tau^{-is}(v).
    """
    probe_w = np.array([[1], [-1]])
    v = np.array([1.0, 0.0])
    s = np.array([-1.0])
    tau = np.array([1.0])
    rates = probe_w @ s
    live = v != 0
    quad, _ = integrate.quad(lambda t: float(np.sum((rates[live] * np.exp(t * rates[live]) * v[live]) ** 2)),
                             0, np.inf, epsabs=1e-13, epsrel=1e-12)
    quadratic = 0.5 * float(np.sum(rates * v**2))
    pairing = float(tau @ s)
    for sign in (1, -1):
        formula = pairing - (quadratic + sign * pairing)
        if abs(formula - quad) < 1e-9:
            return sign
    raise RuntimeError("no sign reproduces the energy identity")
