"""Kempf-Ness descent, moment-norm infimum, zero shifts and boundedness probes.

The descent follows the negative gradient of g -> Psi(v, g): from the
current point ``w`` it moves to ``exp(-eps M(w)) w`` where ``M`` is the
moment vector.  Step sizes come from Armijo backtracking on the closed form
of Psi along the step.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy import linalg

from . import momentum, reductive
from .representation import Symplectization

SHRINK = 0.5
ARMIJO_C = 1e-4
GROWTH = 2.0
MAX_STEP_EXPONENT = 4.0  # cap on |eps * direction| per step
DIVERGENCE = 40.0
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100_000
# a point with |mu| <= tol is accepted as a zero when the Newton displacement is below this
NEWTON_ACCEPT = 1e-6
STALL_WINDOW = 25
STALL_RTOL = 1e-9
STAGNATION = 50  # iterations without halving |mu| before preconditioning
RIDGE = 1e-14
RANK_RTOL = 1e-6  # relative singular value below which a direction counts as collapsed
PINV_RTOL = 1e-10  # pseudo-inverse cutoff for the Newton displacement
COLLAPSE = 320.0  # log-shrink of a coordinate treated as leaving the orbit

StepRule = Literal["bb", "grow"]
Classification = Literal["reached_zero", "stalled_positive", "degenerating", "inconclusive"]


class FlowError(RuntimeError):
    """Raised when a restricted descent does not reach a zero of the moment map."""

    def __init__(self, message: str, result: "FlowResult | None" = None):
        super().__init__(message)
        self.result = result


@dataclass
class FlowResult:
    point: np.ndarray
    group: np.ndarray  # torus: k-vector of positive reals; gl: r x r matrix
    exponent: np.ndarray  # sum of the Hermitian step exponents (torus: real k-vector)
    classification: Classification
    mu_norm: float
    psi: float
    iterations: int
    wall_time: float
    mu_trajectory: list[float] = field(default_factory=list, repr=False)
    psi_trajectory: list[float] = field(default_factory=list, repr=False)

    @property
    def exponent_norm(self) -> float:
        return float(np.linalg.norm(self.exponent))

    def polar_exponent(self) -> np.ndarray:
        """Hermitian s with group = k e^s, k unitary (log|g| for tori)."""
        if self.group.ndim == 1:
            return np.log(self.group)
        return reductive.polar_decompose(self.group).log_h()

    @property
    def semistable(self) -> bool | None:
        if self.classification == "inconclusive":
            return None
        return self.classification != "stalled_positive"


def _norm(x: np.ndarray) -> float:
    """Euclidean norm that does not underflow for tiny entries."""
    m = float(np.max(np.abs(x), initial=0.0))
    return m * float(np.linalg.norm(x / m)) if m > 0 else 0.0


def _hermitian_coords(basis: Sequence[np.ndarray], m: np.ndarray) -> np.ndarray:
    return np.array([float(np.vdot(b, m).real) for b in basis])


def _project(basis: Sequence[np.ndarray] | None, m: np.ndarray) -> np.ndarray:
    if basis is None:
        return m
    if not basis:
        return np.zeros_like(m)
    return sum(c * b for c, b in zip(_hermitian_coords(basis, m), basis))


def _basis(sympl: Symplectization, basis: Sequence[np.ndarray] | None) -> list[np.ndarray]:
    if basis is not None:
        return list(basis)
    if sympl.kind == "torus":
        return [e for e in np.eye(sympl.rep.rank)]
    return reductive.hermitian_basis(sympl.rep.rank)


def _gram(sympl: Symplectization, w: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """Hessian of s -> Psi(w, e^s) at s = 0 in an orthonormal basis: Re <sigma(a) w, sigma(b) w>."""
    vecs = np.stack([sympl.rep.sigma(b) @ w for b in basis], axis=1)
    return (vecs.conj().T @ vecs).real


def _newton_direction(sympl, w, d, basis, ridge: float) -> np.ndarray:
    """-(H + ridge tr(H) I)^{-1} d, assembled back into a direction."""
    h = _gram(sympl, w, basis)
    coords = _hermitian_coords(basis, d)
    scale = max(float(np.trace(h)), 1e-300)
    sol = np.linalg.solve(h + ridge * scale * np.eye(len(basis)), coords)
    return -sum(c * b for c, b in zip(sol, basis))


def _action_factor(sympl: Symplectization, w: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """Real matrix A with A^T A the Hessian of s -> Psi(w, e^s) at s = 0."""
    vecs = np.stack([sympl.rep.sigma(b) @ w for b in basis], axis=1)
    return np.vstack([vecs.real, vecs.imag])


def _action_rank(sympl: Symplectization, w: np.ndarray) -> int:
    """Complex rank of s -> sigma(s) w on the whole algebra, constant along an orbit."""
    rep = sympl.rep
    if rep.kind == "torus":
        cols = rep.weights * w[:, None]
    else:
        cols = np.stack([rep.images[a, b] @ w for a in range(rep.rank) for b in range(rep.rank)], axis=1)
    sv = np.linalg.svd(cols, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > RANK_RTOL * float(sv[0])))


def _hessian_displacement(sympl: Symplectization, w: np.ndarray, m: np.ndarray,
                          basis: Sequence[np.ndarray] | None) -> float:
    """Length of the Newton step -H^+ M for s -> Psi(w, e^s) at s = 0.

    Uses the SVD of the factor A rather than the eigenvalues of H = A^T A.
    """
    basis = _basis(sympl, basis)
    if not basis:
        return 0.0
    g = _hermitian_coords(basis, m)
    _, sv, vt = np.linalg.svd(_action_factor(sympl, w, basis), full_matrices=False)
    keep = sv > PINV_RTOL * max(float(sv[0]), 1e-300)
    coef = vt[keep] @ g
    return float(np.linalg.norm(coef / sv[keep] ** 2))


def _torus_increment(sympl: Symplectization, unit: np.ndarray, t: float, w: np.ndarray) -> float:
    """Psi(w, e^{t unit}) for a torus, vectorized."""
    rates = sympl.rep.weights @ unit
    with np.errstate(over="ignore", invalid="ignore"):
        total = 0.25 * float(np.sum(np.abs(w) ** 2 * np.expm1(2 * t * rates)))
    total += momentum.TAU_SIGN * t * float(np.dot(sympl.tau, unit))
    return total if np.isfinite(total) else float("inf")


def _floor_verdict(mu: float, tol: float, far: float | None) -> Classification:
    """Classify a descent that can make no further progress."""
    if mu > 10 * tol:
        return "stalled_positive"
    if far is not None and far > NEWTON_ACCEPT:
        return "degenerating"
    return "inconclusive"


def kn_descent(
    sympl: Symplectization,
    v,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    restrict: Sequence[np.ndarray] | None = None,
    divergence: float = DIVERGENCE,
    step_rule: StepRule = "bb",
    precondition: bool = True,
) -> FlowResult:
    """Descend Psi(v, .) from v along exp(-eps M) steps.

    ``restrict`` is an orthonormal basis of a subspace of Hermitian directions
    (real k-vectors for tori); the gradient is projected onto it.
    ``step_rule`` picks the trial step before backtracking: ``"bb"`` uses the
    Barzilai-Borwein quotient of the last two gradients, ``"grow"`` doubles
    the last accepted move.  With ``precondition`` the direction switches to
    the Gram-preconditioned gradient once plain descent stagnates; every step
    still passes the same Armijo test on Psi.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if step_rule not in ("bb", "grow"):
        raise ValueError(f"unknown step rule {step_rule!r}")
    start = time.perf_counter()
    rep = sympl.rep
    v0 = momentum._as_point(v)
    torus = rep.kind == "torus"
    basis = _basis(sympl, restrict)
    expo = np.zeros(rep.rank) if torus else np.zeros((rep.rank, rep.rank), dtype=complex)
    g = None if torus else np.eye(rep.rank, dtype=complex)
    w = v0.copy()
    psi = 0.0
    mus: list[float] = []
    psis: list[float] = [0.0]
    classification: Classification = "inconclusive"
    live = np.abs(v0) > 0
    log0 = np.log(np.abs(v0[live])) if torus else None
    prev_d = prev_move = None
    move = None  # length of the last accepted move
    newton = False
    rank0 = _action_rank(sympl, v0)
    it = 0
    m_full = momentum.moment_vector(sympl, w)
    for it in range(max_iter + 1):
        m_full = momentum.moment_vector(sympl, w)
        d = _project(restrict, m_full)
        mu = _norm(m_full)
        gnorm = _norm(d)
        mus.append(mu)
        enorm = float(np.linalg.norm(expo))
        if torus and np.any(live):
            # a coordinate near underflow has left every bounded part of the orbit
            with np.errstate(divide="ignore"):
                shrink = float(np.max(log0 - np.log(np.abs(w[live]))))
            if shrink > COLLAPSE:
                enorm = max(enorm, 2 * divergence)
        if enorm > divergence and mu < 10 * tol:
            classification = "degenerating"
            break
        far = None  # Newton displacement, once mu is small
        if mu <= tol and enorm <= divergence:
            rank = _action_rank(sympl, w)
            if rank < rank0:
                # the stabilizer grew: mu is small only near the orbit boundary
                classification = "degenerating"
                break
            if rank > rank0:
                # roundoff carried the trajectory off the orbit of v
                classification = "inconclusive"
                break
            far = _hessian_displacement(sympl, w, d, basis)
            if far <= NEWTON_ACCEPT:
                classification = "reached_zero"
                break
            if len(mus) > STALL_WINDOW and mus[-STALL_WINDOW - 1] <= 2 * mu:
                # roundoff floor while the zero still lies a fixed distance away
                classification = "degenerating"
                break
        if restrict is not None and gnorm <= tol and mu > 10 * tol:
            # restricted gradient vanishes but the full moment does not
            classification = "stalled_positive"
            break
        if enorm > divergence and len(mus) > STALL_WINDOW:
            old = mus[-STALL_WINDOW - 1]
            if mu > 10 * tol and old - mu <= STALL_RTOL * old:
                classification = "stalled_positive"
                break
        if it == max_iter:
            break
        if gnorm == 0.0:
            classification = _floor_verdict(mu, tol, far)
            break
        if precondition and not newton and len(mus) > STAGNATION:
            newton = mus[-1] > 0.5 * mus[-STAGNATION - 1]
        late = mu < 10 * tol or enorm > divergence
        if newton and basis:
            direction = _newton_direction(sympl, w, d, basis, RIDGE)
            trial = float(np.linalg.norm(direction))
            if late and move is not None:
                trial = max(trial, GROWTH * move)
        else:
            direction = -d
            trial = gnorm  # unit gradient step
            if step_rule == "bb" and prev_d is not None and not late:
                denom = float(np.vdot(prev_move, d - prev_d).real)
                if denom > 0:
                    trial = gnorm * float(np.vdot(prev_move, prev_move).real) / denom
            elif move is not None:
                trial = GROWTH * move
        dnorm = _norm(direction)
        if dnorm == 0.0 or not np.isfinite(dnorm):
            classification = _floor_verdict(mu, tol, far)
            break
        # unit direction so that eigenvalue clustering sees O(1) rates
        unit = direction / dnorm
        slope = float(np.vdot(d, unit).real)  # derivative of Psi along the unit move
        x = min(trial, MAX_STEP_EXPONENT)
        accepted = False
        while x > 1e-30:
            if torus:
                dpsi = _torus_increment(sympl, unit.real, x, w)
            else:
                dpsi = momentum.kempf_ness(sympl, unit, x, w)
            if np.isfinite(dpsi) and dpsi <= ARMIJO_C * x * slope:
                accepted = True
                break
            x *= SHRINK
        if not accepted:
            classification = _floor_verdict(mu, tol, far)
            break
        if torus:
            expo = expo + x * unit.real
            w = np.zeros_like(v0)
            w[live] = np.exp(rep.weights[live] @ expo) * v0[live]
        else:
            expo = expo + x * unit
            w = momentum.act(rep, unit, x, w)
            g = linalg.expm(x * unit) @ g
        psi += dpsi
        psis.append(psi)
        prev_d, prev_move = d, x * unit
        move = x
    with np.errstate(over="ignore"):
        group = np.exp(expo) if torus else g
    return FlowResult(
        point=w,
        group=group,
        exponent=expo.copy(),
        classification=classification,
        mu_norm=_norm(m_full),
        psi=psi,
        iterations=it,
        wall_time=time.perf_counter() - start,
        mu_trajectory=mus,
        psi_trajectory=psis,
    )


@dataclass(frozen=True)
class InfimumEstimate:
    value: float
    classification: Classification
    semistable: bool | None
    result: FlowResult


def inf_moment_norm(sympl: Symplectization, v, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> InfimumEstimate:
    """Estimate inf_g |mu(g v)| and read off semistability."""
    res = kn_descent(sympl, v, tol=tol, max_iter=max_iter)
    value = min(res.mu_trajectory) if res.mu_trajectory else res.mu_norm
    return InfimumEstimate(value, res.classification, res.semistable, res)


def zero_shift_subspace(sympl: Symplectization, v) -> list[np.ndarray]:
    """Orthonormal basis of the complement of i z(k_v) inside i z_k(k_v)."""
    rep = sympl.rep
    stab = momentum.stabilizer_algebra(rep, v)
    if rep.kind == "torus":
        herm_stab = [np.real(-1j * b) for b in stab.k_basis]
        amb = [e for e in np.eye(rep.rank)]
        return [np.real(b) for b in reductive.orthogonal_complement_real(herm_stab, amb)]
    r = rep.rank
    kv = stab.k_basis
    cent = reductive.centralizer_algebra(kv, r, "hermitian")
    center = reductive.center_of(kv, r, "compact")
    herm_center = [-1j * c for c in center]
    return reductive.orthogonal_complement_real(herm_center, cent)


@dataclass(frozen=True)
class ZeroShift:
    s0: np.ndarray
    point: np.ndarray
    mu_norm: float
    result: FlowResult


def find_zero_shift(sympl: Symplectization, v, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> ZeroShift:
    """s0 in the zero-shift subspace with mu(exp(s0) v) = 0, or raise FlowError."""
    rep = sympl.rep
    v = momentum._as_point(v)
    basis = zero_shift_subspace(sympl, v)
    res = kn_descent(sympl, v, tol=tol, max_iter=max_iter, restrict=basis)
    if res.classification != "reached_zero":
        raise FlowError(
            f"restricted descent ended {res.classification} with |mu| = {res.mu_norm:.3g}", res
        )
    s0 = _project(basis, res.polar_exponent()) if basis else np.zeros_like(res.exponent)
    point = momentum.act(rep, s0, 1.0, v)
    mu = momentum.moment_norm(sympl, point)
    if mu > 10 * tol:
        raise FlowError(f"full moment map does not vanish at the shifted point (|mu| = {mu:.3g})", res)
    return ZeroShift(s0, point, mu, res)


@dataclass(frozen=True)
class BoundednessProbe:
    bounded: bool
    infimum: float | None  # estimate of inf Psi(v, .) when bounded
    direction: np.ndarray | None  # destabilizing s when unbounded
    slope: float | None  # lambda^s(v) < 0 when unbounded
    heuristic: bool


def boundedness_probe(sympl: Symplectization, v, budget: int = 32, seed: int = 0,
                      tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                      descent: FlowResult | None = None) -> BoundednessProbe:
    """Decide whether Psi(v, .) is bounded below on G.

    ``descent`` may pass in an already computed kn_descent of ``v``.
    """
    from . import stability

    if descent is None and sympl.kind == "gl":
        descent = kn_descent(sympl, v, tol=tol, max_iter=max_iter)
    search = stability.destabilizer_search(sympl, v, budget=budget, seed=seed, descent=descent)
    if search.value < 0:
        s = search.direction
        # Psi(v, e^{ts}) has slope <= lambda^s(v) once t is large
        p10 = momentum.kempf_ness(sympl, s, 10.0, v)
        p20 = momentum.kempf_ness(sympl, s, 20.0, v)
        slope = (p20 - p10) / 10.0
        if not slope <= search.value + 1e-9 * max(1.0, abs(search.value)):
            raise RuntimeError(f"slope check failed: {slope} > {search.value}")
        return BoundednessProbe(False, None, s, search.value, heuristic=False)
    res = descent if descent is not None else kn_descent(sympl, v, tol=tol, max_iter=max_iter)
    return BoundednessProbe(True, min(res.psi_trajectory), None, None, heuristic=sympl.kind == "gl")
