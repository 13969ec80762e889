"""Matrix-level Lie theory for tori and GL(r).

Elements of the Lie algebra are dense numpy arrays: a length-k complex
vector for the torus ``(C*)^k`` and an ``r x r`` complex matrix for
``gl(r)``.  Hermitian-type elements carry their spectral data (ascending
distinct eigenvalues and complementary eigenprojections), which is what
every other operation here is phrased in terms of.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy import linalg

# Two eigenvalues are merged when their gap is below CLUSTER_RTOL * max(1, rho).
CLUSTER_RTOL = 1e-9
# Rank of a matrix: singular values above RANK_RTOL * sigma_max.
RANK_RTOL = 1e-10
# Singular values / imaginary parts falling in these bands are "indeterminate".
RANK_BAND = (1e-13, 1e-7)
IMAG_BAND = (1e-9, 1e-6)
# Principal angle threshold for subspace equality.
ANGLE_TOL = 1e-8
# Generic relative tolerance for matrix identities.
MATRIX_RTOL = 1e-8

GroupKind = Literal["torus", "gl"]


class NotHermitianTypeError(ValueError):
    """Raised when an element is (or may be) outside the Hermitian-type cone."""


class NotEquivalentError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraElement:
    """An element of the torus algebra ``C^k`` or of ``gl(r, C)``."""

    kind: GroupKind
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if self.kind == "torus" and arr.ndim != 1:
            raise ValueError("torus elements are 1-d coordinate vectors")
        if self.kind == "gl" and (arr.ndim != 2 or arr.shape[0] != arr.shape[1]):
            raise ValueError("gl elements are square matrices")
        object.__setattr__(self, "entries", arr)

    @property
    def rank(self) -> int:
        return self.entries.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Image in the faithful matrix representation (diagonal for tori)."""
        if self.kind == "torus":
            return np.diag(self.entries)
        return self.entries


def algebra_element(x, kind: GroupKind | None = None) -> AlgebraElement:
    if isinstance(x, AlgebraElement):
        return x
    if isinstance(x, HermitianTypeElement):
        return x.raw
    arr = np.asarray(x, dtype=complex)
    if kind is None:
        kind = "torus" if arr.ndim == 1 else "gl"
    return AlgebraElement(kind, arr)


@dataclass(frozen=True)
class HermitianTypeElement:
    """A diagonalizable element with real spectrum, with its spectral data.

    ``eigenvalues`` are the distinct eigenvalues in ascending order and
    ``projectors[j]`` is the eigenprojection for ``eigenvalues[j]`` (in the
    faithful matrix representation).
    """

    raw: AlgebraElement
    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def kind(self) -> GroupKind:
        return self.raw.kind

    @property
    def matrix(self) -> np.ndarray:
        return self.raw.matrix

    @property
    def is_hermitian(self) -> bool:
        m = self.matrix
        return bool(np.linalg.norm(m - m.conj().T) <= MATRIX_RTOL * max(1.0, np.linalg.norm(m)))

    def hermitian_part(self) -> np.ndarray:
        """The element itself as a Hermitian matrix (real vector for tori)."""
        if self.kind == "torus":
            return self.raw.entries.real.copy()
        m = self.matrix
        return (m + m.conj().T) / 2


@dataclass(frozen=True)
class TypeCheck:
    """Outcome of :func:`classify_hermitian_type`.

    ``status`` is ``"accepted"``, ``"rejected"`` or ``"indeterminate"``;
    only accepted checks carry an ``element``.
    """

    status: Literal["accepted", "rejected", "indeterminate"]
    reason: str = ""
    element: HermitianTypeElement | None = None

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"


def _rank(a: np.ndarray) -> tuple[int, bool]:
    """Numerical rank and whether a singular value fell in the indeterminate band."""
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, False
    rel = sv / sv[0]
    borderline = bool(np.any((rel > RANK_BAND[0]) & (rel < RANK_BAND[1])))
    return int(np.sum(rel > RANK_RTOL)), borderline


def _cluster(values: np.ndarray, scale: float) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = []
    for idx in order:
        if groups and values[idx] - values[groups[-1][-1]] <= CLUSTER_RTOL * scale:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def classify_hermitian_type(s) -> TypeCheck:
    """Decide whether ``s`` is diagonalizable with real spectrum."""
    el = algebra_element(s)
    if el.kind == "torus":
        x = el.entries
        scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
        imag = float(np.max(np.abs(x.imag), initial=0.0)) / scale
        if imag >= IMAG_BAND[1]:
            return TypeCheck("rejected", f"non-real eigenvalue (imaginary part {imag:.3g})")
        if imag > IMAG_BAND[0]:
            return TypeCheck("indeterminate", f"imaginary part {imag:.3g} inside tolerance band")
        el = AlgebraElement("torus", x.real.astype(complex))
        return TypeCheck("accepted", element=_spectral_data(el))

    m = el.entries
    ev = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(ev), initial=0.0)))
    imag = float(np.max(np.abs(ev.imag), initial=0.0)) / scale
    if imag >= IMAG_BAND[1]:
        return TypeCheck("rejected", f"non-real eigenvalue (imaginary part {imag:.3g})")
    if imag > IMAG_BAND[0]:
        return TypeCheck("indeterminate", f"imaginary part {imag:.3g} inside tolerance band")
    groups = _cluster(ev.real, scale)
    eye = np.eye(m.shape[0])
    for g in groups:
        eta = float(np.mean(ev.real[g]))
        a = m - eta * eye
        r1, b1 = _rank(a)
        r2, b2 = _rank(a @ a)
        if b1 or b2:
            return TypeCheck("indeterminate", f"rank test at eigenvalue {eta:.6g} inside tolerance band")
        if r1 != r2:
            return TypeCheck("rejected", f"nonzero nilpotent part at eigenvalue {eta:.6g}")
    return TypeCheck("accepted", element=_spectral_data(el))


def _spectral_data(el: AlgebraElement) -> HermitianTypeElement:
    m = el.matrix
    ev = np.linalg.eigvals(m).real if el.kind == "gl" else el.entries.real
    scale = max(1.0, float(np.max(np.abs(ev), initial=0.0)))
    groups = _cluster(ev, scale)
    etas = np.array([np.mean(ev[g]) for g in groups])
    eye = np.eye(m.shape[0], dtype=complex)
    projectors = []
    for j, eta in enumerate(etas):
        p = eye.copy()
        for i, other in enumerate(etas):
            if i != j:
                p = p @ (m - other * eye) / (eta - other)
        projectors.append(p)
    return HermitianTypeElement(el, etas, tuple(projectors))


def hermitian_type(s) -> HermitianTypeElement:
    """Like :func:`classify_hermitian_type` but raise unless accepted."""
    if isinstance(s, HermitianTypeElement):
        return s
    check = classify_hermitian_type(s)
    if not check.accepted:
        raise NotHermitianTypeError(f"{check.status}: {check.reason}")
    return check.element


# ---------------------------------------------------------------------------
# parabolic data


@dataclass(frozen=True)
class ParabolicTriple:
    base: HermitianTypeElement
    g_alg: list[np.ndarray]
    z_alg: list[np.ndarray]
    u_alg: list[np.ndarray]


def _orth_range(p: np.ndarray) -> np.ndarray:
    u, sv, _ = np.linalg.svd(p)
    r = int(np.sum(sv > RANK_RTOL * max(sv[0], 1e-300)))
    return u[:, :r]


def _blocks(h: HermitianTypeElement):
    """Pairs (range basis V_j, co-basis B_j) with P_j = V_j @ B_j."""
    out = []
    for p in h.projectors:
        v = _orth_range(p)
        out.append((v, v.conj().T @ p))
    return out


def parabolic_triple(s) -> ParabolicTriple:
    """Bases of g(s), z(s), u(s): ad(s)-eigenspaces for eigenvalues <=0, =0, <0."""
    h = hermitian_type(s)
    if h.kind == "torus":
        k = h.raw.rank
        basis = [e for e in np.eye(k, dtype=complex)]
        return ParabolicTriple(h, basis, list(basis), [])
    blocks = _blocks(h)
    z, u = [], []
    for i, (vi, _) in enumerate(blocks):
        for j, (_, bj) in enumerate(blocks):
            if i > j:
                continue
            for a in range(vi.shape[1]):
                for b in range(bj.shape[0]):
                    elt = np.outer(vi[:, a], bj[b])
                    (z if i == j else u).append(elt)
    return ParabolicTriple(h, z + u, z, u)


def levi_projection(s, x: np.ndarray) -> np.ndarray:
    """Projection of ``x`` onto z(s) along the other ad(s)-eigenspaces."""
    h = hermitian_type(s)
    x = np.asarray(x, dtype=complex)
    if h.kind == "torus":
        return x
    return sum(p @ x @ p for p in h.projectors)


def _lower_part(h: HermitianTypeElement, x: np.ndarray) -> np.ndarray:
    """Component of ``x`` in ad(s)-eigenspaces with positive eigenvalue."""
    ps = h.projectors
    return sum(
        (ps[i] @ x @ ps[j] for i in range(len(ps)) for j in range(len(ps)) if i > j),
        np.zeros_like(x),
    )


@dataclass(frozen=True)
class Membership:
    """``kind`` is ``"U"`` (so also in G(s)), ``"G"`` or ``"neither"``."""

    kind: Literal["U", "G", "neither"]
    limit: np.ndarray | None


def parabolic_member(g, s) -> Membership:
    """Membership of ``g`` in G(s) / U(s), with lim e^{ts} g e^{-ts} when it exists."""
    h = hermitian_type(s)
    g = np.asarray(g, dtype=complex)
    if h.kind == "torus":
        g = np.diag(g) if g.ndim == 1 else g
    if abs(np.linalg.det(g)) <= 1e-14 * max(1.0, np.linalg.norm(g)) ** g.shape[0]:
        raise ValueError("group element is not invertible")
    tol = MATRIX_RTOL * max(1.0, np.linalg.norm(g))
    if h.kind == "torus":
        return Membership("U" if np.linalg.norm(g - np.eye(len(g))) <= tol else "G", g)
    if np.linalg.norm(_lower_part(h, g)) > tol:
        return Membership("neither", None)
    limit = levi_projection(h, g)
    kind = "U" if np.linalg.norm(limit - np.eye(len(g))) <= tol else "G"
    return Membership(kind, limit)


def conjugation_limit_sample(g, s, t: float) -> np.ndarray:
    """``e^{ts} g e^{-ts}`` computed spectrally (for checking :func:`parabolic_member`)."""
    h = hermitian_type(s)
    e_plus = sum(np.exp(t * eta) * p for eta, p in zip(h.eigenvalues, h.projectors))
    e_minus = sum(np.exp(-t * eta) * p for eta, p in zip(h.eigenvalues, h.projectors))
    return e_plus @ np.asarray(g, dtype=complex) @ e_minus


def equiv(s, sigma) -> bool:
    """``sigma ~ s``: sigma lies in g(s) and its z(s)-projection is s."""
    h = hermitian_type(s)
    x = algebra_element(sigma).entries
    if h.kind == "torus":
        return bool(np.allclose(x, h.raw.entries, atol=MATRIX_RTOL * max(1.0, np.linalg.norm(x))))
    scale = max(1.0, np.linalg.norm(h.matrix), np.linalg.norm(x))
    if np.linalg.norm(_lower_part(h, x)) > MATRIX_RTOL * scale:
        return False
    return bool(np.linalg.norm(levi_projection(h, x) - h.matrix) <= MATRIX_RTOL * scale)


def find_unipotent(s, sigma) -> np.ndarray:
    """The unique u in U(s) with u s u^{-1} = sigma."""
    h = hermitian_type(s)
    sig = algebra_element(sigma).entries
    if not equiv(h, sig):
        raise NotEquivalentError("not equivalent")
    if h.kind == "torus":
        return np.eye(h.raw.rank, dtype=complex)
    m = h.matrix
    basis = parabolic_triple(h).u_alg
    r = m.shape[0]
    if not basis:
        return np.eye(r, dtype=complex)
    # (I + n) s = sigma (I + n)  <=>  n s - sigma n = sigma - s
    cols = np.stack([(b @ m - sig @ b).ravel() for b in basis], axis=1)
    coef, *_ = np.linalg.lstsq(cols, (sig - m).ravel(), rcond=None)
    u = np.eye(r, dtype=complex) + sum(c * b for c, b in zip(coef, basis))
    return u


# ---------------------------------------------------------------------------
# flags and the retraction onto the Hermitian representatives


@dataclass(frozen=True)
class FlagClass:
    """Ascending filtration F_1 < ... < F_m = C^r (orthonormal bases) and weights."""

    subspaces: tuple[np.ndarray, ...]
    weights: np.ndarray

    def __post_init__(self):
        dims = [b.shape[1] for b in self.subspaces]
        if any(a >= b for a, b in zip(dims, dims[1:])):
            raise ValueError("filtration dimensions must increase strictly")
        if len(dims) != len(self.weights):
            raise ValueError("one weight per filtration step")

    def __eq__(self, other):
        if not isinstance(other, FlagClass):
            return NotImplemented
        if len(self.weights) != len(other.weights):
            return False
        scale = max(1.0, float(np.max(np.abs(self.weights))))
        if np.max(np.abs(self.weights - other.weights)) > CLUSTER_RTOL * scale * 10:
            return False
        return all(same_subspace(a, b) for a, b in zip(self.subspaces, other.subspaces))

    __hash__ = None


def same_subspace(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape[1] != b.shape[1]:
        return False
    if a.shape[1] == 0:
        return True
    return bool(np.max(linalg.subspace_angles(a, b)) < ANGLE_TOL)


def _ascending_orthonormal_steps(h: HermitianTypeElement) -> list[np.ndarray]:
    """Orthonormal bases Q_j with F_j = span(Q_1, ..., Q_j)."""
    stacked = np.concatenate([_orth_range(p) for p in h.projectors], axis=1)
    q, _ = np.linalg.qr(stacked)
    steps, start = [], 0
    for p in h.projectors:
        d = _orth_range(p).shape[1]
        steps.append(q[:, start:start + d])
        start += d
    return steps


def flag_class(s) -> FlagClass:
    h = hermitian_type(s)
    if h.kind == "torus":
        raise ValueError("flag data is only defined for gl elements")
    steps = _ascending_orthonormal_steps(h)
    cumulative = tuple(np.concatenate(steps[: j + 1], axis=1) for j in range(len(steps)))
    return FlagClass(cumulative, h.eigenvalues.copy())


def retract_to_compact(s) -> HermitianTypeElement:
    """The Hermitian element equivalent to ``s``."""
    h = hermitian_type(s)
    if h.kind == "torus":
        return h
    if h.is_hermitian:
        m = h.hermitian_part()
        return HermitianTypeElement(AlgebraElement("gl", m), h.eigenvalues, h.projectors)
    steps = _ascending_orthonormal_steps(h)
    projectors = tuple(q @ q.conj().T for q in steps)
    m = sum(eta * p for eta, p in zip(h.eigenvalues, projectors))
    return HermitianTypeElement(AlgebraElement("gl", (m + m.conj().T) / 2), h.eigenvalues, projectors)


def adjoint(g, x) -> np.ndarray:
    """ad_g(x) = g x g^{-1}."""
    g = np.asarray(g, dtype=complex)
    return g @ np.asarray(x, dtype=complex) @ np.linalg.inv(g)


# ---------------------------------------------------------------------------
# polar decomposition and centralizers


@dataclass(frozen=True)
class PolarPair:
    k_part: np.ndarray
    h_part: np.ndarray

    def log_h(self) -> np.ndarray:
        """The Hermitian exponent s with h = exp(s)."""
        w, v = np.linalg.eigh(self.h_part)
        return (v * np.log(w)) @ v.conj().T


def polar_decompose(g) -> PolarPair:
    """g = k h with k unitary and h = (g* g)^{1/2}."""
    g = np.asarray(g, dtype=complex)
    sv = np.linalg.svd(g, compute_uv=False)
    if sv[-1] <= 1e-14 * sv[0]:
        raise ValueError("singular group element")
    k, h = linalg.polar(g, side="right")
    return PolarPair(k, (h + h.conj().T) / 2)


def hermitian_basis(r: int) -> list[np.ndarray]:
    """Orthonormal basis of the Hermitian r x r matrices for <a, b> = Re tr(a* b)."""
    basis = []
    for a in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[a, a] = 1.0
        basis.append(e)
    for a in range(r):
        for b in range(a + 1, r):
            e = np.zeros((r, r), dtype=complex)
            e[a, b] = e[b, a] = 1 / np.sqrt(2)
            basis.append(e)
            f = np.zeros((r, r), dtype=complex)
            f[a, b] = -1j / np.sqrt(2)
            f[b, a] = 1j / np.sqrt(2)
            basis.append(f)
    return basis


def compact_basis(r: int) -> list[np.ndarray]:
    """Orthonormal basis of u(r) (anti-Hermitian matrices)."""
    return [1j * b for b in hermitian_basis(r)]


def _real_null_space(cols: np.ndarray) -> np.ndarray:
    """Null space of a real matrix (columns = coordinates)."""
    if cols.shape[0] == 0:
        return np.eye(cols.shape[1])
    _, sv, vh = np.linalg.svd(cols)
    scale = max(sv[0], 1.0) if sv.size else 1.0
    rank = int(np.sum(sv > 1e-10 * scale))
    return vh[rank:].T


def complex_null_space(cols: np.ndarray) -> np.ndarray:
    if cols.shape[0] == 0:
        return np.eye(cols.shape[1], dtype=complex)
    _, sv, vh = np.linalg.svd(cols)
    scale = max(sv[0], 1.0) if sv.size else 1.0
    rank = int(np.sum(sv > 1e-10 * scale))
    return vh[rank:].conj().T


def centralizer_algebra(
    generators: Sequence[np.ndarray],
    rank: int,
    ambient: Literal["full", "compact", "hermitian"] = "full",
    kind: GroupKind = "gl",
) -> list[np.ndarray]:
    """Basis of {a : [a, g_i] = 0 for all i} inside the requested real form.

    ``"full"`` gives a complex basis of the commutant in gl(r); ``"compact"``
    and ``"hermitian"`` give real bases inside u(r) and i u(r).
    """
    if kind == "torus":
        eye = np.eye(rank)
        if ambient == "full":
            return [e.astype(complex) for e in eye]
        return [(1j * e if ambient == "compact" else e.astype(complex)) for e in eye]
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if ambient == "full":
        units = []
        for a in range(rank):
            for b in range(rank):
                e = np.zeros((rank, rank), dtype=complex)
                e[a, b] = 1.0
                units.append(e)
        if not gens:
            return units
        cols = np.stack([np.concatenate([(u @ g - g @ u).ravel() for g in gens]) for u in units], axis=1)
        null = complex_null_space(cols)
        return [sum(c * u for c, u in zip(vec, units)) for vec in null.T]
    basis = compact_basis(rank) if ambient == "compact" else hermitian_basis(rank)
    if not gens:
        return basis
    blocks = []
    for b in basis:
        comm = np.concatenate([(b @ g - g @ b).ravel() for g in gens])
        blocks.append(np.concatenate([comm.real, comm.imag]))
    null = _real_null_space(np.stack(blocks, axis=1))
    return [sum(c * b for c, b in zip(vec, basis)) for vec in null.T]


def center_of(basis: Sequence[np.ndarray], rank: int, ambient="compact") -> list[np.ndarray]:
    """Center of the real Lie algebra spanned by ``basis`` (a subalgebra of u(r) or i u(r))."""
    if not basis:
        return []
    comm = centralizer_algebra(basis, rank, ambient)
    return intersect_real_spans(basis, comm)


def _realify(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def intersect_real_spans(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Real basis of span_R(a) ∩ span_R(b)."""
    if not a or not b:
        return []
    ra = np.stack([_realify(x) for x in a], axis=1)
    rb = np.stack([_realify(x) for x in b], axis=1)
    null = _real_null_space(np.concatenate([ra, -rb], axis=1))
    out = [sum(c * x for c, x in zip(vec[: len(a)], a)) for vec in null.T]
    return orthonormalize_real(out)


def orthonormalize_real(mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Orthonormal real basis (for Re tr(a* b)) of the real span of ``mats``."""
    if not mats:
        return []
    shape = mats[0].shape
    cols = np.stack([_realify(m) for m in mats], axis=1)
    u, sv, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(sv > 1e-10 * max(sv[0], 1e-300))) if sv.size else 0
    half = int(np.prod(shape))
    return [(u[:half, j] + 1j * u[half:, j]).reshape(shape) for j in range(rank)]


def orthogonal_complement_real(sub: Sequence[np.ndarray], ambient: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Real orthonormal basis of the complement of ``sub`` inside span(ambient)."""
    amb = orthonormalize_real(ambient)
    if not amb:
        return []
    sub = orthonormalize_real(sub)
    if not sub:
        return amb
    shape = amb[0].shape
    a = np.stack([_realify(m) for m in amb], axis=1)
    s = np.stack([_realify(m) for m in sub], axis=1)
    # coordinates of sub in the ambient orthonormal basis
    coords = a.T @ s
    q, _ = np.linalg.qr(coords, mode="complete")
    comp = q[:, coords.shape[1]:]
    half = int(np.prod(shape))
    out = a @ comp
    return [(out[:half, j] + 1j * out[half:, j]).reshape(shape) for j in range(out.shape[1])]


def unitary_similar(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    """Whether two Hermitian matrices are conjugate under U(r) (equal spectra)."""
    ea = np.linalg.eigvalsh((a + a.conj().T) / 2)
    eb = np.linalg.eigvalsh((b + b.conj().T) / 2)
    return bool(np.max(np.abs(ea - eb)) <= tol * max(1.0, float(np.max(np.abs(ea)))))
