"""Linear actions of tori and GL(r) on C^n, and their symplectizations."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .reductive import GroupKind

BRACKET_TOL = 1e-10


class RepresentationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Representation:
    """A linear action datum.

    Torus: ``weights`` is an integer ``n x k`` matrix, coordinate ``j`` has
    weight ``weights[j]``.  GL(r): ``images[a, b]`` is the ``n x n`` matrix of
    the elementary matrix ``E_ab``.
    """

    kind: GroupKind
    rank: int
    dim: int
    weights: np.ndarray | None = None
    images: np.ndarray | None = None
    name: str = "explicit"
    degree: int | None = None

    # -- algebra -----------------------------------------------------------
    def sigma(self, s) -> np.ndarray:
        """The n x n matrix by which the algebra element ``s`` acts."""
        s = np.asarray(s, dtype=complex)
        if self.kind == "torus":
            if s.shape != (self.rank,):
                raise ValueError(f"expected a torus element of length {self.rank}, got shape {s.shape}")
            return np.diag(self.weights @ s)
        if s.shape != (self.rank, self.rank):
            raise ValueError(f"expected a {self.rank}x{self.rank} matrix, got shape {s.shape}")
        return np.einsum("ab,abij->ij", s, self.images)

    def rho(self, g) -> np.ndarray:
        """The n x n matrix by which the group element ``g`` acts."""
        g = np.asarray(g, dtype=complex)
        if self.kind == "torus":
            if g.shape != (self.rank,) or np.any(g == 0):
                raise ValueError("torus group elements are nonzero k-vectors")
            return np.diag(np.exp(self.weights @ np.log(g)))
        if self.name == "standard":
            return g
        if self.name == "adjoint":
            return np.kron(g, np.linalg.inv(g).T)
        return linalg.expm(self.sigma(linalg.logm(g)))

    def weight_matrix(self) -> np.ndarray:
        """Weights of the diagonal maximal torus in the working basis.

        For gl this requires the images of the diagonal units to be diagonal,
        which holds for the named constructors.
        """
        if self.kind == "torus":
            return self.weights.astype(float)
        diag_images = [self.images[a, a] for a in range(self.rank)]
        if any(np.linalg.norm(m - np.diag(np.diag(m))) > BRACKET_TOL for m in diag_images):
            raise RepresentationError("diagonal torus does not act diagonally in this basis")
        return np.stack([np.diag(m).real for m in diag_images], axis=1)

    @property
    def group_dim(self) -> int:
        return self.rank if self.kind == "torus" else self.rank**2


def torus_representation(weights) -> Representation:
    w = np.asarray(weights)
    if w.ndim == 1:
        w = w[:, None]
    if w.ndim != 2:
        raise RepresentationError("weights must be an n x k matrix")
    if not np.all(np.equal(np.round(w), w)):
        raise RepresentationError("torus weights must be integers")
    w = w.astype(int)
    return Representation("torus", w.shape[1], w.shape[0], weights=w, name="weights")


def _unit(r, a, b):
    e = np.zeros((r, r), dtype=complex)
    e[a, b] = 1.0
    return e


def standard_representation(r: int) -> Representation:
    images = np.zeros((r, r, r, r), dtype=complex)
    for a in range(r):
        for b in range(r):
            images[a, b] = _unit(r, a, b)
    return Representation("gl", r, r, images=images, name="standard")


def adjoint_representation(r: int) -> Representation:
    n = r * r
    images = np.zeros((r, r, n, n), dtype=complex)
    for a in range(r):
        for b in range(r):
            e = _unit(r, a, b)
            # row-major vec of [e, X] = (e kron I - I kron e^T) vec(X)
            images[a, b] = np.kron(e, np.eye(r)) - np.kron(np.eye(r), e.T)
    return Representation("gl", r, n, images=images, name="adjoint")


def sym_multi_indices(r: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree-d monomials, x_1^d first (descending lex)."""
    out = [a for a in itertools.product(range(d, -1, -1), repeat=r) if sum(a) == d]
    return out


def symmetric_power_representation(r: int, d: int) -> Representation:
    """Sym^d(C^r) in the orthonormal basis sqrt(d!/alpha!) x^alpha."""
    if d < 1:
        raise RepresentationError("symmetric power degree must be >= 1")
    idx = sym_multi_indices(r, d)
    pos = {a: i for i, a in enumerate(idx)}
    n = len(idx)
    images = np.zeros((r, r, n, n), dtype=complex)
    for a in range(r):
        for b in range(r):
            for alpha in idx:
                if alpha[b] == 0:
                    continue
                if a == b:
                    images[a, a, pos[alpha], pos[alpha]] = alpha[a]
                    continue
                beta = list(alpha)
                beta[b] -= 1
                beta[a] += 1
                images[a, b, pos[tuple(beta)], pos[alpha]] = math.sqrt(alpha[b] * (alpha[a] + 1))
    return Representation("gl", r, n, images=images, name=f"sym^{d}", degree=d)


def check_gl_images(images: np.ndarray, tol: float = BRACKET_TOL) -> None:
    """Bracket compatibility and unitarity of the induced K-action; raise on failure."""
    r = images.shape[0]
    for a, b, c, d in itertools.product(range(r), repeat=4):
        lhs = np.zeros(images.shape[2:], dtype=complex)
        if b == c:
            lhs = lhs + images[a, d]
        if d == a:
            lhs = lhs - images[c, b]
        rhs = images[a, b] @ images[c, d] - images[c, d] @ images[a, b]
        err = np.max(np.abs(lhs - rhs), initial=0.0)
        if err > tol:
            raise RepresentationError(
                f"bracket compatibility fails for pair (E_{a + 1}{b + 1}, E_{c + 1}{d + 1}): error {err:.3g}"
            )
    for a, b in itertools.product(range(r), repeat=2):
        err = np.max(np.abs(images[a, b].conj().T - images[b, a]), initial=0.0)
        if err > tol:
            raise RepresentationError(
                f"images of E_{a + 1}{b + 1} and E_{b + 1}{a + 1} are not adjoint: error {err:.3g}"
            )


def explicit_representation(images) -> Representation:
    images = np.asarray(images, dtype=complex)
    if images.ndim == 3:
        r = int(round(math.sqrt(images.shape[0])))
        if r * r != images.shape[0]:
            raise RepresentationError("need r^2 images")
        images = images.reshape(r, r, *images.shape[1:])
    if images.ndim != 4 or images.shape[0] != images.shape[1] or images.shape[2] != images.shape[3]:
        raise RepresentationError("images must have shape (r, r, n, n)")
    check_gl_images(images)
    return Representation("gl", images.shape[0], images.shape[2], images=images, name="explicit")


def named_representation(name: str, r: int) -> Representation:
    if name == "standard":
        return standard_representation(r)
    if name == "adjoint":
        return adjoint_representation(r)
    if name.startswith("sym^"):
        return symmetric_power_representation(r, int(name[4:]))
    raise RepresentationError(f"unknown representation name {name!r}")


@dataclass(frozen=True, eq=False)
class Symplectization:
    """Flat Hermitian metric, standard maximal compact subgroup and central shift tau.

    ``tau`` is a real k-vector for tori and a real scalar (meaning
    ``tau * identity``) for GL(r).
    """

    rep: Representation
    tau: np.ndarray | float

    def __post_init__(self):
        if self.rep.kind == "torus":
            tau = np.asarray(self.tau, dtype=float).reshape(-1)
            if tau.shape != (self.rep.rank,):
                raise ValueError(f"tau must have {self.rep.rank} coordinates")
        else:
            tau = np.asarray(self.tau, dtype=float).reshape(-1)
            if tau.shape != (1,):
                raise ValueError("tau for gl is a single real scalar")
            tau = float(tau[0])
        object.__setattr__(self, "tau", tau)

    @property
    def kind(self) -> GroupKind:
        return self.rep.kind

    def tau_pairing(self, s) -> float:
        """<tau, s> for Hermitian s (real vector for tori)."""
        s = np.asarray(s)
        if self.kind == "torus":
            return float(np.dot(self.tau, s.real)) + 0.0
        return float(self.tau * np.trace(s).real) + 0.0

    def tau_vector(self) -> np.ndarray:
        """tau as a vector on the diagonal torus coordinates."""
        if self.kind == "torus":
            return np.asarray(self.tau, dtype=float)
        return np.full(self.rep.rank, self.tau)
