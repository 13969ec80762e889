"""Seeded random (representation, tau, point, direction) samples shared by the tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from symplstab.representation import (
    Symplectization,
    adjoint_representation,
    standard_representation,
    symmetric_power_representation,
    torus_representation,
)

GL_REPS = (
    lambda: standard_representation(2),
    lambda: standard_representation(3),
    lambda: symmetric_power_representation(2, 2),
    lambda: symmetric_power_representation(3, 2),
    lambda: adjoint_representation(2),
)


@dataclass
class Sample:
    sympl: Symplectization
    v: np.ndarray
    s: np.ndarray

    @property
    def rep(self):
        return self.sympl.rep


def random_hermitian(rng, r, scale=1.0):
    a = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    return scale * (a + a.conj().T) / 2


def random_invertible(rng, r, scale=0.3):
    return linalg.expm(scale * (rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))))


def random_point(rng, n):
    return (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)


def _direction(rng, rep):
    if rep.kind == "torus":
        return rng.normal(size=rep.rank)
    return random_hermitian(rng, rep.rank, 0.5)


def _rates(rep, s):
    if rep.kind == "torus":
        return rep.weights @ s
    return np.linalg.eigvalsh(rep.sigma(s))


def random_sample(rng, kind=None, min_rate=0.0):
    """One (sympl, v, s); rates of sigma(s) are either 0 or at least min_rate in size."""
    kind = kind or ("torus" if rng.random() < 0.5 else "gl")
    if kind == "torus":
        k = int(rng.integers(1, 4))
        n = int(rng.integers(1, 7))
        rep = torus_representation(rng.integers(-3, 4, size=(n, k)))
        tau = rng.choice([-1.0, 0.0, 1.0], size=k)
    else:
        rep = GL_REPS[int(rng.integers(len(GL_REPS)))]()
        tau = float(rng.choice([-1.0, 0.0, 1.0]))
    sympl = Symplectization(rep, tau)
    while True:
        s = _direction(rng, rep)
        rates = np.abs(_rates(rep, s))
        if np.all((rates < 1e-12) | (rates >= min_rate)):
            break
    return Sample(sympl, random_point(rng, rep.dim), s)


def finite_energy_point(rng, rep, s):
    """A point whose components along positive eigenvalues of sigma(s) vanish."""
    if rep.kind == "torus":
        rates = rep.weights @ s
        v = random_point(rng, rep.dim)
        v[rates > 0] = 0
        return v
    vals, vecs = np.linalg.eigh(rep.sigma(s))
    keep = vecs[:, vals <= 1e-12]
    return keep @ random_point(rng, keep.shape[1])


def samples(seed, count, kind=None, min_rate=0.0):
    rng = np.random.default_rng(seed)
    return [random_sample(rng, kind, min_rate) for _ in range(count)]
