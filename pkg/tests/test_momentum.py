import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, linalg

from samples import finite_energy_point, random_hermitian, random_invertible, samples
from symplstab import momentum as mm
from symplstab import reductive as rd
from symplstab.representation import (
    Symplectization,
    standard_representation,
    symmetric_power_representation,
    torus_representation,
)

PM = torus_representation([[1], [-1]])
PM0 = Symplectization(PM, [0.0])


def test_tau_sign_is_calibrated():
    assert mm.calibrate_tau_sign() == mm.TAU_SIGN


# infinitesimal_action and act

def test_infinitesimal_action_examples():
    assert np.allclose(mm.infinitesimal_action(PM, [0.0], [1, 1]), 0)
    assert np.allclose(mm.infinitesimal_action(PM, [1.0], [1, 1]), [1, -1])
    std = standard_representation(2)
    assert np.allclose(mm.infinitesimal_action(std, np.diag([1.0, 0.0]), [2 + 1j, 3]), [2 + 1j, 0])


def test_infinitesimal_action_shape_mismatch():
    with pytest.raises(ValueError):
        mm.infinitesimal_action(PM, [1.0], [1, 1, 1])


def test_act_examples():
    assert np.allclose(mm.act(PM, [1.0], 0.0, [1, 1]), [1, 1])
    assert np.allclose(mm.act(PM, [1.0], np.log(2), [1, 1]), [2, 0.5])


def test_act_gl_matches_expm():
    rng = np.random.default_rng(0)
    for smp in samples(1, 20, kind="gl"):
        s = smp.s
        if rng.random() < 0.5:
            s = s + 0.3j * random_hermitian(rng, smp.rep.rank)  # non-Hermitian path
        t = float(rng.uniform(-1, 1))
        expect = linalg.expm(t * smp.rep.sigma(s)) @ smp.v
        assert np.allclose(mm.act(smp.rep, s, t, smp.v), expect, atol=1e-9)


def test_act_overflow_is_inf_not_error():
    out = mm.act(PM, [1.0], 1e4, [1, 1])
    assert np.isinf(abs(out[0]))
    out = mm.act(PM, [1.0], 1e4, [0, 1])
    assert out[0] == 0 and out[1] == 0


# moment_pairing, moment_vector

def test_moment_pairing_examples():
    assert mm.moment_pairing(PM0, [1.0], [1, 1]) == 0
    assert mm.moment_pairing(PM0, [1.0], [1, 0]) == pytest.approx(0.5)
    assert mm.moment_pairing(PM0, [2.7], [0, 0]) == 0


def test_moment_pairing_rejects_nonhermitian():
    with pytest.raises(ValueError):
        mm.moment_pairing(Symplectization(standard_representation(2), 0.0), [[0, 1], [0, 0]], [1, 0])


def test_moment_pairing_is_derivative_of_psi():
    for smp in samples(2, 20):
        h = 1e-5
        fd = (mm.kempf_ness(smp.sympl, smp.s, h, smp.v) - mm.kempf_ness(smp.sympl, smp.s, -h, smp.v)) / (2 * h)
        assert fd == pytest.approx(mm.moment_pairing(smp.sympl, smp.s, smp.v), rel=1e-6, abs=1e-8)


def test_moment_vector_examples():
    assert np.allclose(mm.moment_vector(PM0, [1, 1]), 0)
    assert mm.moment_norm(PM0, [0, 0]) == 0
    v = np.array([2.0, 1.0])
    assert np.allclose(mm.moment_vector(PM0, v), [0.5 * (4 - 1)])


def test_moment_vector_represents_pairing():
    rng = np.random.default_rng(3)
    for smp in samples(3, 30):
        m = mm.moment_vector(smp.sympl, smp.v)
        s = smp.s if smp.rep.kind == "torus" else random_hermitian(rng, smp.rep.rank)
        inner = float(np.dot(m, s)) if smp.rep.kind == "torus" else float(np.trace(m.conj().T @ s).real)
        assert inner == pytest.approx(mm.moment_pairing(smp.sympl, s, smp.v), abs=1e-10)


def test_moment_commutes_with_stabilizer():
    rep = symmetric_power_representation(2, 2)
    sympl = Symplectization(rep, -1.0)
    rng = np.random.default_rng(4)
    for v in ([0, 1, 0], [1, 0, 1], [1, 0, 0], rng.normal(size=3)):
        m = mm.moment_vector(sympl, v)
        for b in mm.stabilizer_algebra(rep, v).k_basis:
            assert np.linalg.norm(m @ b - b @ m) <= 1e-8


# maximal_weight, energy, limit_point

def test_maximal_weight_examples():
    assert mm.maximal_weight(PM0, [0.0], [1, 1]) == 0
    assert mm.maximal_weight(PM0, [1.0], [1, 1]) == np.inf
    growth = [mm.lambda_curve(PM0, [1.0], [1, 1], t) for t in range(1, 11)]
    assert np.all(np.diff(growth) > 0) and growth[-1] > 1e8
    assert mm.maximal_weight(PM0, [-1.0], [1, 0]) == 0
    curve = [mm.lambda_curve(PM0, [-1.0], [1, 0], t) for t in range(0, 30)]
    assert np.all(np.diff(curve) > 0) and abs(curve[-1]) < 1e-20


def test_maximal_weight_indeterminate_band():
    with pytest.raises(mm.IndeterminateSupportError):
        mm.maximal_weight(PM0, [1.0], [1e-10, 1])
    assert mm.maximal_weight(PM0, [1.0], [1e-13, 1]) == 0
    assert mm.maximal_weight(PM0, [1.0], [1e-8, 1]) == np.inf


def test_semicontinuity_on_collapsing_support():
    # lambda at the limit never exceeds the liminf along a sequence that loses support
    for s, seq, lim in (([1.0], lambda n: [1 / n, 1], [0, 1]),
                        ([-1.0], lambda n: [1, 2 ** -n], [1, 0])):
        tail = [mm.maximal_weight(PM0, s, seq(n)) for n in range(1, 30)]
        assert mm.maximal_weight(PM0, s, lim) <= min(tail)
    # a sequence inside one support keeps the value
    sympl = Symplectization(torus_representation([[1, 0], [-1, 1]]), [1.0, -1.0])
    s = np.array([-1.0, -2.0])
    vals = [mm.maximal_weight(sympl, s, [1 + 1 / n, 2]) for n in range(1, 10)]
    assert np.allclose(vals, mm.maximal_weight(sympl, s, [1, 2]))


def test_energy_examples():
    assert mm.energy(PM0, [0.0], [1, 1]) == 0
    assert mm.energy(PM0, [-1.0], [1, 0]) == pytest.approx(0.5)
    quad, _ = integrate.quad(lambda t: np.exp(-2 * t), 0, np.inf)
    assert mm.energy(PM0, [-1.0], [1, 0]) == pytest.approx(quad)
    assert mm.energy(PM0, [1.0], [1, 1]) == np.inf


def test_energy_identity():
    rng = np.random.default_rng(5)
    for smp in samples(5, 30):
        v = finite_energy_point(rng, smp.rep, smp.s)
        lam = mm.maximal_weight(smp.sympl, smp.s, v)
        assert mm.energy(smp.sympl, smp.s, v) == pytest.approx(lam - mm.moment_pairing(smp.sympl, smp.s, v),
                                                              abs=1e-10)


def test_limit_point_examples():
    assert np.allclose(mm.limit_point(PM0, [0.0], [1, 2]), [1, 2])
    assert np.allclose(mm.limit_point(PM0, [-1.0], [1, 0]), [0, 0])
    rep = torus_representation([[1], [0]])
    sympl = Symplectization(rep, [0.0])
    lim = mm.limit_point(sympl, [-1.0], [1, 1])
    assert np.allclose(lim, [0, 1])
    assert np.allclose(mm.act(rep, [-1.0], 30.0, [1, 1]), lim, atol=1e-12)
    assert mm.limit_point(PM0, [1.0], [1, 1]) is None


def test_limit_point_gl_matches_long_flow():
    rng = np.random.default_rng(6)
    for smp in samples(6, 20, kind="gl", min_rate=0.2):
        v = finite_energy_point(rng, smp.rep, smp.s)
        lim = mm.limit_point(smp.sympl, smp.s, v)
        vals, vecs = np.linalg.eigh(smp.rep.sigma(smp.s))
        kernel = vecs[:, np.abs(vals) < 1e-9]
        assert np.allclose(lim, kernel @ (kernel.conj().T @ v), atol=1e-12)
        gaps = [np.linalg.norm(mm.act(smp.rep, smp.s, t, v) - lim) for t in (2.0, 4.0, 8.0)]
        assert gaps[2] <= gaps[1] * np.exp(-0.2 * 4) + 1e-12
        assert gaps[1] <= gaps[0] * np.exp(-0.2 * 2) + 1e-12


# kempf_ness

def test_kempf_ness_examples():
    assert mm.kempf_ness(PM0, [1.0], 0.0, [1, 1]) == 0
    for t in (0.3, 1.0, 2.0):
        expect = 0.25 * (np.exp(2 * t) - 1) + 0.25 * (np.exp(-2 * t) - 1)
        assert mm.kempf_ness(PM0, [1.0], t, [1, 1]) == pytest.approx(expect, rel=1e-12)
        quad, _ = integrate.quad(lambda u: mm.moment_pairing(PM0, [1.0], mm.act(PM, [1.0], u, [1, 1])), 0, t)
        assert mm.kempf_ness(PM0, [1.0], t, [1, 1]) == pytest.approx(quad, rel=1e-9)


def test_kempf_ness_vanishes_on_unitary_group():
    rng = np.random.default_rng(7)
    for smp in samples(7, 20, kind="gl"):
        k, _ = np.linalg.qr(random_invertible(rng, smp.rep.rank, 1.0))
        assert mm.kempf_ness_group(smp.sympl, k, smp.v) == pytest.approx(0, abs=1e-10)
    torus = Symplectization(torus_representation([[1, 2], [-1, 0]]), [1.0, -1.0])
    assert mm.kempf_ness_group(torus, np.exp(1j * np.array([0.3, 2.0])), [1, 1]) == pytest.approx(0, abs=1e-14)


def test_kempf_ness_group_identity():
    smp = samples(8, 1, kind="gl")[0]
    assert mm.kempf_ness_group(smp.sympl, np.eye(smp.rep.rank), smp.v) == pytest.approx(0, abs=1e-12)


def test_cocycle_identity():
    rng = np.random.default_rng(9)
    for smp in samples(9, 30):
        r = smp.rep.rank
        if smp.rep.kind == "torus":
            g = np.exp(rng.normal(size=r) * 0.5 + 1j * rng.normal(size=r))
            h = np.exp(rng.normal(size=r) * 0.5 + 1j * rng.normal(size=r))
            gh = g * h
        else:
            g, h = random_invertible(rng, r), random_invertible(rng, r)
            gh = g @ h
        hv = smp.rep.rho(h) @ smp.v
        lhs = mm.kempf_ness_group(smp.sympl, gh, smp.v)
        rhs = mm.kempf_ness_group(smp.sympl, h, smp.v) + mm.kempf_ness_group(smp.sympl, g, hv)
        assert lhs == pytest.approx(rhs, abs=1e-8)


def test_potential_reproduces_psi():
    rng = np.random.default_rng(10)
    for smp in samples(10, 30):
        r = smp.rep.rank
        if smp.rep.kind == "torus":
            g = np.exp(rng.normal(size=r) * 0.5 + 1j * rng.normal(size=r))
        else:
            g = random_invertible(rng, r)
        assert mm.kempf_ness_potential(smp.sympl, g, smp.v) == pytest.approx(
            mm.kempf_ness_group(smp.sympl, g, smp.v), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_psi_convex_along_rays(seed):
    smp = samples(seed, 1)[0]
    ts = np.linspace(-1.5, 1.5, 13)
    vals = np.array([mm.kempf_ness(smp.sympl, smp.s, t, smp.v) for t in ts])
    assert np.all(vals[:-2] - 2 * vals[1:-1] + vals[2:] >= -1e-8 * max(1.0, np.max(np.abs(vals))))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_lambda_curve_nondecreasing(seed):
    smp = samples(seed, 1)[0]
    vals = [mm.lambda_curve(smp.sympl, smp.s, smp.v, t) for t in np.linspace(-2, 2, 21)]
    assert np.all(np.diff(vals) >= -1e-10 * max(1.0, max(abs(x) for x in vals)))


def test_critical_point_iff_moment_zero():
    zero = np.array([1.0, 1.0])
    for v, crit in ((zero, True), (np.array([2.0, 1.0]), False)):
        h = 1e-6
        d = (mm.kempf_ness(PM0, [1.0], h, v) - mm.kempf_ness(PM0, [1.0], -h, v)) / (2 * h)
        assert (abs(d) <= 1e-8) == crit == (mm.moment_norm(PM0, v) <= 1e-9)
    sympl = Symplectization(symmetric_power_representation(2, 2), -1.0)
    xy = np.array([0.0, np.sqrt(2), 0.0])  # |xy|^2 chosen so the moment vanishes
    assert mm.moment_norm(sympl, xy) <= 1e-12
    for b in rd.hermitian_basis(2):
        h = 1e-6
        d = (mm.kempf_ness(sympl, b, h, xy) - mm.kempf_ness(sympl, b, -h, xy)) / (2 * h)
        assert abs(d) <= 1e-8


# stabilizer_algebra

def test_stabilizer_examples():
    data = mm.stabilizer_algebra(PM, [0, 0])
    assert data.dim == 1 and data.reductive
    data = mm.stabilizer_algebra(PM, [1, 1])
    assert data.dim == 0 and data.reductive
    std = standard_representation(2)
    data = mm.stabilizer_algebra(std, [1, 0])
    assert data.dim == 2 and not data.reductive
    span = np.stack([b.reshape(-1) for b in data.g_basis], axis=1)
    target = np.stack([np.array([[0, 1], [0, 0]]).reshape(-1), np.array([[0, 0], [0, 1]]).reshape(-1)], axis=1)
    assert np.linalg.matrix_rank(np.hstack([span, target]), tol=1e-10) == 2
    assert len(mm.stabilizer_algebra(std, [0, 0]).g_basis) == 4


def test_moment_zero_points_have_reductive_stabilizers():
    sympl = Symplectization(symmetric_power_representation(2, 2), -1.0)
    rng = np.random.default_rng(11)
    for _ in range(10):
        k, _ = np.linalg.qr(random_invertible(rng, 2, 1.0))
        v = sympl.rep.rho(k) @ np.array([0.0, np.sqrt(2), 0.0])
        assert mm.moment_norm(sympl, v) <= 1e-10
        assert mm.stabilizer_algebra(sympl.rep, v).reductive
