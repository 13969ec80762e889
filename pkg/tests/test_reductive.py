import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symplstab import reductive as rd


def _rng(seed=0):
    return np.random.default_rng(seed)


def _random_hermitian(rng, r):
    a = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    return (a + a.conj().T) / 2


def _random_invertible(rng, r):
    return rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r)) + 2 * np.eye(r)


def _strict_lower_unipotent(rng, r):
    u = np.eye(r, dtype=complex)
    for i in range(r):
        for j in range(i):
            u[i, j] = rng.normal() + 1j * rng.normal()
    return u


# classify_hermitian_type

def test_identity_accepted_single_eigenvalue():
    h = rd.hermitian_type(np.eye(2))
    assert np.allclose(h.eigenvalues, [1.0])
    assert len(h.projectors) == 1
    assert np.allclose(h.projectors[0], np.eye(2))


def test_nilpotent_rejected():
    check = rd.classify_hermitian_type(np.array([[0, 1], [0, 0]]))
    assert not check.accepted
    assert "nilpotent" in check.reason


def test_nonreal_spectrum_rejected():
    check = rd.classify_hermitian_type(np.array([[0, -1], [1, 0]]))
    assert not check.accepted
    assert "real" in check.reason


def test_conjugated_diagonal_spectrum_matches_eigensolve():
    rng = _rng(1)
    p = _random_invertible(rng, 2)
    s = p @ np.diag([1.0, 2.0]) @ np.linalg.inv(p)
    h = rd.hermitian_type(s)
    direct = np.sort(np.linalg.eigvals(s).real)
    assert np.allclose(h.eigenvalues, direct, atol=1e-9)
    assert np.allclose(h.eigenvalues, [1.0, 2.0], atol=1e-9)
    assert np.allclose(sum(h.projectors), np.eye(2), atol=1e-9)
    assert np.allclose(sum(e * p for e, p in zip(h.eigenvalues, h.projectors)), s, atol=1e-9)
    assert np.allclose(h.projectors[0] @ h.projectors[1], 0, atol=1e-9)


def test_borderline_spectrum_is_indeterminate():
    s = np.array([[1.0, -1e-8], [1e-8, 1.0]])  # eigenvalues 1 +- 1e-8 i
    check = rd.classify_hermitian_type(s)
    assert check.status == "indeterminate"
    with pytest.raises(rd.NotHermitianTypeError):
        rd.hermitian_type(s)


def test_torus_elements_need_real_coordinates():
    assert rd.classify_hermitian_type(rd.algebra_element(np.array([1.0, -2.0]), "torus")).accepted
    assert not rd.classify_hermitian_type(rd.algebra_element(np.array([1.0, 1j]), "torus")).accepted


# parabolic_triple

def _ad_eigen_dims(s):
    r = s.shape[0]
    ad = np.kron(s, np.eye(r)) - np.kron(np.eye(r), s.T)
    ev = np.linalg.eigvals(ad).real
    return int(np.sum(ev <= 1e-9)), int(np.sum(np.abs(ev) <= 1e-9)), int(np.sum(ev < -1e-9))


def test_parabolic_triple_diag_1_0():
    s = np.diag([1.0, 0.0])
    tri = rd.parabolic_triple(s)
    assert (len(tri.g_alg), len(tri.z_alg), len(tri.u_alg)) == _ad_eigen_dims(s) == (3, 2, 1)
    u = tri.u_alg[0]
    assert np.allclose(u / u[1, 0], [[0, 0], [1, 0]])
    for z in tri.z_alg:
        assert np.allclose(z, np.diag(np.diag(z)))


def test_parabolic_triple_zero():
    tri = rd.parabolic_triple(np.zeros((2, 2)))
    assert len(tri.g_alg) == len(tri.z_alg) == 4
    assert len(tri.u_alg) == 0


def test_parabolic_triple_diag_2_1_0():
    s = np.diag([2.0, 1.0, 0.0])
    tri = rd.parabolic_triple(s)
    assert len(tri.u_alg) == 3 == _ad_eigen_dims(s)[2]


def test_parabolic_triple_decomposes_g():
    rng = _rng(2)
    p = _random_invertible(rng, 3)
    s = p @ np.diag([1.0, 1.0, -2.0]) @ np.linalg.inv(p)
    tri = rd.parabolic_triple(s)
    assert len(tri.g_alg) == len(tri.z_alg) + len(tri.u_alg)
    for x in tri.z_alg:
        assert np.allclose(s @ x - x @ s, 0, atol=1e-8)


# parabolic_member

def test_identity_in_unipotent_radical():
    for s in (np.diag([1.0, 0.0]), np.diag([3.0, 1.0, -1.0]), np.zeros((2, 2))):
        assert rd.parabolic_member(np.eye(s.shape[0]), s).kind == "U"


def test_lower_unipotent_in_U_and_limit_decays():
    s = np.diag([1.0, 0.0])
    g = np.array([[1, 0], [0.7, 1]], dtype=complex)
    assert rd.parabolic_member(g, s).kind == "U"
    entries = [abs(rd.conjugation_limit_sample(g, s, t)[1, 0]) for t in (1, 5, 10)]
    assert np.allclose(entries, 0.7 * np.exp(-np.array([1, 5, 10])), rtol=1e-9)


def test_upper_unipotent_not_in_G():
    s = np.diag([1.0, 0.0])
    g = np.array([[1, 1], [0, 1]], dtype=complex)
    assert rd.parabolic_member(g, s).kind == "neither"
    grow = [abs(rd.conjugation_limit_sample(g, s, t)[0, 1]) for t in (1, 5, 10)]
    assert np.allclose(grow, np.exp([1, 5, 10]), rtol=1e-9)


def test_block_criterion_matches_sampled_limit():
    rng = _rng(3)
    s = np.diag([2.0, 0.0, 0.0])
    for _ in range(20):
        g = _random_invertible(rng, 3)
        if rng.random() < 0.5:
            g[0, 1:] = 0  # block lower: s has eigenvalue 2 on e1, the largest block
        mem = rd.parabolic_member(g, s)
        far = rd.conjugation_limit_sample(g, s, 30.0)
        bounded = np.max(np.abs(far)) < 1e6
        assert (mem.kind != "neither") == bounded
        if bounded:
            assert np.allclose(mem.limit, far, atol=1e-8)


def test_parabolic_member_rejects_singular():
    with pytest.raises(ValueError):
        rd.parabolic_member(np.zeros((2, 2)), np.diag([1.0, 0.0]))


# equiv and find_unipotent

def test_equiv_examples():
    s = np.diag([1.0, 0.0])
    assert rd.equiv(s, s)
    sigma = np.array([[1, 0], [1, 0]], dtype=complex)
    u = np.array([[1, 0], [1, 1]], dtype=complex)
    assert np.allclose(u @ s @ np.linalg.inv(u), sigma)
    assert rd.equiv(s, sigma)
    assert not rd.equiv(s, np.diag([0.0, 1.0]))


def test_find_unipotent_examples():
    s = np.diag([1.0, 0.0])
    assert np.allclose(rd.find_unipotent(s, s), np.eye(2))
    u = rd.find_unipotent(s, np.array([[1, 0], [1, 0]]))
    assert np.allclose(u, [[1, 0], [1, 1]], atol=1e-12)


def test_find_unipotent_round_trip_and_uniqueness():
    rng = _rng(4)
    s = np.diag([2.0, 1.0, 0.0])
    for _ in range(10):
        u = _strict_lower_unipotent(rng, 3)
        sigma = u @ s @ np.linalg.inv(u)
        found = rd.find_unipotent(s, sigma)
        assert np.max(np.abs(found - u)) < 1e-10
        # a perturbation off U(s) no longer transports s to sigma
        bumped = found.copy()
        bumped[0, 1] += 1e-3
        assert np.max(np.abs(bumped @ s @ np.linalg.inv(bumped) - sigma)) > 1e-6


def test_find_unipotent_refuses_inequivalent():
    with pytest.raises(rd.NotEquivalentError):
        rd.find_unipotent(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))


def test_equiv_is_an_equivalence_on_samples():
    rng = _rng(5)
    for _ in range(10):
        s = np.diag(rng.permutation([2.0, 1.0, 1.0, -1.0]))
        perm = np.argsort(-np.diag(s).real, kind="stable")
        p = np.eye(4)[perm]
        u1 = p.T @ _strict_lower_unipotent(rng, 4) @ p
        u2 = p.T @ _strict_lower_unipotent(rng, 4) @ p
        a = u1 @ s @ np.linalg.inv(u1)
        b = u2 @ a @ np.linalg.inv(u2)
        assert rd.equiv(s, a)
        assert rd.equiv(a, b)
        assert rd.equiv(s, b)
        fa, fs = rd.flag_class(a), rd.flag_class(s)
        assert all(rd.same_subspace(x, y) for x, y in zip(fa.subspaces, fs.subspaces))


# retract_to_compact and flag_class

def test_retract_fixes_hermitian():
    rng = _rng(6)
    h = _random_hermitian(rng, 3)
    assert np.allclose(rd.retract_to_compact(h).matrix, h, atol=1e-10)


def test_retract_example():
    s = np.array([[1, 1], [0, 0]], dtype=complex)
    out = rd.retract_to_compact(s).matrix
    assert np.allclose(out, 0.5 * np.ones((2, 2)), atol=1e-12)
    assert rd.equiv(s, out)


def test_retract_of_unipotent_conjugate():
    rng = _rng(7)
    s = np.diag([1.0, 0.0])
    u = _strict_lower_unipotent(rng, 2)
    x = u @ s @ np.linalg.inv(u)
    out = rd.retract_to_compact(x)
    assert rd.equiv(x, out.matrix)
    assert np.allclose(out.eigenvalues, [0.0, 1.0], atol=1e-10)
    assert out.is_hermitian


def test_flag_class_examples():
    f = rd.flag_class(np.eye(2))
    assert len(f.subspaces) == 1 and np.allclose(f.weights, [1.0])
    f = rd.flag_class(np.array([[1, 1], [0, 0]]))
    assert np.allclose(f.weights, [0.0, 1.0])
    assert rd.same_subspace(f.subspaces[0], np.array([[1], [-1]]) / np.sqrt(2))
    assert f.subspaces[1].shape[1] == 2


def test_flag_class_agrees_with_retraction():
    s = np.array([[1, 1], [0, 0]], dtype=complex)
    a, b = rd.flag_class(s), rd.flag_class(rd.retract_to_compact(s).matrix)
    assert np.allclose(a.weights, b.weights)
    assert all(rd.same_subspace(x, y) for x, y in zip(a.subspaces, b.subspaces))


def test_flag_class_rejects_torus():
    with pytest.raises(ValueError):
        rd.flag_class(rd.algebra_element(np.array([1.0, 2.0]), "torus"))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_retraction_soundness(seed, r):
    rng = _rng(seed)
    eig = rng.integers(-2, 3, size=r).astype(float)
    p = _random_invertible(rng, r)
    s = p @ np.diag(eig) @ np.linalg.inv(p)
    out = rd.retract_to_compact(s)
    assert out.is_hermitian
    assert rd.equiv(s, out.matrix)
    assert np.allclose(rd.retract_to_compact(out.matrix).matrix, out.matrix, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_compact_orbit_projection(seed, r):
    rng = _rng(seed)
    s = np.diag(rng.integers(-2, 3, size=r).astype(float))
    g = _random_invertible(rng, r)
    out = rd.retract_to_compact(g @ s @ np.linalg.inv(g)).matrix
    assert np.allclose(np.sort(np.linalg.eigvalsh(out)), np.sort(np.diag(s)), atol=1e-8)
    assert rd.unitary_similar(out, s)


def test_embedding_preserves_equivalence():
    rng = _rng(8)

    def embed(x):
        out = np.zeros((3, 3), dtype=complex)
        out[:2, :2] = x
        return out

    s = np.diag([1.0, 0.0])
    for _ in range(10):
        u = _strict_lower_unipotent(rng, 2)
        a = u @ s @ np.linalg.inv(u)
        b = np.diag([0.0, 1.0]) if rng.random() < 0.5 else a
        assert rd.equiv(a, b) == rd.equiv(embed(a), embed(b))


# polar decomposition and centralizers

def test_polar_unitary_and_diagonal():
    rng = _rng(9)
    q, _ = np.linalg.qr(_random_invertible(rng, 3))
    pp = rd.polar_decompose(q)
    assert np.allclose(pp.h_part, np.eye(3), atol=1e-10)
    pp = rd.polar_decompose(np.diag([2.0, 3.0]))
    assert np.allclose(pp.k_part, np.eye(2)) and np.allclose(pp.h_part, np.diag([2.0, 3.0]))


def test_polar_reconstruction_and_fixed_point():
    rng = _rng(10)
    for _ in range(20):
        r = int(rng.integers(2, 5))
        g = _random_invertible(rng, r)
        pp = rd.polar_decompose(g)
        assert np.max(np.abs(pp.k_part @ pp.h_part - g)) < 1e-10
        assert np.allclose(pp.k_part.conj().T @ pp.k_part, np.eye(r), atol=1e-10)
        # build g with ad_g(s) Hermitian: g = k exp(a) with [a, s] = 0
        s = np.diag(rng.permutation(np.arange(r, dtype=float)) // 2)
        a = np.diag(rng.normal(size=r))
        for i in range(r):
            for j in range(r):
                if s[i, i] == s[j, j] and i != j:
                    a[i, j] = a[j, i] = rng.normal()
        k, _ = np.linalg.qr(_random_invertible(rng, r))
        g = k @ np.linalg.matrix_power(np.eye(r) + a / 64, 64)
        assert np.allclose(rd.adjoint(g, s), rd.adjoint(g, s).conj().T, atol=1e-8)
        h = rd.polar_decompose(g).h_part
        assert np.linalg.norm(rd.adjoint(h, s) - s) <= 1e-8 * max(np.linalg.norm(s), 1.0)


def test_polar_rejects_singular():
    with pytest.raises(ValueError):
        rd.polar_decompose(np.zeros((2, 2)))


def test_centralizer_examples():
    assert len(rd.centralizer_algebra([], 2)) == 4
    basis = rd.centralizer_algebra([np.diag([1.0, 0.0])], 2)
    assert len(basis) == 2
    for b in basis:
        assert np.allclose(b, np.diag(np.diag(b)), atol=1e-12)
    units = [np.eye(2)[:, [i]] @ np.eye(2)[[j], :] for i in range(2) for j in range(2)]
    center = rd.centralizer_algebra(units, 2)
    assert len(center) == 1
    assert np.allclose(center[0] / center[0][0, 0], np.eye(2))


def test_centralizer_compact_form():
    basis = rd.centralizer_algebra([np.diag([1.0, 0.0])], 2, ambient="compact")
    assert len(basis) == 2
    for b in basis:
        assert np.allclose(b.conj().T, -b, atol=1e-12)
