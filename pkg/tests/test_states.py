import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussian_channels.exceptions import InvalidTemperature, NotPSD, StructuralError
from gaussian_channels.states import (
    GaussianState,
    char_fn,
    displacement,
    gu_action,
    is_admissible_cov,
    random_state,
    thermal,
    vacuum,
)
from gaussian_channels.symplectic import GaussianUnitary, gu_compose, random_orthosymplectic
from oracles import admissible, j_matrix, oracle_symplectic


@pytest.mark.parametrize(
    "s, ok, min_eig",
    [
        (np.eye(2), True, 0.0),
        (np.diag([4.0, 0.25]), True, 0.0),
        (0.5 * np.eye(2), False, -0.5),
    ],
)
def test_is_admissible_cov_fixtures(s, ok, min_eig):
    got, m = is_admissible_cov(s, [1])
    assert got is ok or got == ok
    assert m == pytest.approx(min_eig, abs=1e-12)


def test_is_admissible_cov_errors():
    with pytest.raises(StructuralError):
        is_admissible_cov(np.array([[1.0, 1.0], [0.0, 1.0]]), [1])
    with pytest.raises(StructuralError):
        is_admissible_cov(np.eye(4), [1])


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.05, 20), st.floats(-3, 3))
def test_admissibility_matches_oracle(a, b, c):
    s = np.array([[a, c], [c, b]])
    if np.linalg.eigvalsh(s)[0] <= 0:
        return
    ok, _ = is_admissible_cov(s, [1])
    # single mode: S + iJ >= 0 iff S > 0 and det S >= 1
    assert ok == (np.linalg.det(s) >= 1 - 1e-9 * max(1, np.linalg.norm(s, 2)))
    assert ok == admissible(s)


def test_state_rejects_inadmissible_and_is_frozen():
    with pytest.raises(NotPSD):
        GaussianState(np.zeros(2), 0.5 * np.eye(2))
    st_ = vacuum([1])
    with pytest.raises(ValueError):
        st_.cov[0, 0] = 2.0
    with pytest.raises(StructuralError):
        GaussianState(np.zeros(3), np.eye(2))


def test_admissible_covariances_are_psd(rng):
    for i in range(200):
        s = random_state([1 + i % 4], rng).cov
        assert np.linalg.eigvalsh(s)[0] >= -1e-9


def test_char_fn_fixtures(rng):
    st_ = vacuum([2])
    assert char_fn(st_, np.zeros(4)) == (1.0, 0.0)
    z = rng.standard_normal(4)
    mod, ph = char_fn(st_, z)
    assert mod == pytest.approx(np.exp(-0.5 * z @ z))
    assert ph == 0.0


def test_char_fn_matches_complex_formula(rng):
    for _ in range(50):
        st_ = random_state([2], rng)
        z = rng.standard_normal(4)
        mod, ph = char_fn(st_, z)
        direct = np.exp(-1j * st_.mean @ z - 0.5 * z @ st_.cov @ z)
        assert mod * np.exp(1j * ph) == pytest.approx(direct, rel=1e-12)
        mod2, ph2 = char_fn(st_, -z)
        prod = mod * mod2 * np.exp(1j * (ph + ph2))
        assert prod.imag == pytest.approx(0.0, abs=1e-12)
        assert prod.real == pytest.approx(mod**2, rel=1e-12)


def test_char_fn_mean_shift(rng):
    st_ = random_state([1], rng)
    shift = rng.standard_normal(2)
    moved = GaussianState(st_.mean + shift, st_.cov)
    z = rng.standard_normal(2)
    (m0, p0), (m1, p1) = char_fn(st_, z), char_fn(moved, z)
    assert m1 == pytest.approx(m0)
    assert p1 - p0 == pytest.approx(-shift @ z)


def test_gu_action_fixtures(rng):
    st_ = random_state([2], rng)
    out = gu_action(GaussianUnitary.identity([2]), st_)
    np.testing.assert_allclose(out.mean, st_.mean)
    np.testing.assert_allclose(out.cov, st_.cov)
    u = rng.standard_normal(2)
    shifted = gu_action(displacement(u), vacuum([1]))
    np.testing.assert_allclose(shifted.mean, 2 * j_matrix(1) @ u)
    np.testing.assert_allclose(shifted.cov, np.eye(2))
    l = random_orthosymplectic([2], rng)
    out = gu_action(GaussianUnitary(np.zeros(4), l), st_)
    np.testing.assert_allclose(out.cov, l @ st_.cov @ l.T, atol=1e-12)


def test_gu_action_matches_dense_inverse(rng):
    for _ in range(500):
        d = int(rng.integers(1, 4))
        l = oracle_symplectic(rng, j_matrix(d))
        g = GaussianUnitary(rng.standard_normal(2 * d), l)
        st_ = random_state([d], rng)
        out = gu_action(g, st_)
        li = np.linalg.inv(l)
        np.testing.assert_allclose(out.cov, li.T @ st_.cov @ li, rtol=1e-8, atol=1e-8)
        np.testing.assert_allclose(out.mean, li.T @ st_.mean + 2 * j_matrix(d) @ g.u, rtol=1e-8, atol=1e-8)
        assert is_admissible_cov(out.cov, [d])[0]


def test_gu_action_is_group_action(rng):
    for _ in range(50):
        g1 = GaussianUnitary(rng.standard_normal(4), oracle_symplectic(rng, j_matrix(2)))
        g2 = GaussianUnitary(rng.standard_normal(4), oracle_symplectic(rng, j_matrix(2)))
        st_ = random_state([2], rng)
        seq = gu_action(g1, gu_action(g2, st_))
        one = gu_action(gu_compose(g1, g2), st_)
        np.testing.assert_allclose(seq.mean, one.mean, atol=1e-9, rtol=1e-9)
        np.testing.assert_allclose(seq.cov, one.cov, atol=1e-9, rtol=1e-9)


def test_gu_action_form_mismatch():
    with pytest.raises(StructuralError):
        gu_action(GaussianUnitary.identity([1, 1]), vacuum([2]))


def test_vacuum_and_thermal():
    v = vacuum([1])
    np.testing.assert_array_equal(v.cov, np.eye(2))
    np.testing.assert_array_equal(v.mean, np.zeros(2))
    t1 = thermal([1], [1.0])
    np.testing.assert_array_equal(t1.cov, v.cov)
    t2 = thermal([1], [2.0])
    assert is_admissible_cov(t2.cov, [1])[1] == pytest.approx(1.0)
    np.testing.assert_array_equal(thermal([2], [2.0, 3.0]).cov, np.diag([2.0, 3.0, 2.0, 3.0]))
    with pytest.raises(InvalidTemperature):
        thermal([1], [0.5])
    with pytest.raises(StructuralError):
        thermal([2], [1.0])


def test_random_state_contract():
    a, b = random_state([2], seed=5), random_state([2], seed=5)
    np.testing.assert_array_equal(a.cov, b.cov)
    np.testing.assert_array_equal(a.mean, b.mean)
    for seed in range(1000):
        s = random_state([1 + seed % 3], seed=seed)
        assert admissible(s.cov)
    pure = random_state([2], seed=1, pure=True)
    assert is_admissible_cov(pure.cov, [2])[1] == pytest.approx(0.0, abs=1e-9)
