import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlekit.errors import NotNonnegative, ValidationError
from circlekit.trigpoly import (
    AnalyticPoly,
    TrigPoly,
    cesaro_nonneg_approx,
    eval_trig,
    fejer_riesz_factor,
    fejer_weights,
)


def direct_sum(coeffs, theta):
    """Independent oracle: sum_j c_j e^{i j theta} over a full Laurent vector."""
    n = (len(coeffs) - 1) // 2
    return sum(c * np.exp(1j * j * theta) for j, c in zip(range(-n, n + 1), coeffs))


coeff = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


# evaluation ------------------------------------------------------------------


def test_eval_constant():
    assert eval_trig(TrigPoly([1.0]), 0.7) == pytest.approx(1.0)


def test_eval_two_plus_two_cos_at_zero():
    p = TrigPoly([1, 2, 1])
    assert eval_trig(p, 0.0) == pytest.approx(4.0, abs=1e-14)


def test_eval_single_mode_at_quarter_turn():
    p = TrigPoly.from_dict({1: 1.0})
    assert abs(eval_trig(p, np.pi / 2) - 1j) < 1e-15


@given(st.lists(coeff, min_size=1, max_size=6).map(lambda c: c + c[:-1]), st.floats(-10, 10))
def test_eval_matches_direct_sum(raw, theta):
    c = np.array(raw[: 2 * (len(raw) // 2) + 1])
    p = TrigPoly(c)
    assert abs(p(theta) - direct_sum(c, theta)) <= 1e-12 * (1 + np.abs(c).sum())


@given(st.lists(coeff, min_size=1, max_size=6), st.floats(-10, 10))
def test_real_flag_mirrors_coefficients(half, theta):
    p = TrigPoly(half, real=True)
    full = p.coeffs
    n = p.degree
    assert np.allclose(full[n - np.arange(n + 1)], np.conj(full[n + np.arange(n + 1)]))
    val = p(theta)
    assert abs(np.imag(val)) <= 1e-12 * p.l1
    assert abs(val - direct_sum(full, theta)) <= 1e-12 * (1 + p.l1)


def test_even_length_full_vector_rejected():
    with pytest.raises(ValidationError):
        TrigPoly([1, 2])


def test_from_full_detects_hermitian():
    assert TrigPoly.from_full([1 - 1j, 3, 1 + 1j]).real
    assert not TrigPoly.from_full([1j, 3, 1]).real


@given(st.lists(coeff, min_size=1, max_size=4), st.lists(coeff, min_size=1, max_size=4))
def test_product_matches_pointwise_product(a, b):
    p, q = TrigPoly(a, real=True), TrigPoly(b, real=True)
    theta = np.linspace(0, 2 * np.pi, 17)
    assert np.allclose((p * q)(theta), p(theta) * q(theta), atol=1e-10 * (1 + p.l1 * q.l1))
    assert np.allclose((p + q)(theta), p(theta) + q(theta), atol=1e-12 * (1 + p.l1 + q.l1))


def test_json_round_trip():
    p = TrigPoly([0.5, 1 - 2j, 0.25j], real=True)
    obj = p.to_json()
    assert set(obj) == {"coeffs", "real"}
    assert all(set(e) == {"j", "re", "im"} for e in obj["coeffs"])
    q = TrigPoly.from_json(obj)
    assert q.real and np.array_equal(q.coeffs, p.coeffs)
    g = AnalyticPoly([1, 2j, -3])
    assert np.array_equal(AnalyticPoly.from_json(g.to_json()).coeffs, g.coeffs)


# Fejer-Riesz ----------------------------------------------------------------------


def test_factor_constant():
    g = fejer_riesz_factor(TrigPoly([1.0], real=True))
    assert np.allclose(g.coeffs, [1.0])


def test_factor_one_plus_z():
    g = fejer_riesz_factor(TrigPoly([2.0, 1.0], real=True))
    assert np.allclose(g.coeffs, [1.0, 1.0], atol=1e-12)


def _random_outer(rng, degree):
    # roots outside the closed disk make the factor unique up to phase
    roots = (1.2 + 2 * rng.uniform(size=degree)) * np.exp(2j * np.pi * rng.uniform(size=degree))
    g = np.poly(roots)[::-1]
    return g / np.abs(g).max()


@pytest.mark.parametrize("seed", range(10))
def test_factor_round_trip_recovers_outer_polynomial(seed):
    rng = np.random.default_rng(seed)
    g = _random_outer(rng, 4)
    p = AnalyticPoly(g).abs2()
    h = fejer_riesz_factor(p).coeffs
    phase = np.conj(g[0]) / abs(g[0])
    assert np.max(np.abs(g * phase - h)) <= 1e-8


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_factor_reproduces_polynomial(seed, degree):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    p = AnalyticPoly(g).abs2()
    h = fejer_riesz_factor(p)
    theta = 2 * np.pi * np.arange(1024) / 1024
    err = np.max(np.abs(np.abs(h(np.exp(1j * theta))) ** 2 - np.real(p(theta))))
    assert err <= 1e-8 * p.l1
    assert np.all(np.abs(np.roots(h.coeffs[::-1])) >= 1 - 1e-6) if degree else True


def test_factor_with_double_root_on_circle():
    # |1 - z|^4 has a double root at z = 1
    p = AnalyticPoly([1, -2, 1]).abs2()
    h = fejer_riesz_factor(p)
    assert np.allclose(np.abs(h.coeffs), [1, 2, 1], atol=1e-6)


@pytest.mark.parametrize("gap", [3e-4, 1e-5, 1e-7])
def test_factor_with_root_pair_close_to_circle(gap):
    # the reciprocal pair r, 1/conj(r) must not be mistaken for a double root on the circle
    r = (1 + gap) * np.exp(0.8j)
    g = np.poly([r, 2.5j])[::-1]
    p = AnalyticPoly(g).abs2()
    h = fejer_riesz_factor(p)
    theta = 2 * np.pi * np.arange(1024) / 1024
    assert np.max(np.abs(np.abs(h(np.exp(1j * theta))) ** 2 - np.real(p(theta)))) <= 1e-8 * p.l1
    assert np.all(np.abs(np.roots(h.coeffs[::-1])) >= 1 - 1e-6)


def test_factor_regression_near_circle_random_case():
    rng = np.random.default_rng(6753)
    g = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    p = AnalyticPoly(g).abs2()
    h = fejer_riesz_factor(p)
    theta = 2 * np.pi * np.arange(1024) / 1024
    assert np.max(np.abs(np.abs(h(np.exp(1j * theta))) ** 2 - np.real(p(theta)))) <= 1e-8 * p.l1


def test_factor_rejects_negative_polynomial():
    with pytest.raises(NotNonnegative):
        fejer_riesz_factor(TrigPoly([0.5, 1.0], real=True))  # 0.5 + 2 cos


# Cesaro -----------------------------------------------------------------------------


def test_cesaro_constant_samples():
    p = cesaro_nonneg_approx(np.ones(64), 5)
    assert np.allclose(p.coeffs[p.degree:], [1, 0, 0, 0, 0, 0], atol=1e-14)


@pytest.mark.parametrize("N", [2, 4, 9])
def test_cesaro_taper_of_two_plus_two_cos(N):
    theta = 2 * np.pi * np.arange(256) / 256
    p = cesaro_nonneg_approx(2 + 2 * np.cos(theta), N)
    assert p.coeff(0) == pytest.approx(2.0)
    assert p.coeff(1) == pytest.approx(N / (N + 1.0))
    assert abs(p.coeff(2)) < 1e-14


def test_cesaro_half_circle_indicator_l1():
    M = 4096
    theta = 2 * np.pi * (np.arange(M) + 0.5) / M
    ind = (theta < np.pi).astype(float)
    p = cesaro_nonneg_approx(ind, 64)
    # L1 distance by midpoint quadrature on a finer independent grid
    fine = 2 * np.pi * (np.arange(16 * M) + 0.5) / (16 * M)
    dist = np.mean(np.abs(np.real(p(fine)) - (fine < np.pi)))
    assert dist <= 0.05


@given(st.lists(st.floats(0, 10), min_size=8, max_size=64), st.integers(0, 12))
def test_cesaro_is_nonnegative(samples, N):
    p = cesaro_nonneg_approx(np.array(samples), N)
    theta = 2 * np.pi * np.arange(4096) / 4096
    assert np.real(p(theta)).min() >= -1e-12 * (1 + max(samples))


def test_cesaro_rejects_negative_samples():
    with pytest.raises(NotNonnegative):
        cesaro_nonneg_approx(np.array([1.0, -0.5, 1.0, 1.0]), 1)


def test_fejer_weights():
    assert np.allclose(fejer_weights(3), [0.25, 0.5, 0.75, 1, 0.75, 0.5, 0.25])
