import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from circlekit.errors import NotAbsolutelyContinuous, ValidationError
from circlekit.measure import (
    CircleMeasure,
    Density,
    Piece,
    classical_decompose_oracle,
    combine,
    moments,
    random_measure,
    rn_derivative_oracle,
)
from circlekit.trigpoly import TrigPoly

m = CircleMeasure.lebesgue()
m_plus = CircleMeasure.upper_half()
m_minus = CircleMeasure.lower_half()


def quad_moment(f, n, a=0.0, b=2 * np.pi):
    """Oracle: (1/2pi) int_a^b f(t) e^{-int} dt by adaptive quadrature."""
    re = integrate.quad(lambda t: f(t) * np.cos(n * t), a, b, limit=200, epsabs=1e-13)[0]
    im = integrate.quad(lambda t: -f(t) * np.sin(n * t), a, b, limit=200, epsabs=1e-13)[0]
    return (re + 1j * im) / (2 * np.pi)


def test_moments_of_lebesgue():
    assert np.allclose(np.asarray(moments(m, 2)), [1, 0, 0])


def test_moments_of_atom():
    mu = CircleMeasure.point_mass(0.0, 0.7)
    assert np.allclose(np.asarray(moments(mu, 2)), [0.7, 0.7, 0.7])


def test_moments_of_upper_half():
    ms = moments(m_plus, 1)
    assert ms[0] == pytest.approx(0.5)
    assert ms[1] == pytest.approx(-1j / np.pi, abs=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
def test_arc_piece_moments_match_quadrature(n):
    poly = TrigPoly([1.0, 0.3 - 0.2j, 0.1j], real=True)
    a, b = 0.4, 2.3
    mu = CircleMeasure(Piece(poly, ((a, b),)))
    expected = quad_moment(lambda t: np.real(poly(t)), n, a, b)
    assert abs(moments(mu, n)[n] - expected) < 1e-12


def test_wrapped_arc_moments_match_quadrature():
    mu = CircleMeasure.arc(5.5, 5.5 + 1.5, 2.0)
    # the arc wraps through 0; integrate the two pieces separately
    e2 = 2.0 * (quad_moment(lambda t: 1.0, 3, 5.5, 2 * np.pi) + quad_moment(lambda t: 1.0, 3, 0.0, 7.0 - 2 * np.pi))
    assert abs(moments(mu, 3)[3] - e2) < 1e-13


def test_sampled_density_moments_exact_below_nyquist():
    theta = 2 * np.pi * np.arange(64) / 64
    mu = CircleMeasure.from_samples(2 + 2 * np.cos(theta) + np.sin(3 * theta))
    ms = np.asarray(moments(mu, 4))
    assert np.allclose(ms, [2, 1, 0, -0.5j, 0], atol=1e-14)


def test_combine_examples():
    both = combine(1, m_plus, 1, m_minus)
    assert np.allclose(np.asarray(moments(both, 6)), np.asarray(moments(m, 6)), atol=1e-15)
    mu = CircleMeasure.point_mass(1.0, 0.3)
    assert np.allclose(np.asarray(moments(combine(0, mu, 1, m_plus), 4)), np.asarray(moments(m_plus, 4)))
    assert np.allclose(np.asarray(moments(combine(2, m, 0, m), 3)), [2, 0, 0, 0])


@given(st.integers(0, 2**32 - 1), st.floats(0, 3), st.floats(0, 3))
def test_moment_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    mu, nu = random_measure(rng), random_measure(rng)
    lhs = np.asarray(moments(combine(a, mu, b, nu), 12))
    rhs = a * np.asarray(moments(mu, 12)) + b * np.asarray(moments(nu, 12))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + a * mu.mass + b * nu.mass)


def test_toeplitz_matrices_are_psd():
    rng = np.random.default_rng(1)
    for _ in range(200):
        mu = random_measure(rng)
        T = moments(mu, 32).toeplitz()
        assert np.linalg.eigvalsh(T)[0] >= -1e-10 * mu.mass


def test_toeplitz_entry_convention():
    T = moments(m_plus, 2).toeplitz()
    # entry (i, j) is the moment of index j - i
    assert T[0, 1] == pytest.approx(moments(m_plus, 1)[1])
    assert T[1, 0] == pytest.approx(np.conj(moments(m_plus, 1)[1]))


def test_total_mass_and_atom_merging():
    mu = CircleMeasure(TrigPoly([0.5], real=True), [(0.1, 0.2), (0.1 + 1e-12, 0.3), (2.0, 0.0)])
    assert len(mu.atoms) == 1
    assert mu.atom_weights[0] == pytest.approx(0.5)
    assert mu.mass == pytest.approx(1.0)


def test_json_round_trip_and_format():
    rng = np.random.default_rng(5)
    for _ in range(10):
        mu = random_measure(rng, n_atoms=2)
        obj = json.loads(json.dumps(mu.to_json()))
        assert set(obj) == {"density", "atoms"}
        nu = CircleMeasure.from_json(obj)
        assert np.allclose(np.asarray(moments(nu, 10)), np.asarray(moments(mu, 10)), atol=1e-14)
    obj = m.to_json()
    assert obj["density"]["real"] is True and obj["atoms"] == []
    s = CircleMeasure.from_samples(np.ones(8)).to_json()
    assert s["density"] == {"samples": [1.0] * 8, "grid": 8}


def test_from_json_rejects_negative_density():
    bad = {"density": TrigPoly([0.1, 1.0], real=True).to_json(), "atoms": []}
    with pytest.raises(ValidationError):
        CircleMeasure.from_json(bad)


# oracle ----------------------------------------------------------------------------------


def test_oracle_self():
    ac, s = classical_decompose_oracle(m, m)
    assert ac.mass == pytest.approx(1.0) and s.mass == 0


def test_oracle_half_circles():
    ac, s = classical_decompose_oracle(m_plus, m_minus)
    assert ac.mass == 0
    assert np.allclose(np.asarray(moments(s, 6)), np.asarray(moments(m_plus, 6)))


def test_oracle_mixed():
    mu = 0.5 * m + CircleMeasure.point_mass(np.pi / 2, 0.7)
    ac, s = classical_decompose_oracle(mu, m)
    assert ac.mass == pytest.approx(0.5) and ac.atom_mass == 0
    assert s.atoms == [(pytest.approx(np.pi / 2), pytest.approx(0.7))]


@given(st.integers(0, 2**32 - 1))
def test_oracle_parts_sum_to_measure(seed):
    rng = np.random.default_rng(seed)
    mu, lam = random_measure(rng), random_measure(rng)
    ac, s = classical_decompose_oracle(mu, lam)
    assert np.allclose(np.asarray(moments(ac + s, 10)), np.asarray(moments(mu, 10)), atol=1e-12 * (1 + mu.mass))
    assert ac.atom_mass + s.atom_mass == pytest.approx(mu.atom_mass)


def test_rn_oracle_examples():
    assert rn_derivative_oracle(m, m)(0.3) == pytest.approx(1.0)
    mu = CircleMeasure.from_trig(TrigPoly([2.0, 1.0], real=True))
    f = rn_derivative_oracle(mu, m)
    assert np.allclose(f.poly.coeffs, [1, 2, 1])
    g = rn_derivative_oracle(m_plus, m)
    assert g(1.0) == 1.0 and g(4.0) == 0.0
    with pytest.raises(NotAbsolutelyContinuous):
        rn_derivative_oracle(m_plus, m_minus)


def test_density_requires_real_pieces():
    with pytest.raises(ValidationError):
        Density((Piece(TrigPoly([1j, 1, 0])),))
