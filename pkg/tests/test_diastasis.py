import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kahler_entropy import (
    MetricSpec,
    diastasis_eval,
    hyperbolic_closed_forms,
    hyperbolic_spec,
    metric_tensor,
    polarize_radial,
    radial_distance,
)
from kahler_entropy import diastasis as dia
from kahler_entropy import numdiff
from kahler_entropy.errors import DomainError

from conftest import ball_points

LOG_4_3 = 0.2876820724517809


def test_kernel_log_series_oracle(kernel1):
    # independent partial-sum oracle for the polarized log term
    p = 0.125
    partial = sum(p**k / k for k in range(1, 200))
    val = complex(dia.kernel_value(kernel1, p)).real
    assert val == pytest.approx(partial, abs=1e-15)
    assert val == pytest.approx(0.13353139262452263, abs=1e-14)


def test_kernel_trivial_values(kernel1):
    assert complex(dia.kernel_value(kernel1, 0.0)) == 0.0
    spec = MetricSpec(name="lin", dim=1, alpha=1.0, poly=(0.5,))
    k = polarize_radial(spec)
    for p in (0.1, -0.3, 0.7):
        assert complex(dia.kernel_value(k, p)).real == pytest.approx(
            -math.log(1 - p) + 0.5 * p, rel=1e-14
        )


def test_kernel_coefficients(perturbed_03):
    k = polarize_radial(perturbed_03.scaled(2.0))
    assert k.log_coeff == pytest.approx(2.0)
    assert k.coeffs == pytest.approx((0.6,))
    assert k.truncation > 100


def test_kernel_series_matches_closed_form(kernel1):
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        closed = complex(dia.kernel_value(kernel1, p))
        series = complex(dia.kernel_series_value(kernel1, p))
        assert abs(closed - series) < 1e-10 * max(1.0, abs(closed))


def test_kernel_diagonal_equals_potential(kernel2):
    from kahler_entropy import specs

    for r in np.linspace(0.05, 0.95, 19):
        t = r * r
        diag = complex(dia.kernel_value(kernel2, t)).real
        pot = float(specs.potential_radial(kernel2.spec, t))
        assert diag == pytest.approx(pot, rel=1e-10)


def test_kernel_hermitian_pair_symmetry(kernel1):
    rng = np.random.default_rng(5)
    for _ in range(30):
        p = rng.uniform(0, 0.95) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        assert abs(
            complex(dia.kernel_value(kernel1, np.conj(p)))
            - np.conj(complex(dia.kernel_value(kernel1, p)))
        ) < 1e-12


def test_diastasis_examples(kernel1):
    assert diastasis_eval(kernel1, [0.5], [0.5]) == 0.0
    assert diastasis_eval(kernel1, [0.5], [0.0]) == pytest.approx(LOG_4_3, abs=1e-14)
    assert diastasis_eval(kernel1, [0.5], [0.25]) == pytest.approx(
        0.08515780834030683, abs=1e-14
    )


@given(
    rz=st.floats(0.0, 0.85),
    rw=st.floats(0.0, 0.85),
    pz=st.floats(0.0, 2.0 * math.pi),
    pw=st.floats(0.0, 2.0 * math.pi),
)
def test_diastasis_symmetry_and_zero_diagonal(rz, rw, pz, pw):
    spec = hyperbolic_spec(1)
    k = polarize_radial(spec)
    z = [rz * np.exp(1j * pz)]
    w = [rw * np.exp(1j * pw)]
    assert diastasis_eval(k, z, w) == pytest.approx(diastasis_eval(k, w, z), abs=1e-12)
    assert abs(diastasis_eval(k, z, z)) < 1e-12


def test_closed_forms_examples():
    assert hyperbolic_closed_forms([0.3 + 0.1j], [0.3 + 0.1j]) == (0.0, 0.0)
    d, rho = hyperbolic_closed_forms([0.5], [0.0])
    assert d == pytest.approx(LOG_4_3, abs=1e-14)
    assert rho == pytest.approx(math.atanh(0.5), abs=1e-14)
    # consistency of the distance identity: D = 2 log cosh rho
    assert 2.0 * math.log(math.cosh(rho)) == pytest.approx(d, abs=1e-14)
    d2, _ = hyperbolic_closed_forms([0.3, 0.4], [0.0, 0.0])
    assert d2 == pytest.approx(-math.log(0.75), abs=1e-14)


def test_closed_form_nonnegative():
    rng = np.random.default_rng(17)
    for z, w in zip(ball_points(rng, 2, 0.95, 50), ball_points(rng, 2, 0.95, 50)):
        d, rho = hyperbolic_closed_forms(z, w)
        assert d >= 0.0
        assert rho >= 0.0


def test_oracle_agreement_sample(kernel2):
    rng = np.random.default_rng(23)
    for z, w in zip(ball_points(rng, 2, 0.9, 100), ball_points(rng, 2, 0.9, 100)):
        series = diastasis_eval(kernel2, z, w)
        closed, _ = hyperbolic_closed_forms(z, w)
        assert series == pytest.approx(closed, abs=1e-8)


def test_diastasis_is_kahler_potential(kernel2):
    rng = np.random.default_rng(29)
    for z, w in zip(ball_points(rng, 2, 0.8, 8), ball_points(rng, 2, 0.8, 8)):
        fd = numdiff.complex_hessian_fd(lambda x: diastasis_eval(kernel2, x, w), z)
        analytic = metric_tensor(kernel2.spec, z).matrix
        assert np.max(np.abs(fd - analytic)) / np.max(np.abs(analytic)) < 1e-5


def test_distance_identity_on_radial_line(hyp1):
    radii = np.linspace(0.0, 0.99, 100)
    rho = radial_distance(hyp1, radii)
    assert np.max(np.abs(rho - np.arctanh(radii))) < 1e-10


def test_radial_distance_scales(alpha2):
    radii = np.array([0.3, 0.9, 0.999])
    got = radial_distance(alpha2, radii)
    assert got == pytest.approx(math.sqrt(2.0) * np.arctanh(radii), rel=1e-12)


def test_radial_distance_perturbed_oracle(perturbed_03):
    # frozen scipy.quad values for sqrt(1/(1-s^2)^2 + 0.3)
    got = radial_distance(perturbed_03, [0.9, 0.5])
    assert got[0] == pytest.approx(1.566166971038416, rel=1e-12)
    assert got[1] == pytest.approx(0.6141377500604684, rel=1e-12)


def test_distance_helper(hyp1, perturbed_03):
    assert dia.distance(hyp1, [0.5], [0.0]) == pytest.approx(math.atanh(0.5), rel=1e-14)
    assert dia.distance(hyp1.scaled(4.0), [0.5], [0.0]) == pytest.approx(
        2.0 * math.atanh(0.5), rel=1e-14
    )
    assert dia.distance(perturbed_03, [0.5], [0.0]) == pytest.approx(
        0.6141377500604684, rel=1e-12
    )
    assert dia.distance(perturbed_03, [0.5], [0.25]) is None


def test_domain_errors(kernel1, hyp1):
    with pytest.raises(DomainError):
        diastasis_eval(kernel1, [1.0], [0.0])
    with pytest.raises(DomainError):
        hyperbolic_closed_forms([1.0], [0.0])
    with pytest.raises(DomainError):
        radial_distance(hyp1, [1.0])
