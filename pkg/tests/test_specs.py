import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kahler_entropy import (
    MetricSpec,
    hyperbolic_spec,
    load_spec,
    metric_tensor,
    spec_from_dict,
    validate_spec,
    volume_density,
)
from kahler_entropy import numdiff, specs
from kahler_entropy.errors import (
    DomainError,
    IncompleteMetric,
    InvalidSpec,
    TailTooLarge,
)

from conftest import ball_points


def test_hyperbolic_spec_validates_on_standard_grid(hyp2):
    report = validate_spec(hyp2, np.linspace(0.1, 0.99, 45))
    assert report.passed
    assert report.first_failing_radius is None
    assert report.tail_bound < 1e-12


def test_flat_spec_positivity_but_incomplete(flat_spec):
    report = validate_spec(flat_spec)
    assert report.passed  # a_1-only potential gives the Euclidean metric
    with pytest.raises(IncompleteMetric):
        specs.ensure_complete(flat_spec)


def test_strongly_negative_poly_fails_positivity():
    bad = MetricSpec(name="bad", dim=1, alpha=1.0, poly=(-5.0,))
    report = validate_spec(bad, np.linspace(0.05, 0.99, 60))
    assert not report.passed
    assert report.first_failing_radius == pytest.approx(0.05, abs=1e-12)

    # locate the radial-eigenvalue sign change by bisection: 1/(1-t)^2 = 5
    lo, hi = 0.05, 0.99
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        _, rad = specs.metric_eigenvalues(bad, mid * mid)
        if rad < 0:
            lo = mid
        else:
            hi = mid
    expected_r = math.sqrt(1.0 - 5.0**-0.5)
    assert 0.5 * (lo + hi) == pytest.approx(expected_r, abs=1e-9)
    assert report.first_failing_radius < expected_r


def test_metric_tensor_model_values(hyp1, hyp2):
    assert metric_tensor(hyp1, [0.0]).matrix[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert metric_tensor(hyp1, [0.5]).matrix[0, 0].real == pytest.approx(16.0 / 9.0, rel=1e-14)
    assert metric_tensor(hyp2, [0.5, 0.0]).det == pytest.approx(0.75**-3, rel=1e-14)


def test_volume_density_examples(hyp2):
    assert volume_density(hyp2, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-15)
    assert volume_density(hyp2, [0.5, 0.0]) == pytest.approx(2.37037037037037, rel=1e-12)
    scaled = hyp2.scaled(4.0)
    z = np.array([0.3, 0.2j])
    assert volume_density(scaled, z) == pytest.approx(16.0 * volume_density(hyp2, z), rel=1e-13)


def test_domain_error_outside_ball(hyp1, hyp2):
    with pytest.raises(DomainError):
        metric_tensor(hyp1, [1.0])
    with pytest.raises(DomainError):
        metric_tensor(hyp2, [0.8, 0.7])
    with pytest.raises(DomainError):
        metric_tensor(hyp2, [0.5])  # wrong dimension


def test_metric_matches_fd_hessian_of_potential(hyp2, perturbed_03):
    rng = np.random.default_rng(42)
    for spec in (hyp2, perturbed_03):
        for z in ball_points(rng, spec.dim, 0.9, 6):
            analytic = metric_tensor(spec, z).matrix
            fd = numdiff.complex_hessian_fd(
                lambda x: float(specs.potential_radial(spec, np.vdot(x, x).real)), z
            )
            assert np.max(np.abs(fd - analytic)) / np.max(np.abs(analytic)) < 1e-6


def test_hermitian_and_inverse_consistency(hyp3):
    rng = np.random.default_rng(3)
    for z in ball_points(rng, 3, 0.9, 10):
        m = metric_tensor(hyp3, z)
        assert np.max(np.abs(m.matrix - m.matrix.conj().T)) < 1e-12 * np.max(np.abs(m.matrix))
        assert np.max(np.abs(m.matrix @ m.inverse - np.eye(3))) < 1e-10
        eigs = np.linalg.eigvalsh(m.matrix)
        assert np.all(eigs > 0)
        assert m.det == pytest.approx(float(np.prod(eigs)), rel=1e-10)


@given(
    r=st.floats(0.05, 0.9),
    phase=st.floats(0.0, 2.0 * math.pi),
    mix=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**16),
)
def test_rotation_invariance_of_density(r, phase, mix, seed):
    spec = hyperbolic_spec(2)
    z = np.array([r * math.cos(mix) * np.exp(1j * phase), r * math.sin(mix)])
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    assert volume_density(spec, q @ z) == pytest.approx(volume_density(spec, z), rel=1e-12)


def test_spec_json_round_trip(tmp_path):
    spec = MetricSpec(name="demo", dim=2, alpha=1.5, poly=(0.1, -0.05), scale=2.0)
    path = tmp_path / "demo.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert load_spec(path) == spec


def test_spec_json_unknown_key_fails():
    with pytest.raises(InvalidSpec, match="unknown spec keys"):
        spec_from_dict(
            {"name": "x", "dim": 1, "alpha": 1.0, "poly": [], "scale": 1.0, "extra": 2}
        )


def test_spec_json_missing_and_malformed():
    with pytest.raises(InvalidSpec, match="missing"):
        spec_from_dict({"name": "x", "dim": 1, "alpha": 1.0, "poly": []})
    with pytest.raises(InvalidSpec):
        spec_from_dict({"name": "x", "dim": 1.5, "alpha": 1.0, "poly": [], "scale": 1.0})
    with pytest.raises(InvalidSpec):
        MetricSpec(name="x", dim=0, alpha=1.0)
    with pytest.raises(InvalidSpec):
        MetricSpec(name="x", dim=1, alpha=-0.1)
    with pytest.raises(InvalidSpec):
        MetricSpec(name="x", dim=1, alpha=1.0, scale=0.0)


def test_truncation_tail_control(hyp1):
    k = specs.k_int_for(hyp1, 0.99)
    t = 0.99**2
    assert t ** (2 * k / 2) / k < 1e-14
    report = validate_spec(hyp1, np.linspace(0.1, 0.99, 20))
    assert report.tail_bound < 1e-12
    with pytest.raises(TailTooLarge):
        specs.k_int_for(hyp1, 1.0 - 1e-9)


def test_truncation_grows_for_large_scale():
    big = MetricSpec(name="big", dim=1, alpha=2.0, scale=16.0)
    small = hyperbolic_spec(1)
    assert specs.k_int_for(big, 0.99) >= specs.k_int_for(small, 0.99)
    assert validate_spec(big, np.linspace(0.1, 0.99, 20)).tail_bound < 1e-12
