import math

import numpy as np
import pytest

from kahler_entropy import (
    MetricSpec,
    bcg_proxy_scan,
    hyperbolic_spec,
    lower_bound_check,
    metric_tensor,
    minimality_scan,
    scale_metric,
    scaling_law_check,
)
from kahler_entropy import rigidity, specs
from kahler_entropy.errors import DomainError


def test_scale_metric_identity(hyp1):
    assert scale_metric(hyp1, 1.0) == hyp1


def test_scale_metric_scales_tensor(hyp1):
    scaled = scale_metric(hyp1, 4.0)
    z = [0.37]
    assert metric_tensor(scaled, z).matrix[0, 0] == pytest.approx(
        4.0 * metric_tensor(hyp1, z).matrix[0, 0], rel=1e-14
    )


def test_scale_metric_doubles_potential(perturbed_03):
    doubled = scale_metric(perturbed_03, 2.0)
    t = 0.25
    assert float(specs.potential_radial(doubled, t)) == pytest.approx(
        2.0 * float(specs.potential_radial(perturbed_03, t)), rel=1e-15
    )
    assert float(specs.potential_radial(doubled, t)) == pytest.approx(
        2.0 * 0.3626820724517809, rel=1e-14
    )


@pytest.mark.parametrize("lam", [0.25, 0.5, 2.0, 4.0])
def test_scale_metric_involutive_dyadic(perturbed_03, lam):
    assert scale_metric(scale_metric(perturbed_03, lam), 1.0 / lam) == perturbed_03


def test_scaling_law_model(hyp1):
    rep = scaling_law_check(hyp1, 4.0)
    assert rep.passed
    assert rep.ratio_d == pytest.approx(0.5, rel=0.02)
    assert rep.ratio_v == pytest.approx(0.5, rel=0.02)


def test_scaling_law_trivial(hyp1):
    rep = scaling_law_check(hyp1, 1.0)
    assert rep.ratio_d == pytest.approx(1.0, rel=1e-12)
    assert rep.ratio_v == pytest.approx(1.0, rel=1e-12)


def test_scaling_law_perturbed(perturbed_03):
    rep = scaling_law_check(perturbed_03, 0.25)
    assert rep.passed
    assert rep.ratio_d == pytest.approx(2.0, rel=0.02)
    assert rep.ratio_v == pytest.approx(2.0, rel=0.02)


def test_scaling_law_domain(hyp1):
    with pytest.raises(DomainError):
        scaling_law_check(hyp1, 100.0)


def test_lower_bound_model(hyp2):
    rep = lower_bound_check(hyp2)
    assert rep.verdict == "holds"
    assert rep.ent_d.value == pytest.approx(4.0, rel=0.02)
    assert rep.ent_v.value == pytest.approx(4.0, rel=0.02)
    # sharp case: near-equality within combined errors
    assert abs(rep.margin) <= rep.tolerance_used


def test_lower_bound_family(perturbed_neg01, alpha2):
    for spec in (perturbed_neg01, alpha2, MetricSpec(name="p2", dim=1, alpha=1.0, poly=(0.2,))):
        rep = lower_bound_check(spec)
        assert rep.verdict == "holds"
        assert rep.margin >= -rep.tolerance_used
    rep = lower_bound_check(alpha2)
    assert rep.ent_d.value == pytest.approx(2.0 / math.sqrt(2.0), rel=0.02)
    assert abs(rep.margin) <= rep.tolerance_used


def test_lower_bound_inconclusive_on_failure(flat_spec):
    rep = lower_bound_check(flat_spec)
    assert rep.verdict == "inconclusive"
    assert "IncompleteMetric" in rep.failure


def test_bcg_proxy_model(hyp1, hyp2):
    rep = bcg_proxy_scan(hyp1, lambdas=(0.5, 1.0, 2.0), r0=0.9)
    assert rep.passed
    assert rep.spread <= 0.03
    rep_single = bcg_proxy_scan(hyp1, lambdas=(1.0,), r0=0.9)
    assert rep_single.spread == 0.0
    rep2 = bcg_proxy_scan(hyp2, lambdas=(1.0, 4.0), r0=0.8)
    ratio = rep2.rows[1].functional / rep2.rows[0].functional
    assert ratio == pytest.approx(1.0, abs=0.03)


def test_minimality_scan_rows():
    rows = minimality_scan([-0.1, 0.0, 0.1], n=1, r0=0.9)
    assert [row.param for row in rows] == [-0.1, 0.0, 0.1]
    center = rows[1]
    assert center.ent_d == pytest.approx(2.0, rel=0.02)
    assert all(row.verdict == "holds" for row in rows)
    # volume normalization: every member shares the model proxy volume
    ref = rigidity.coordinate_ball_volume(hyperbolic_spec(1), 0.9)
    for row in rows:
        assert row.functional == pytest.approx(row.ent_d ** 2 * ref, rel=1e-6)


def test_minimality_scan_empty():
    assert minimality_scan([], n=1, r0=0.9) == []


def test_minimality_scan_member_inequality():
    rows = minimality_scan([0.2], n=1, r0=0.9)
    assert len(rows) == 1
    assert rows[0].verdict == "holds"
    assert rows[0].ent_d >= rows[0].ent_v - (rows[0].ent_d_err + rows[0].ent_v_err)


def test_minimality_scan_records_member_failures():
    rows = minimality_scan([-5.0, 0.0], n=1, r0=0.9)
    assert rows[0].verdict == "error:NonPositiveMetric"
    assert rows[0].ent_d is None
    assert rows[1].verdict == "holds"


def test_csv_row_shapes():
    rows = minimality_scan([0.0], n=1, r0=0.9)
    values = rows[0].csv_values()
    assert len(values) == len(rigidity.SCAN_CSV_HEADER)
    assert values[-1] == "holds"
