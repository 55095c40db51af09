import numpy as np
import pytest

from hmix.services import DiagnosticsService


def test_summary_on_radial_quadratic(quadratic_problem):
    spec = quadratic_problem.spec
    summary = DiagnosticsService(spec).summary(spec.usub)
    assert set(summary) == {"gradient_sup", "boundary_gradient_sup", "second_order_ratio", "cone_margin_min"}
    assert summary["gradient_sup"] == pytest.approx(8.0 / 3.0)
    assert summary["boundary_gradient_sup"] == pytest.approx(4.0)
    assert summary["cone_margin_min"] == pytest.approx(2.0)


def test_second_order_ratio(quadratic_problem):
    spec = quadratic_problem.spec
    k_const = 1.0 + (8.0 / 3.0) ** 2
    assert DiagnosticsService(spec).second_order_ratio(spec.usub) == pytest.approx(1.0 / (k_const + 1.0))


def test_cone_margins_per_index(quartic_problem):
    mp, spec = quartic_problem
    margins = DiagnosticsService(spec).cone_margins(mp.ustar)
    assert len(margins) == spec.k - 1
    assert margins[0] >= 2.0


def test_cone_bounds_audit(quartic_problem):
    mp, spec = quartic_problem
    audit = DiagnosticsService(spec).cone_bounds_audit(mp.ustar, max_points=64)
    assert audit.name == "cone_bounds"
    assert audit.ok
    assert "failures=0" in audit.detail


def test_cone_bounds_audit_flags_inadmissible_points(quadratic_problem):
    spec = quadratic_problem.spec
    flipped = spec.usub.with_values(-spec.usub.values)
    audit = DiagnosticsService(spec).cone_bounds_audit(flipped, max_points=16)
    assert not audit.ok
    assert np.isfinite(audit.worst)
