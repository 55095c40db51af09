import numpy as np
import pytest

from hmix.core.errors import ArgumentError, DomainError, HomotopyFailure
from hmix.models import GridFunction, GridSpec, HermitianField, HomotopyState
from hmix.numerics import geometry
from hmix.schemas import SolverConfig
from hmix.schemas.descriptor_schema import RadialQuadraticDescriptor
from hmix.services import ContinuationSolver, ProblemService
from tests.test_utils import TestAssertions


def test_residual_vanishes_at_start(solver, quartic_problem):
    _, spec = quartic_problem
    r = solver.residual(spec.usub, spec, 0.0)
    assert np.max(np.abs(r.values)) <= 1e-14


def test_residual_boundary_entries(solver, quartic_problem):
    _, spec = quartic_problem
    shifted = spec.usub.with_values(spec.usub.values + 0.5)
    r = solver.residual(shifted, spec, 0.0)
    assert np.allclose(r.boundary_values(), 0.5)


def test_residual_outside_cone(solver, quadratic_problem):
    spec = quadratic_problem.spec
    flipped = spec.usub.with_values(-spec.usub.values)
    with pytest.raises(DomainError) as exc:
        solver.residual(flipped, spec, 1.0)
    assert all(min(p) >= 1 for p in exc.value.points)


def test_newton_step_is_noop_on_exact_solution(solver, quadratic_problem):
    spec = quadratic_problem.spec
    state = HomotopyState(t=1.0, u=spec.usub)
    assert solver.newton_step(state, spec, 1.0) is state


def test_newton_iterations_decrease_residual(solver, quartic_problem):
    _, spec = quartic_problem
    state = HomotopyState(t=1.0, u=spec.usub)
    norms = [float(np.max(np.abs(solver.residual(spec.usub, spec, 1.0).interior)))]
    while norms[-1] > solver.config.newton_tol and len(norms) < 8:
        state = solver.newton_step(state, spec, 1.0)
        norms.append(state.residual_inf)
    assert all(b < a for a, b in zip(norms, norms[1:]))
    assert norms[-1] <= solver.config.newton_tol
    assert state.newton_iters == len(norms) - 1


def test_continuity_solve_quadratic_exactness(problems):
    grid = GridSpec.cube(2, 9)
    mp = problems.manufacture(grid, 2, HermitianField.zeros(grid), [0.5], RadialQuadraticDescriptor(a=1.0))
    u, report = ContinuationSolver().continuity_solve(mp.spec)
    TestAssertions.assert_run_report(report)
    assert np.max(np.abs(u.values - mp.ustar.values)) <= 1e-9


def test_continuity_solve_ci_problem(ci_config):
    problems = ProblemService()
    spec, mp = problems.load(ci_config)
    solver = ContinuationSolver(ci_config.solver.apply(SolverConfig()))
    u, report = solver.continuity_solve(spec)
    TestAssertions.assert_run_report(report)
    assert report.total_newton_iters <= 12
    assert report.steps[0].t == 0.0
    accepted = [s.t for s in report.steps if s.accepted]
    assert accepted == sorted(accepted) and accepted[-1] == 1.0
    ok, _ = problems.c0_sandwich_check(u, spec)
    assert ok
    assert np.max(np.abs(u.values - mp.ustar.values)) < 5e-2


def test_admissibility_audit_measures_cone_margin(solver, quartic_problem):
    _, spec = quartic_problem
    u, report = solver.continuity_solve(spec)
    audit = next(a for a in report.audits if a.name == "admissibility")
    assert audit.ok
    assert audit.worst > 1.0
    # k = 2: the margin is sigma_1, the trace of chi_u, minimised over every accepted state
    for state in (spec.usub, u):
        chi = spec.chi0.data + geometry.complex_hessian_data(state.values, spec.grid)
        assert audit.worst <= float(np.min(np.trace(chi, axis1=-2, axis2=-1).real)) + 1e-12


def test_continuity_solve_is_deterministic(solver, quartic_problem):
    _, spec = quartic_problem
    u1, _ = solver.continuity_solve(spec)
    u2, _ = ContinuationSolver(SolverConfig()).continuity_solve(spec)
    assert np.array_equal(u1.values, u2.values)


def test_continuity_solve_failure_carries_trace(quartic_problem):
    _, spec = quartic_problem
    solver = ContinuationSolver(SolverConfig(max_newton=1, t_step0=0.25, t_min_step=0.2))
    with pytest.raises(HomotopyFailure) as exc:
        solver.continuity_solve(spec)
    assert exc.value.exit_code == 2
    assert exc.value.trace
    assert any(not record["accepted"] for record in exc.value.trace)


def test_monotonicity_audit(solver, quadratic_problem):
    spec = quadratic_problem.spec
    lower = ProblemService.shift_beta(spec, -0.1)
    u1, _ = solver.continuity_solve(spec)
    u2, report = solver.continuity_solve(lower)
    TestAssertions.assert_run_report(report)
    assert solver.monotonicity_audit(u1, u2)
    assert solver.monotonicity_audit(u1, u1)
    assert not solver.monotonicity_audit(u2, u1)


def test_monotonicity_audit_grid_mismatch(solver, grid7):
    other = GridSpec.cube(2, 5)
    with pytest.raises(ArgumentError):
        solver.monotonicity_audit(
            GridFunction(grid=grid7, values=np.zeros(grid7.shape)),
            GridFunction(grid=other, values=np.zeros(other.shape)),
        )
