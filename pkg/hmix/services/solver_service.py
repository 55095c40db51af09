"""Damped Newton inside a continuity homotopy.

At parameter t the discrete equation is
    G(chi_u) = t * beta + (1 - t) * G(chi_usub)
with G(chi_usub) evaluated by the same stencils, so u = u_sub solves t = 0 exactly.
"""

import logging
import time
from typing import Optional

import numpy as np

from hmix.core.errors import (
    CONE_EXIT_MSG,
    GRID_MISMATCH_MSG,
    ArgumentError,
    DomainError,
    HomotopyFailure,
    LinearFailure,
    NewtonStall,
)
from hmix.models import Coefficients, GridFunction, HomotopyState, OperatorFieldEval, ProblemSpec
from hmix.numerics import geometry
from hmix.numerics.operator import evaluate_field
from hmix.numerics.symfun import in_cone, sigma_all
from hmix.schemas import AuditResult, RunReport, SolverConfig, StepRecord
from .problem_service import sandwich_tolerance, spec_coefficients

logger = logging.getLogger(__name__)


class ContinuationSolver:
    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()

    # --------------------------
    # Pointwise evaluation
    # --------------------------
    def _evaluate(self, values: np.ndarray, spec: ProblemSpec, coeffs: Coefficients) -> OperatorFieldEval:
        """G at every interior point; DomainError (full-grid indices) when the cone margin is lost."""
        chi = spec.chi0.data + geometry.complex_hessian_data(values, spec.grid)
        try:
            ev = evaluate_field(chi, coeffs)
        except DomainError as exc:
            raise DomainError(CONE_EXIT_MSG, points=[tuple(i + 1 for i in p) for p in exc.points]) from exc
        ok = in_cone(ev.eigenvalues, spec.k - 1, self.config.cone_margin)
        if not np.all(ok):
            raise DomainError(CONE_EXIT_MSG, points=np.argwhere(~ok) + 1)
        return ev

    @staticmethod
    def _cone_margin(ev: OperatorFieldEval, k: int) -> float:
        """Smallest sigma_1..sigma_{k-1} over the interior."""
        return float(np.min(sigma_all(ev.eigenvalues)[..., 1:k]))

    def _baseline(self, spec: ProblemSpec, coeffs: Coefficients) -> np.ndarray:
        cached = getattr(self, "_baseline_cache", None)
        if cached is None or cached[0] is not spec:
            self._baseline_cache = (spec, self._evaluate(spec.usub.values, spec, coeffs).value)
        return self._baseline_cache[1]

    def target(self, spec: ProblemSpec, t: float, coeffs: Optional[Coefficients] = None) -> np.ndarray:
        coeffs = coeffs or spec_coefficients(spec)
        return t * coeffs.beta + (1.0 - t) * self._baseline(spec, coeffs)

    # --------------------------
    # RESIDUAL
    # --------------------------
    def residual(self, u: GridFunction, spec: ProblemSpec, t: float) -> GridFunction:
        """G(chi_u) - target on the interior, u - phi on the boundary layer."""
        coeffs = spec_coefficients(spec)
        ev = self._evaluate(u.values, spec, coeffs)
        out = u.values - spec.phi.values
        out[spec.grid.interior] = ev.value - self.target(spec, t, coeffs)
        return GridFunction(grid=spec.grid, values=out)

    # --------------------------
    # NEWTON step
    # --------------------------
    def newton_step(
        self, state: HomotopyState, spec: ProblemSpec, t: float, coeffs: Optional[Coefficients] = None
    ) -> HomotopyState:
        cfg = self.config
        grid = spec.grid
        coeffs = coeffs or spec_coefficients(spec)
        target = self.target(spec, t, coeffs)
        ev = self._evaluate(state.u.values, spec, coeffs)
        r = ev.value - target
        norm = float(np.max(np.abs(r)))
        if norm <= cfg.newton_tol:
            return state

        matrix = geometry.linearized_stencil(ev.grad_matrix, grid)
        delta = geometry.solve_dirichlet(
            matrix,
            -r,
            np.zeros(grid.shape),
            grid,
            tol=cfg.linear_tol,
            direct_max_unknowns=cfg.direct_max_unknowns,
        )

        s = 1.0
        while s >= cfg.min_step:
            trial = state.u.values + s * delta
            try:
                trial_norm = float(np.max(np.abs(self._evaluate(trial, spec, coeffs).value - target)))
            except DomainError:
                logger.debug("newton t=%.6g step=%g rejected: cone margin lost", t, s)
                s *= cfg.damping
                continue
            if trial_norm <= (1.0 - s / 4.0) * norm:
                logger.debug("newton t=%.6g step=%g residual=%.3e -> %.3e", t, s, norm, trial_norm)
                return HomotopyState(
                    t=t,
                    u=state.u.with_values(trial),
                    residual_inf=trial_norm,
                    newton_iters=state.newton_iters + 1,
                    step_history=state.step_history,
                )
            s *= cfg.damping
        raise NewtonStall(f"line search exhausted at t={t:.6g}, residual {norm:.3e}")

    def _newton_solve(self, state: HomotopyState, spec: ProblemSpec, t: float, coeffs: Coefficients):
        """Newton iterations at fixed t; returns the converged state and the residual trace."""
        target = self.target(spec, t, coeffs)
        start = float(np.max(np.abs(self._evaluate(state.u.values, spec, coeffs).value - target)))
        state = HomotopyState(
            t=t, u=state.u, residual_inf=start, newton_iters=state.newton_iters, step_history=state.step_history
        )
        trace = [start]
        for _ in range(self.config.max_newton):
            if state.residual_inf <= self.config.newton_tol:
                return state, trace
            state = self.newton_step(state, spec, t, coeffs)
            trace.append(state.residual_inf)
        if state.residual_inf <= self.config.newton_tol:
            return state, trace
        raise NewtonStall(f"no convergence in {self.config.max_newton} iterations at t={t:.6g}")

    # --------------------------
    # CONTINUITY method
    # --------------------------
    def continuity_solve(self, spec: ProblemSpec) -> tuple[GridFunction, RunReport]:
        cfg = self.config
        started = time.perf_counter()
        coeffs = spec_coefficients(spec)
        report = RunReport(problem=spec.name, config=cfg.model_dump())
        self._baseline_cache = None
        margin = self._cone_margin(self._evaluate(spec.usub.values, spec, coeffs), spec.k)

        state = HomotopyState(t=0.0, u=spec.usub, residual_inf=0.0)
        state.step_history.append(StepRecord(t=0.0, iters=0, residual=0.0, residuals=[0.0]))
        tol = sandwich_tolerance(spec.grid)
        below_worst = 0.0
        monotone = True
        dt = cfg.t_step0

        while state.t < 1.0:
            t_next = min(1.0, state.t + dt)
            iters_before = state.newton_iters
            try:
                trial, trace = self._newton_solve(state, spec, t_next, coeffs)
            except (NewtonStall, DomainError, LinearFailure) as exc:
                state.step_history.append(
                    StepRecord(
                        t=t_next,
                        iters=cfg.max_newton,
                        residual=float("nan"),
                        accepted=False,
                        note=exc.detail,
                    )
                )
                dt /= 2.0
                logger.info("homotopy step rejected t=%.6g dt=%.3g reason=%s", t_next, dt, exc.detail)
                if dt < cfg.t_min_step:
                    report.steps = state.step_history
                    report.final_t = state.t
                    report.wall_time = time.perf_counter() - started
                    raise HomotopyFailure(
                        f"t step fell below {cfg.t_min_step:g} at t={state.t:.6g}",
                        trace=[r.model_dump(mode="json") for r in state.step_history],
                    ) from exc
                continue

            monotone &= all(b <= a for a, b in zip(trace, trace[1:]))
            below_worst = min(below_worst, float(np.min(trial.u.values - spec.usub.values)))
            margin = min(margin, self._cone_margin(self._evaluate(trial.u.values, spec, coeffs), spec.k))
            state = trial
            state.step_history.append(
                StepRecord(
                    t=t_next,
                    iters=state.newton_iters - iters_before,
                    residual=state.residual_inf,
                    residuals=trace,
                )
            )
            logger.info(
                "homotopy step accepted t=%.6g iters=%d residual=%.3e",
                t_next,
                state.newton_iters - iters_before,
                state.residual_inf,
            )
            dt = min(2.0 * dt, cfg.t_step0)

        report.steps = state.step_history
        report.final_t = state.t
        report.final_residual = state.residual_inf
        report.total_newton_iters = state.newton_iters
        report.converged = state.residual_inf <= cfg.newton_tol
        report.audits = [
            AuditResult(
                name="admissibility",
                ok=margin > cfg.cone_margin,
                worst=margin,
                detail=f"cone_margin={cfg.cone_margin:.1e}",
            ),
            AuditResult(name="residual_monotone", ok=monotone),
            AuditResult(
                name="subsolution_below",
                ok=below_worst >= -tol,
                worst=below_worst,
                detail=f"tol={tol:.3e}",
            ),
        ]
        report.wall_time = time.perf_counter() - started
        return state.u, report

    # --------------------------
    # MONOTONICITY audit
    # --------------------------
    def monotonicity_audit(self, u1: GridFunction, u2: GridFunction, tol: Optional[float] = None) -> bool:
        """u1 <= u2 + tol pointwise, where u1 solves with the larger right-hand side."""
        if u1.grid != u2.grid:
            raise ArgumentError(GRID_MISMATCH_MSG)
        tol = 2.0 * self.config.newton_tol if tol is None else tol
        worst = float(np.max(u1.values - u2.values))
        if worst > tol:
            logger.warning("monotonicity audit failed worst=%.3e tol=%.3e", worst, tol)
        return worst <= tol
