import logging

import numpy as np

from hmix.core.errors import HmixError
from hmix.models import Coefficients, GridFunction, ProblemSpec
from hmix.numerics import geometry
from hmix.numerics.operator import cone_bounds_report, evaluate_lambda
from hmix.numerics.spectral import jacobi_eigh
from hmix.numerics.symfun import sigma_all
from hmix.schemas import AuditResult
from .problem_service import spec_coefficients

logger = logging.getLogger(__name__)

MAX_AUDIT_POINTS = 512


class DiagnosticsService:
    """Observed counterparts of the a priori estimates; nothing here is asserted."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec

    def _chi(self, u: GridFunction) -> np.ndarray:
        return self.spec.chi0.data + geometry.complex_hessian_data(u.values, self.spec.grid)

    # --------------------------
    # Interior second-order ratio
    # --------------------------
    def second_order_ratio(self, u: GridFunction) -> float:
        """sup|ddbar u| / (K + sup over the first interior layer |ddbar u|), K = 1 + sup|grad u|^2."""
        hess = geometry.complex_hessian_data(u.values, self.spec.grid)
        size = np.max(np.abs(np.linalg.eigvalsh(hess)), axis=-1)
        near = np.ones(size.shape, dtype=bool)
        near[(slice(1, -1),) * size.ndim] = False
        k_const = 1.0 + geometry.gradient_sup(u) ** 2
        return float(np.max(size) / (k_const + np.max(size[near])))

    # --------------------------
    # Boundary gradient
    # --------------------------
    def boundary_gradient_sup(self, u: GridFunction) -> float:
        grid = u.grid
        parts = np.gradient(u.values, *grid.axes, edge_order=2)
        norm = np.sqrt(sum(p**2 for p in parts))
        return float(np.max(norm[grid.boundary_mask()]))

    # --------------------------
    # Cone margins
    # --------------------------
    def cone_margins(self, u: GridFunction) -> list[float]:
        """min over interior points of sigma_j(lambda(chi_u)), j = 1..k-1."""
        lam, _ = jacobi_eigh(self._chi(u))
        sig = sigma_all(lam)
        return [float(np.min(sig[..., j])) for j in range(1, self.spec.k)]

    # --------------------------
    # Cone bounds on sampled points
    # --------------------------
    def cone_bounds_audit(self, u: GridFunction, max_points: int = MAX_AUDIT_POINTS) -> AuditResult:
        """cone_bounds_report at sampled interior points with beta := G(lambda) there."""
        spec = self.spec
        coeffs = spec_coefficients(spec)
        lam, _ = jacobi_eigh(self._chi(u))
        flat = lam.reshape(-1, spec.n)
        beta_l = coeffs.beta_l.reshape(spec.k - 1, -1)
        stride = max(1, flat.shape[0] // max_points)
        failures, upper_ratio = [], 0.0
        for p in range(0, flat.shape[0], stride):
            local = Coefficients(n=spec.n, k=spec.k, beta_l=beta_l[:, p], beta=0.0)
            try:
                value, _ = evaluate_lambda(flat[p], local)
                report = cone_bounds_report(flat[p], local.with_beta(float(value)))
            except HmixError as exc:
                failures.append((p, exc.detail))
                continue
            if not report.ok:
                failures.append((p, "bound check failed"))
            if report.trace > 0:
                upper_ratio = max(upper_ratio, report.trace_upper_observed / report.trace)
        if failures:
            logger.warning("cone bounds audit failures=%d first=%s", len(failures), failures[0])
        return AuditResult(
            name="cone_bounds",
            ok=not failures,
            worst=upper_ratio,
            detail=f"points={len(range(0, flat.shape[0], stride))} failures={len(failures)}",
        )

    def summary(self, u: GridFunction) -> dict[str, float]:
        margins = self.cone_margins(u)
        return {
            "gradient_sup": geometry.gradient_sup(u),
            "boundary_gradient_sup": self.boundary_gradient_sup(u),
            "second_order_ratio": self.second_order_ratio(u),
            "cone_margin_min": min(margins),
        }
