import logging
import math
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from hmix.core.errors import (
    COEFFICIENT_POSITIVITY_MSG,
    CONE_EXIT_MSG,
    ArgumentError,
    ConstructionError,
    DomainError,
)
from hmix.models import Coefficients, GridFunction, GridSpec, HermitianField, ManufacturedProblem, ProblemSpec
from hmix.numerics import geometry
from hmix.numerics.operator import alpha_from_beta, evaluate_lambda, normalize_coefficients
from hmix.numerics.spectral import jacobi_eigh
from hmix.numerics.symfun import in_cone, sigma_all
from hmix.schemas import BumpDescriptor, ProblemConfig, SolverConfig
from hmix.schemas.descriptor_schema import ScalarDescriptor

logger = logging.getLogger(__name__)

SUBSOLUTION_SLACK = 1e-10
SANDWICH_TOL = 1e-8


def spec_coefficients(spec: ProblemSpec) -> Coefficients:
    """beta_l and beta fields of a spec; rejects alpha_l <= 0 for l <= k-2."""
    return normalize_coefficients(spec.alpha, spec.n, spec.k)


def sandwich_tolerance(grid: GridSpec) -> float:
    return SANDWICH_TOL + 10.0 * float(np.max(grid.h)) ** 2


class ProblemService:
    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()

    # --------------------------
    # LOAD from a problem config
    # --------------------------
    def load(
        self, config: ProblemConfig, grid_scale: float = 1.0
    ) -> tuple[ProblemSpec, Optional[ManufacturedProblem]]:
        lo, hi = config.box.corners(2 * config.n)
        grid = GridSpec(n=config.n, lo=lo, hi=hi, shape=config.grid_shape())
        if grid_scale != 1.0:
            grid = grid.refined(grid_scale)
        chi0 = HermitianField.constant(grid, config.chi0.matrix(config.n))
        inner = grid.interior_points()
        alpha = np.stack([d.values(inner) for d in config.alpha])
        if not np.all(alpha[: config.k - 1] > 0):
            raise DomainError(COEFFICIENT_POSITIVITY_MSG)

        if config.ustar is not None:
            beta_l = self._beta_lower(alpha, config.n, config.k)
            mp = self.manufacture(grid, config.k, chi0, beta_l, config.ustar, name=config.name)
            spec = mp.spec
            if config.deflation is not None and config.deflation.c > 0:
                spec = self.deflate_subsolution(mp, config.deflation.c, config.deflation.bump)
        else:
            mp = None
            points = grid.points()
            phi = config.phi.values(points)
            usub_descriptor = config.usub or config.phi
            usub = usub_descriptor.values(points)
            usub[grid.boundary_mask()] = phi[grid.boundary_mask()]
            chi_usub = chi0.data + geometry.complex_from_real_hessian(usub_descriptor.real_hessian(inner))
            spec = self.build_spec(
                config.name,
                grid,
                config.k,
                chi0,
                alpha,
                GridFunction(grid=grid, values=phi),
                GridFunction(grid=grid, values=usub),
                chi_usub=chi_usub,
            )

        if config.beta_shift:
            spec = self.shift_beta(spec, config.beta_shift)
        logger.info("problem loaded name=%s grid=%s k=%d", spec.name, grid.shape, spec.k)
        return spec, mp

    @staticmethod
    def _beta_lower(alpha_lower: np.ndarray, n: int, k: int) -> np.ndarray:
        return np.stack([alpha_lower[l] * math.comb(n, k) / math.comb(n, l) for l in range(k - 1)])

    # --------------------------
    # MANUFACTURE
    # --------------------------
    def manufacture(
        self,
        grid: GridSpec,
        k: int,
        chi0: HermitianField,
        beta_l: Union[Sequence[float], np.ndarray],
        ustar: ScalarDescriptor,
        name: str = "manufactured",
    ) -> ManufacturedProblem:
        """Right-hand side beta := G(chi_{u*}) from the analytic Hessian of u*."""
        n = grid.n
        if not 2 <= k <= n:
            raise ArgumentError(f"need 2 <= k <= n, got k={k}, n={n}")
        beta_l = np.asarray(beta_l, dtype=float)
        if beta_l.shape[0] != k - 1:
            raise ArgumentError(f"expected {k - 1} lower-order coefficients")
        if beta_l.ndim == 1:
            beta_l = beta_l.reshape((k - 1,) + (1,) * grid.dim) * np.ones(grid.interior_shape)
        if not np.all(beta_l > 0):
            raise DomainError(COEFFICIENT_POSITIVITY_MSG)

        chi_star = chi0.data + geometry.complex_from_real_hessian(ustar.real_hessian(grid.interior_points()))
        lam, _ = jacobi_eigh(chi_star)
        self._require_admissible(lam, k, "manufactured solution is not admissible")
        coeffs = Coefficients(n=n, k=k, beta_l=beta_l, beta=np.zeros(grid.interior_shape))
        beta_field, _ = evaluate_lambda(lam, coeffs)

        alpha = np.concatenate(
            [
                np.stack([beta_l[l] * math.comb(n, l) / math.comb(n, k) for l in range(k - 1)]),
                alpha_from_beta(beta_field, n, k)[None],
            ]
        )
        u = GridFunction(grid=grid, values=ustar.values(grid.points()))
        spec = ProblemSpec(name=name, grid=grid, k=k, chi0=chi0, alpha=alpha, phi=u, usub=u)
        return ManufacturedProblem(spec=spec, ustar=u, beta_field=beta_field, chi_ustar=chi_star)

    # --------------------------
    # DEFLATE the subsolution
    # --------------------------
    def deflate_subsolution(
        self, mp: ManufacturedProblem, c: float, bump: Optional[BumpDescriptor] = None
    ) -> ProblemSpec:
        """u_sub := u* - c * eta, verified admissible and a subsolution with analytic Hessians."""
        if c < 0:
            raise ArgumentError("deflation constant must be >= 0")
        if c == 0:
            return mp.spec
        bump = bump or BumpDescriptor()
        spec = mp.spec
        grid = spec.grid
        eta = bump.values(grid.points(), grid.lo, grid.hi)
        eta[grid.boundary_mask()] = 0.0
        chi_star = mp.chi_ustar
        if chi_star is None:
            chi_star = spec.chi0.data + geometry.complex_hessian_data(mp.ustar.values, grid)
        bump_hess = geometry.complex_from_real_hessian(bump.real_hessian(grid.interior_points(), grid.lo, grid.hi))
        usub = GridFunction(grid=grid, values=mp.ustar.values - c * eta)
        deflated = self.build_spec(
            f"{spec.name}-deflated",
            grid,
            spec.k,
            spec.chi0,
            spec.alpha,
            spec.phi,
            usub,
            chi_usub=chi_star - c * bump_hess,
        )
        logger.info("deflation accepted c=%g", c)
        return deflated

    # --------------------------
    # BUILD + VERIFY
    # --------------------------
    def build_spec(
        self,
        name: str,
        grid: GridSpec,
        k: int,
        chi0: HermitianField,
        alpha: np.ndarray,
        phi: GridFunction,
        usub: GridFunction,
        chi_usub: Optional[np.ndarray] = None,
    ) -> ProblemSpec:
        try:
            spec = ProblemSpec(name=name, grid=grid, k=k, chi0=chi0, alpha=alpha, phi=phi, usub=usub)
        except ValidationError as exc:
            raise ConstructionError(f"invalid problem data: {exc.errors()[0]['msg']}") from exc
        self.verify_subsolution(spec, chi_usub)
        return spec

    @staticmethod
    def _usub_chi(spec: ProblemSpec, chi_usub: Optional[np.ndarray]) -> np.ndarray:
        if chi_usub is not None:
            return chi_usub
        return spec.chi0.data + geometry.complex_hessian_data(spec.usub.values, spec.grid)

    def subsolution_margins(self, spec: ProblemSpec, chi_usub: Optional[np.ndarray] = None) -> dict[str, float]:
        """Smallest sigma_1..sigma_{k-1} of chi_usub and smallest G(chi_usub) - beta (discrete Hessian by default)."""
        chi = self._usub_chi(spec, chi_usub)
        lam, _ = jacobi_eigh(chi)
        cone = float(np.min(sigma_all(lam)[..., 1 : spec.k]))
        margins = {"cone_margin": cone, "subsolution_margin": float("nan")}
        if np.all(in_cone(lam, spec.k - 1)):
            coeffs = spec_coefficients(spec)
            value, _ = evaluate_lambda(lam, coeffs)
            margins["subsolution_margin"] = float(np.min(value - coeffs.beta))
        return margins

    def verify_subsolution(self, spec: ProblemSpec, chi_usub: Optional[np.ndarray] = None) -> dict[str, float]:
        chi = self._usub_chi(spec, chi_usub)
        lam, _ = jacobi_eigh(chi)
        self._require_admissible(lam, spec.k, "subsolution is not admissible")
        coeffs = spec_coefficients(spec)
        value, _ = evaluate_lambda(lam, coeffs)
        gap = value - coeffs.beta
        bad = gap < -SUBSOLUTION_SLACK
        if np.any(bad):
            raise ConstructionError(
                f"subsolution inequality violated: max violation {float(-np.min(gap)):.3e}",
                violations=(np.argwhere(bad) + 1).tolist(),
            )
        return {"cone_margin": float(np.min(sigma_all(lam)[..., 1 : spec.k])), "subsolution_margin": float(np.min(gap))}

    @staticmethod
    def _require_admissible(lam: np.ndarray, k: int, detail: str) -> None:
        ok = in_cone(lam, k - 1)
        if not np.all(ok):
            raise ConstructionError(f"{detail}: {CONE_EXIT_MSG}", violations=(np.argwhere(~ok) + 1).tolist())

    # --------------------------
    # SUPERSOLUTION
    # --------------------------
    def supersolution(self, spec: ProblemSpec) -> GridFunction:
        """Discrete Delta_C v = -tr(chi_0) with v = phi on the boundary layer."""
        grid = spec.grid
        rhs = -np.trace(spec.chi0.data, axis1=-2, axis2=-1).real
        values = geometry.solve_dirichlet(
            geometry.laplacian_stencil(grid),
            rhs,
            spec.phi.values,
            grid,
            tol=self.config.linear_tol,
            direct_max_unknowns=self.config.direct_max_unknowns,
        )
        return GridFunction(grid=grid, values=values)

    @staticmethod
    def supersolution_residual(v: GridFunction, spec: ProblemSpec) -> float:
        chi = spec.chi0.data + geometry.complex_hessian_data(v.values, spec.grid)
        return float(np.max(np.abs(np.trace(chi, axis1=-2, axis2=-1))))

    # --------------------------
    # C0 sandwich
    # --------------------------
    def c0_sandwich_check(
        self, u: GridFunction, spec: ProblemSpec, v: Optional[GridFunction] = None
    ) -> tuple[bool, float]:
        """u_sub - tol <= u <= v + tol pointwise; worst is the most negative margin."""
        if v is None:
            v = self.supersolution(spec)
        lower = u.values - spec.usub.values
        upper = v.values - u.values
        worst = float(min(np.min(lower), np.min(upper)))
        ok = worst >= -sandwich_tolerance(spec.grid)
        if not ok:
            logger.warning("c0 sandwich violated worst=%.3e", worst)
        return ok, worst

    # --------------------------
    # SHIFT beta
    # --------------------------
    @staticmethod
    def shift_beta(spec: ProblemSpec, delta: float) -> ProblemSpec:
        """Same problem with beta + delta; the subsolution property survives only for delta <= 0."""
        alpha = spec.alpha.copy()
        alpha[spec.k - 1] = alpha[spec.k - 1] + alpha_from_beta(delta, spec.n, spec.k)
        return spec.model_copy(update={"alpha": alpha, "name": f"{spec.name}{delta:+g}"})
