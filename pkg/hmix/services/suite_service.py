import logging
import math
from typing import Callable, Sequence

import numpy as np
from scipy.stats import unitary_group

from hmix.core.errors import ArgumentError
from hmix.models import Coefficients, GridSpec, HermitianField, HermitianMatrix
from hmix.numerics import oracle
from hmix.numerics.operator import evaluate_full, evaluate_lambda, quotients
from hmix.numerics.spectral import jacobi_eigh
from hmix.numerics.symfun import in_cone, sigma_all
from hmix.schemas import OracleReport, SolverConfig, SuiteReport
from hmix.schemas.descriptor_schema import QuarticDescriptor, RadialQuadraticDescriptor, SumDescriptor
from .problem_service import ProblemService
from .solver_service import ContinuationSolver

logger = logging.getLogger(__name__)

SAMPLES = 1000
OPERATOR_CASES = ((2, 2), (3, 2), (3, 3), (4, 3))
DEFAULT_GRIDS = (9, 13, 17)
# sampled operator points keep sigma_1..sigma_{k-1} above this
OPERATOR_MARGIN = 1e-2


def cone_samples(
    rng: np.random.Generator, n: int, k: int, count: int, spread: float = 1.5, margin: float = 0.0
) -> np.ndarray:
    """`count` vectors of Gamma_k (sigma_1..sigma_k > margin) by rejection from N(1, spread^2)."""
    out = []
    while sum(len(b) for b in out) < count:
        batch = rng.normal(1.0, spread, size=(4 * count, n))
        out.append(batch[in_cone(batch, k, margin)])
    return np.concatenate(out)[:count]


def admissible_matrix(rng: np.random.Generator, n: int, k: int, min_gap: float = 1e-3) -> np.ndarray:
    """U diag(lambda) U* with lambda in Gamma_{k-1} and eigen-gaps >= min_gap."""
    while True:
        lam = np.sort(cone_samples(rng, n, k - 1, 1, margin=OPERATOR_MARGIN)[0])
        if np.all(np.diff(lam) >= min_gap):
            break
    basis = unitary_group.rvs(n, random_state=rng)
    return (basis * lam) @ basis.conj().T


def _inequality(report: OracleReport, slack: np.ndarray, cases: Sequence) -> None:
    """Record slack >= -tolerance checks; max_abs_err is the largest violation."""
    slack = np.asarray(slack, dtype=float).ravel()
    report.cases += slack.size
    report.max_abs_err = max(report.max_abs_err, float(np.max(-slack, initial=0.0)))
    for i in np.flatnonzero(~(slack >= -report.tolerance)):
        report.failures.append(cases[i] if i < len(cases) else int(i))


class SuiteService:
    def __init__(self, seed: int = 0, grids: Sequence[int] = DEFAULT_GRIDS, samples: int = SAMPLES):
        self.seed = seed
        self.grids = tuple(grids)
        self.samples = samples

    @property
    def suites(self) -> dict[str, Callable[[SuiteReport], None]]:
        return {
            "symfun": self._symfun,
            "spectral": self._spectral,
            "operator": self._operator,
            "convergence": self._convergence,
        }

    def run(self, name: str) -> SuiteReport:
        if name not in self.suites:
            raise ArgumentError(f"unknown suite '{name}', choose from {sorted(self.suites)}")
        report = SuiteReport(suite=name, seed=self.seed)
        self.suites[name](report)
        logger.info("suite %s ok=%s cases=%d", name, report.ok, sum(r.cases for r in report.reports))
        return report

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    # --------------------------
    # symfun
    # --------------------------
    def _symfun(self, report: SuiteReport) -> None:
        rng = self._rng()
        oracle_report = OracleReport(name="sigma_vs_bruteforce", tolerance=1e-12)
        for n in range(2, 9):
            lam = rng.uniform(-2.0, 2.0, size=(self.samples, n))
            fast = sigma_all(lam)
            scale = sigma_all(np.abs(lam))
            for row in range(self.samples):
                for k in range(n + 1):
                    oracle_report.record(
                        oracle.sigma_bruteforce(k, lam[row]),
                        float(fast[row, k]),
                        case=(n, k, row),
                        rel_floor=max(1.0, float(scale[row, k])),
                    )
        report.reports.append(oracle_report)

        nm = OracleReport(name="newton_maclaurin", tolerance=1e-12)
        for n in range(2, 7):
            for k in range(1, n + 1):
                sig = sigma_all(cone_samples(rng, n, k, self.samples))
                norm = sig / np.array([math.comb(n, j) for j in range(n + 1)])

                def ratio(a, b):
                    return (norm[:, a] / norm[:, b]) ** (1.0 / (a - b))

                for l in range(k):
                    for r in range(1, k + 1):
                        for s in range(min(l, r - 1) + 1):
                            lhs, rhs = ratio(k, l), ratio(r, s)
                            slack = (rhs - lhs) / np.maximum(1.0, np.abs(rhs))
                            _inequality(nm, slack, [(n, k, l, r, s)] * len(lhs))
        report.reports.append(nm)

    # --------------------------
    # spectral
    # --------------------------
    def _spectral(self, report: SuiteReport) -> None:
        rng = self._rng()
        interlace = OracleReport(name="interlacing", tolerance=0.0)
        lapack = OracleReport(name="eigenvalues_vs_lapack", tolerance=1e-12)
        recon = OracleReport(name="reconstruction", tolerance=1e-12)
        per_n = self.samples // 5
        for n in range(2, 7):
            x = rng.normal(size=(per_n, n, n)) + 1j * rng.normal(size=(per_n, n, n))
            a = 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))
            norm = np.linalg.norm(a, axis=(-2, -1))
            lam, basis = jacobi_eigh(a)
            minor, _ = jacobi_eigh(a[:, : n - 1, : n - 1])
            tol = 1e-10 * norm[:, None]
            slack = np.minimum(minor - lam[:, :-1], lam[:, 1:] - minor) + tol
            _inequality(interlace, slack, [(n, i) for i in range(per_n) for _ in range(n - 1)])
            ref = np.linalg.eigvalsh(a)
            rebuilt = (basis * lam[:, None, :]) @ np.conj(np.swapaxes(basis, -1, -2))
            for i in range(per_n):
                lapack.record(0.0, float(np.max(np.abs(lam[i] - ref[i]))) / norm[i], case=(n, i))
                recon.record(0.0, float(np.linalg.norm(rebuilt[i] - a[i])) / norm[i], case=(n, i))
        report.reports.extend([interlace, lapack, recon])

    # --------------------------
    # operator
    # --------------------------
    def _operator(self, report: SuiteReport) -> None:
        rng = self._rng()
        grad = OracleReport(name="gradient_vs_fd", tolerance=1e-6)
        per_n = max(1, self.samples // 2 // 4)
        for n in range(2, 6):
            for i in range(per_n):
                k = int(rng.integers(2, n + 1))
                c = Coefficients(n=n, k=k, beta_l=rng.uniform(0.1, 2.0, size=k - 1), beta=0.0)
                a = HermitianMatrix(entries=admissible_matrix(rng, n, k))
                exact = evaluate_full(a.entries, c).grad_matrix.entries
                approx = oracle.fd_matrix_gradient(c, a).entries
                rel = max(1.0, float(np.linalg.norm(exact)))
                grad.record(0.0, float(np.linalg.norm(exact - approx)), case=(n, k, i), rel_floor=rel)
        report.reports.append(grad)

        elliptic = OracleReport(name="ellipticity", tolerance=0.0)
        concave = OracleReport(name="concavity_midpoint", tolerance=1e-12)
        euler = OracleReport(name="euler_identity", tolerance=1e-10)
        trace = OracleReport(name="trace_lower_bound", tolerance=1e-12)
        for n, k in OPERATOR_CASES:
            lam = cone_samples(rng, n, k - 1, self.samples, margin=OPERATOR_MARGIN)
            mu = cone_samples(rng, n, k - 1, self.samples, margin=OPERATOR_MARGIN)
            beta_l = rng.uniform(0.1, 2.0, size=(k - 1, self.samples))
            c = Coefficients(n=n, k=k, beta_l=beta_l, beta=np.zeros(self.samples))
            cases = [(n, k, i) for i in range(self.samples)]
            f_lam, fprime = evaluate_lambda(lam, c)
            f_mu, _ = evaluate_lambda(mu, c)
            f_mid, _ = evaluate_lambda(0.5 * (lam + mu), c)
            _inequality(elliptic, np.min(fprime, axis=-1), cases)
            scale = np.maximum(1.0, np.abs(f_lam) + np.abs(f_mu))
            _inequality(concave, (f_mid - 0.5 * (f_lam + f_mu)) / scale, cases)
            q = quotients(lam, k)
            rhs = f_lam + sum((k - l) * beta_l[l] * q[:, l] for l in range(k - 1))
            lhs = np.sum(fprime * lam, axis=-1)
            _inequality(euler, -np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs)), cases)
            _inequality(trace, np.sum(fprime, axis=-1) - (n - k + 1) / k, cases)
        report.reports.extend([elliptic, concave, euler, trace])

    # --------------------------
    # convergence
    # --------------------------
    def _convergence(self, report: SuiteReport) -> None:
        """u* = |z|^2 + 0.1 |z_1|^4, n = k = 2, deflated subsolution, sup-norm error under refinement."""
        ustar = SumDescriptor(terms=[RadialQuadraticDescriptor(a=1.0), QuarticDescriptor(coeff=0.1, component=0)])
        problems = ProblemService()
        solver = ContinuationSolver(SolverConfig())
        errors, spacings = [], []
        sandwich = OracleReport(name="c0_sandwich", tolerance=0.0)
        for points in self.grids:
            grid = GridSpec.cube(2, points)
            mp = problems.manufacture(grid, 2, HermitianField.zeros(grid), [0.5], ustar, name=f"convergence-{points}")
            spec = problems.deflate_subsolution(mp, 0.01)
            u, run = solver.continuity_solve(spec)
            ok, worst = problems.c0_sandwich_check(u, spec)
            _inequality(sandwich, [1.0 if ok else worst], [points])
            errors.append(float(np.max(np.abs(u.values - mp.ustar.values))))
            spacings.append(float(grid.h[0]))
            logger.info("convergence grid=%d error=%.3e iters=%d", points, errors[-1], run.total_newton_iters)
        order = OracleReport(name="observed_order", tolerance=0.1)
        orders = []
        for i in range(1, len(errors)):
            p = math.log(errors[i - 1] / errors[i]) / math.log(spacings[i - 1] / spacings[i])
            orders.append(p)
            order.record(2.0, p, case=(self.grids[i - 1], self.grids[i]))
        report.observations.update({"grids": list(self.grids), "errors": errors, "h": spacings, "orders": orders})
        report.reports.extend([sandwich, order])
