"""
Shared test data and assertions for hmix
"""

import numpy as np


class TestDataFactory:
    """Factory class for creating test data."""

    @staticmethod
    def create_problem_config(name="ci-small", n=2, k=2, shape=9, alpha0=0.5, deflate=0.0, solver=None):
        """Manufactured |z|^2 + 0.1 |z_1|^4 problem config."""
        data = {
            "name": name,
            "n": n,
            "k": k,
            "shape": shape,
            "alpha": [{"kind": "constant", "value": alpha0}] * (k - 1),
            "ustar": {
                "kind": "sum",
                "terms": [
                    {"kind": "radial_quadratic", "a": 1.0},
                    {"kind": "quartic", "coeff": 0.1, "component": 0},
                ],
            },
        }
        if deflate:
            data["deflation"] = {"c": deflate}
        if solver:
            data["solver"] = solver
        return data

    @staticmethod
    def create_dirichlet_config(name="dirichlet", shape=7):
        """Problem given by boundary data only; the subsolution defaults to phi."""
        return {
            "name": name,
            "n": 2,
            "k": 2,
            "shape": shape,
            "chi0": {"kind": "scaled_identity", "scale": 0.5},
            "alpha": [{"kind": "constant", "value": 0.2}, {"kind": "constant", "value": 0.5}],
            "phi": {"kind": "radial_quadratic", "a": 1.0},
        }

    @staticmethod
    def random_hermitian(rng, n, batch=()):
        x = rng.normal(size=batch + (n, n)) + 1j * rng.normal(size=batch + (n, n))
        return 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))

    @staticmethod
    def random_positive_hermitian(rng, n):
        """X X* + I: eigenvalues >= 1, so every Garding cone contains its spectrum."""
        x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return x @ np.conj(x.T) + np.eye(n)


class TestAssertions:
    """Common test assertions."""

    @staticmethod
    def assert_hermitian(a, tol=1e-12):
        a = np.asarray(a)
        assert np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2)))) <= tol

    @staticmethod
    def assert_run_report(report, max_residual=1e-10):
        """Converged run: t reached 1, residual below tolerance, every audit passed."""
        assert report.converged
        assert report.final_t == 1.0
        assert report.final_residual <= max_residual
        failed = [a.name for a in report.audits if not a.ok]
        assert not failed, f"audits failed: {failed}"

    @staticmethod
    def assert_manifest(data, expected_files=()):
        assert "artifacts" in data
        assert "started_at" in data
        assert "finished_at" in data
        assert "exit_code" in data
        paths = {a["path"] for a in data["artifacts"]}
        for name in expected_files:
            assert name in paths
