import json
from pathlib import Path

import numpy as np
import pytest

from hmix.models import GridSpec, HermitianField
from hmix.schemas import ProblemConfig, SolverConfig
from hmix.schemas.descriptor_schema import QuarticDescriptor, RadialQuadraticDescriptor, SumDescriptor
from hmix.services import ContinuationSolver, ProblemService
from tests.test_utils import TestDataFactory

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def rng():
    """Seeded generator so sampled checks are reproducible."""
    return np.random.default_rng(0)


@pytest.fixture
def grid7():
    return GridSpec.cube(2, 7)


@pytest.fixture
def problems():
    return ProblemService()


@pytest.fixture
def solver():
    return ContinuationSolver(SolverConfig())


@pytest.fixture
def quadratic_problem(problems, grid7):
    """u* = |z|^2, n = k = 2, beta_0 = 1/2: beta is the constant 1/4."""
    return problems.manufacture(
        grid7, 2, HermitianField.zeros(grid7), [0.5], RadialQuadraticDescriptor(a=1.0), name="quadratic"
    )


@pytest.fixture
def quartic_problem(problems, grid7):
    """u* = |z|^2 + 0.1 |z_1|^4 with its deflated strict subsolution."""
    ustar = SumDescriptor(terms=[RadialQuadraticDescriptor(a=1.0), QuarticDescriptor(coeff=0.1, component=0)])
    mp = problems.manufacture(grid7, 2, HermitianField.zeros(grid7), [0.5], ustar, name="quartic")
    return mp, problems.deflate_subsolution(mp, 0.01)


@pytest.fixture
def ci_config():
    return ProblemConfig.model_validate_json((CONFIG_DIR / "ci_problem.json").read_text())


@pytest.fixture
def write_config(tmp_path):
    """Write a problem config dict to a temporary JSON file and return its path."""

    def _write(data, name="problem.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return _write


@pytest.fixture
def small_config_data():
    return TestDataFactory.create_problem_config(shape=7, deflate=0.01)
