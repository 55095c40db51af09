from .spectrum_model import Spectrum, ConeReport
from .matrix_model import HermitianMatrix, EigenPair
from .operator_model import Coefficients, OperatorEval, OperatorFieldEval
from .grid_model import GridSpec, GridFunction, HermitianField
from .problem_model import ProblemSpec, ManufacturedProblem
from .homotopy_model import HomotopyState

__all__ = [
    "Spectrum",
    "ConeReport",
    "HermitianMatrix",
    "EigenPair",
    "Coefficients",
    "OperatorEval",
    "OperatorFieldEval",
    "GridSpec",
    "GridFunction",
    "HermitianField",
    "ProblemSpec",
    "ManufacturedProblem",
    "HomotopyState",
]
