"""Elliptic solutions of the associative Yang-Baxter equation attached to a matrix ``B`` and ``tau``."""

from .bspec import BSpec, BSpecError, SigmaLattice
from .builder import r_diagonal, r_for, r_general, r_jordan
from .kronecker import Elliptic, Rational, SingularInput, Trigonometric, sigma, sigma_jet
from .nabla import NablaPoly, build_N, exp_nabla_N, nabla_kl, symbolic_table
from .numeric import Jet, SingularSystem
from .solspace import SolElement, normalization_constant, r_from_solspace, res0_inverse_paths
from .tensors import MatTensor, embed, flip, from_linear_map, to_linear_map
from .theta import TorusParam, theta1, theta3
from .verifier import Config, SamplePlan, run_suite

__version__ = "0.1.0"

__all__ = [
    "BSpec",
    "BSpecError",
    "Config",
    "Elliptic",
    "Jet",
    "MatTensor",
    "NablaPoly",
    "Rational",
    "SamplePlan",
    "SigmaLattice",
    "SingularInput",
    "SingularSystem",
    "SolElement",
    "TorusParam",
    "Trigonometric",
    "build_N",
    "embed",
    "exp_nabla_N",
    "flip",
    "from_linear_map",
    "nabla_kl",
    "normalization_constant",
    "r_diagonal",
    "r_for",
    "r_from_solspace",
    "r_general",
    "r_jordan",
    "res0_inverse_paths",
    "run_suite",
    "sigma",
    "sigma_jet",
    "symbolic_table",
    "theta1",
    "theta3",
    "to_linear_map",
]
