"""D-optimal experimental designs by gradient descent on ``-log det(A^T A)``."""

__version__ = "0.1.0"

from .basis import BasisFamily, MultiIndexSet, build_index_set, truncate_to_size  # noqa: E402
from .design import (  # noqa: E402
    Domain,
    ExperimentalDesign,
    assemble_model_matrix,
    get_domain,
    unit_box,
)
from .objective import LogDetState, gradient, objective_value, smw_update  # noqa: E402
from .optimizer import DescentConfig, descend  # noqa: E402
from .samplers import SamplerSpec, sample  # noqa: E402
from .surrogate import Surrogate, fit, rel_error_inf  # noqa: E402

__all__ = [
    "BasisFamily",
    "DescentConfig",
    "Domain",
    "ExperimentalDesign",
    "LogDetState",
    "MultiIndexSet",
    "SamplerSpec",
    "Surrogate",
    "assemble_model_matrix",
    "build_index_set",
    "descend",
    "fit",
    "get_domain",
    "gradient",
    "objective_value",
    "rel_error_inf",
    "sample",
    "smw_update",
    "truncate_to_size",
    "unit_box",
]
