"""Correlation-tensor-norm entanglement measure for N-qudit states."""

__version__ = "0.1.0"

from .bloch_tensor import (
    bloch_vector,
    correlation_tensor,
    correlation_tensor_density,
    correlation_tensor_symmetric,
    extended_tensor,
    k_mode_product,
    matrix_unfolding,
    reconstruct_density,
    tensor_norm,
)
from .convex_roof import RoofBudget, decomposition_from_isometry, et_mixed
from .errors import BudgetError, DomainError, SymmetryError
from .measure import (
    check_superadditivity,
    concurrence_2qutrit,
    et_from_concurrence_2qutrit,
    et_ghz_closed_form,
    et_pure,
)
from .qudit_state import (
    DensityMatrix,
    PureState,
    ghz_state,
    partial_trace,
    random_pure_state,
    tensor_product,
    to_density,
)
from .su_algebra import GeneratorSet, build_generators, structure_constants
