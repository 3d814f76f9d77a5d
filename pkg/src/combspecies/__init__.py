"""Combinatorial species systems: well-foundedness, enumeration by Newton
iteration, and numeric evaluation of their generating series."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    WellFoundedReport,
    companion_system,
    is_partially_polynomial,
    is_polynomial,
    is_well_founded,
    is_well_founded_at_zero,
    nonzero_eval,
    zero_coordinates,
)
from .errors import (  # noqa: E402
    CombSpeciesError,
    CompositionUndefined,
    CycDivergent,
    DomainError,
    NonConvergence,
    NotWellFounded,
    SingularLinearSystem,
    SpecError,
    SpecSyntaxError,
    UsageError,
)
from .evaluate import EGF, OGF, egf_eval, ogf_eval  # noqa: E402
from .integral import check_integral_wf, naive_integral_solve, solve_integral, variation_of_constants  # noqa: E402
from .matrix import SeriesMatrix, matrix_inv_newton  # noqa: E402
from .numeric import (  # noqa: E402
    EvalState,
    dominant_system,
    egf_value,
    ogf_value,
    polya_gap,
    polya_tail_length,
    truncation_order,
)
from .parser import SystemSpec, load_system, parse_system  # noqa: E402
from .series import TruncSeries  # noqa: E402
from .solver import joyal_solve, labeled_counts, newton_solve  # noqa: E402
from .symbolic import differentiate, jacobian, substitute  # noqa: E402

__all__ = [
    "__version__",
    "WellFoundedReport",
    "companion_system",
    "is_partially_polynomial",
    "is_polynomial",
    "is_well_founded",
    "is_well_founded_at_zero",
    "nonzero_eval",
    "zero_coordinates",
    "CombSpeciesError",
    "CompositionUndefined",
    "CycDivergent",
    "DomainError",
    "NonConvergence",
    "NotWellFounded",
    "SingularLinearSystem",
    "SpecError",
    "SpecSyntaxError",
    "UsageError",
    "EvalState",
    "dominant_system",
    "egf_value",
    "ogf_value",
    "polya_gap",
    "polya_tail_length",
    "truncation_order",
    "EGF",
    "OGF",
    "egf_eval",
    "ogf_eval",
    "check_integral_wf",
    "naive_integral_solve",
    "solve_integral",
    "variation_of_constants",
    "SeriesMatrix",
    "matrix_inv_newton",
    "SystemSpec",
    "load_system",
    "parse_system",
    "TruncSeries",
    "joyal_solve",
    "labeled_counts",
    "newton_solve",
    "differentiate",
    "jacobian",
    "substitute",
]
