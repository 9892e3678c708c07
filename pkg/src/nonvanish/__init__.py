"""Two-piece mollifier toolkit for central values of even Dirichlet
L-functions: exact moment main terms, proportion optimization, and
desk-scale verification against brute-force character sums."""

from .central import (
    CentralValueSet,
    central_values_hurwitz,
    central_values_smoothed,
    central_values_vkernel,
    pair_product_afe,
)
from .characters import (
    CharacterTable,
    GaussData,
    batch_twisted_sum,
    enumerate_characters,
    even_orthogonality_rhs,
    even_primitive_pair_sum_exact,
    gauss_root,
)
from .empirical import (
    CensusRecord,
    MollifierValues,
    empirical_moments,
    mollifier_values,
    nonvanishing_census,
)
from .errors import (
    AccuracyError,
    CapacityError,
    DegenerateMollifierError,
    NonvanishError,
    SpecValidationError,
    UnsupportedParameterError,
)
from .kernels import KernelSpec, cutoff_kernel, pair_kernel, power_log_profile
from .moments import (
    Jet11,
    ShiftedMomentResult,
    first_moment_main,
    mollifier_piece_terms,
    nonvanishing_proportion,
    second_moment_main,
    shifted_cross_moment,
    shifted_psi2_first_moment,
    shifted_psi2_square_moment,
    single_mollifier_moments,
)
from .optimize import (
    OptimizationResult,
    QuadraticModel,
    build_forms,
    degree_scan,
    maximize_proportion,
)
from .rpoly import MollifierSpec, RationalPoly, preset_spec
from .sieves import ArithTables, build_tables, divisor_dk, phi_plus, phi_star

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
