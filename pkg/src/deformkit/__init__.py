"""deformkit: deformed products, matrix-symbol operators, and norm hierarchies.

The package discretizes matrix-valued symbols on boxes, implements the
deformed (twisted) product driven by an antisymmetric matrix J, realizes
symbols as operators on a discretized module, and evaluates the
differential norm hierarchy together with its comparison functionals.
"""

from .coeff_algebra import (
    MatrixElement,
    UnitizedElement,
    cstar_norm,
    seminorm_from_rep,
    smooth_calculus,
    spectral_invariance_check,
    spectral_radius,
    spectral_smoothing,
    spectrum,
    unitized_inverse,
    unitized_spectrum,
)
from .errors import (
    BoxMismatchError,
    ConvergenceError,
    DecayViolationError,
    DeformkitError,
    DivideByZeroError,
    GridMismatchError,
    NoConvergenceError,
    NotHomomorphismError,
    NotSelfAdjointError,
    OrderTooHighError,
    SingularError,
    UnsupportedOperatorError,
)
from .symbols import (
    DeformationMatrix,
    GridPhaseSymbol,
    GridSymbol,
    ModuleVector,
    PlaneWavePhaseSymbol,
    PlaneWaveSymbol,
    default_grid_size,
    derivative,
    fourier,
    inner_product,
    norm_2,
    norm_L2,
    read_symbol_file,
    seminorm_B,
    seminorm_S,
    sup_norm,
    symbol_star,
    write_symbol_file,
)
from .deformation import (
    OscIntegralConfig,
    deformed_product_exact,
    deformed_product_numeric,
    fourier_inversion_check,
    oscillatory_pair_integral,
    symbol_compose,
    symbol_dagger,
    tilde_map,
)
from .pseudodiff import (
    DiscretizedOperator,
    adjoint,
    cv_functional,
    cv_ratio,
    fourier_operator,
    multiplication_operator,
    multiplier_operator,
    op_apply,
    op_from_phase_terms,
    operator_norm,
    phase_sup,
    rieffel_operator,
    right_multiply,
)
from .heisenberg import (
    DifferentialNormReport,
    HeisenbergElement,
    adu_conjugate,
    d_apply,
    d_inverse,
    delta_symbol,
    differential_norm_T,
    differential_norms,
    gamma1,
    gamma2,
    gamma2_prime,
    heisenberg_act,
    inverse_cv_bound,
    kernel_identity_residual,
    kernel_u,
    kernel_v,
    rho_m,
    shifted_symbol,
    symbol_map_S,
)

__version__ = "0.1.0"
