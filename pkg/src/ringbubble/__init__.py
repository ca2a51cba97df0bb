"""Ring-ansatz reduced-energy toolkit for half-space boundary bubbles.

Numerical machinery for the constructive analysis of a prescribed
scalar/mean-curvature problem on the half-space: explicit bubbles and their
linearization kernel, the k-bubble ring ansatz, adaptive/Monte-Carlo
integration engines, every constant of the reduced energy expansion, the
full-versus-reduced energy comparison, and the critical-point search that
witnesses the existence mechanism at finite ring size.
"""

from .errors import (
    BudgetExhausted,
    CenterAtOrigin,
    CoincidentPoints,
    DegenerateAxis,
    DimensionTooSmall,
    DivergentIntegral,
    DomainError,
    EmptyGrid,
    ExponentOutOfRange,
    FitIllConditioned,
    InadmissibleRegime,
    IndexOutOfRange,
    NoInteriorCriticalPoint,
    NonPhysicalD,
    NotAdmissible,
    NotOnBoundary,
    NumericalError,
    OutsideBox,
    ProfileNotPositive,
    RingBubbleError,
    SymmetryMismatch,
    ToleranceNotMet,
    ValidationError,
)
from .model import (
    ProblemParams,
    Regime,
    RegimeTag,
    curvature_H,
    curvature_K,
    mu,
    regime,
    validate,
)
from .bubble import (
    BubbleField,
    BubbleParams,
    KernelField,
    LinearCombinationField,
    RingConfig,
    RingField,
    bubble_derivatives,
    bubble_eval,
    greens_function,
    inversion_map,
    kernel_eval,
    residual,
    ring_points,
    sector_index,
    w_eval,
)
from .quad import (
    HeavyTailMixture,
    I_integral,
    IntegralResult,
    QuadratureSpec,
    adaptive_cubature,
    integrate_mc_halfspace,
    integrate_reduced,
    phi_integral,
    sphere_area,
)
from .coeffs import (
    B0Fit,
    B0_extrapolate,
    B_closed_form,
    ExpansionConstants,
    compute_constants,
    lambda0,
    ring_sum,
    zeta,
)
from .energy import (
    ExpansionCheck,
    JFullResult,
    J_full,
    MCSpec,
    WeightedNormSpec,
    F_reduced,
    F_reduced_grad,
    decay_fit,
    dj_bounds,
    error_field,
    expansion_check,
    pairing_Z,
    sector_grid,
    weighted_norm,
)
from .solver import (
    BoxDj,
    ExistenceReport,
    K0_DEFAULT,
    box_dj,
    construct_report,
    find_critical_point,
)

__version__ = "0.1.0"
