"""Spectral tools for the Schrödinger equation with an inverse-square potential.

The package evaluates the propagator in its Hankel-transform representation
(per spherical-harmonic mode), and provides the numerical experiments that
exercise weighted maximal estimates, their sharpness construction, and the
supporting special-function machinery.
"""

from .errors import (
    AccuracyError,
    AliasingWarning,
    DegenerateDataError,
    DomainError,
    GridError,
    InvsqError,
    ResolutionError,
    SpectralRangeError,
    TruncationWarning,
)
from .hankel import (
    ModeField,
    PotentialSetup,
    RadialGrid,
    apply_a_nu,
    export_grid_csv,
    export_kernel,
    grid_inner,
    grid_norm,
    hankel_transform,
    import_grid_csv,
    import_kernel,
    make_grid,
    order_of_mode,
)
from .specfun import (
    BesselInterpolant,
    BoundReport,
    RegimeTag,
    bessel_j,
    bessel_j_batch,
    check_regime_bound,
    classify_regime,
    dyadic_l2,
)

__version__ = "0.1.0"
