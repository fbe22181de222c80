"""Metric Lyapunov exponents for expansive homeomorphisms.

Bowen-ball distortion estimates at points and on compact invariant sets,
adapted hyperbolic metrics, and a handful of built-in example systems.
"""

from .adapted import (
    AdaptedMetricSpec,
    HyperbolicityReport,
    chain_metric,
    eigen_adapted_distance,
    expansivity_pseudometric,
    expansivity_time,
    verify_hyperbolic_inequality,
)
from .classical import ClassicalExponents, compare, jacobian_exponents
from .errors import CloudTooLarge, EmptyBowenSample, InvalidRadius, NotDifferentiable, NotHyperbolic
from .invariant_sets import (
    Classification,
    InvariantSet,
    Label,
    SetExponentReport,
    classify,
    dist_to_set,
    empirical_basin_check,
    set_bowen_filter,
    set_distortion,
    set_duality_check,
    set_exponents,
    subadditivity_check,
)
from .pointwise import (
    DistortionEstimate,
    ExponentReport,
    bowen_filter,
    distortion,
    exponent_sequence,
    lipschitz_bound_check,
    mirrored_duality_check,
    point_exponents,
)
from .space import Chart, DynamicalSystem, OrbitSegment, Point, distance, iterate, orbit, sample_near
from .systems import (
    IrrationalRotation,
    NorthSouthCircle,
    ToralAutomorphism,
    TorusWithHair,
    from_descriptor,
    hair_distance,
    hair_map,
    make_toral,
)

__version__ = "0.1.0"
