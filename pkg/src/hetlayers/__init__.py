"""Variational solver for minimal connecting orbits and heteroclinic double layers."""

__version__ = "0.1.0"

from .grids import Grid1D, Grid2D
from .potential import (
    PotentialDescriptor,
    SampleSpec,
    decoupled_quartic,
    elliptic_well,
    verify_double_well,
)
from .heteroclinic import (
    ActionRef,
    DecayFit,
    Heteroclinic,
    HeteroclinicSet,
    Path1D,
    action_gradient,
    build_heteroclinic_set,
    discrete_action,
    fit_decay,
    first_integral_residual,
    min_translation_distance,
    minimize_heteroclinic,
    pin_translation,
    segment_profile,
)
from .effective import (
    baseline_profile,
    dist_to_set,
    excess_action,
    excess_action_expanded,
    frechet_apply,
)
from .layer2d import (
    Field2D,
    ball_project,
    class_certificate,
    equipartition_profile,
    layer_decay_fit,
    minimize_layer,
    pde_residual,
    renormalized_action,
    strip_energy,
)
from .fourth_order import (
    Field2D4,
    equipartition_profile4,
    layer_decay_fit4,
    minimize_layer4,
    renormalized_action4,
    strip_energy4,
    weak_residual,
)
from .abstract_orbit import (
    AbstractOrbit,
    class_membership,
    nonsmooth_orbit,
    orbit_action,
    reparameterize,
    segment_orbit,
)
from .errors import (
    InternalConsistencyError,
    NonConvergenceError,
    PartitionError,
    PinningError,
    SolverError,
    UnsupportedOperation,
)
