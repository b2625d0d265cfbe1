"""Coadjoint orbits, moment maps and Borel branching analysis for SU(2,1)."""

from .coadjoint_orbits import (
    NOT_ADMISSIBLE,
    NOT_STRONGLY_REGULAR,
    OrbitDescriptor,
    ReprLabel,
    auslander_kostant_translate,
    b_orbit,
    b_orbit_admissible,
    b1_orbit,
    classify_b_form,
    classify_b1_form,
    orbit_to_repr,
    repr_to_orbit,
)
from .discrete_series import (
    BranchingDecomposition,
    DiscreteSeriesParam,
    SeriesClass,
    branch_to_B,
    branch_to_B1,
    central_character_selects,
    from_harish_chandra,
    weyl_dimension,
)
from .irregular_connection import (
    AmbiguousRank,
    global_l2_dimension,
    split_at_infinity,
    verify_branching_consistency,
)
from .lie_su21 import (
    AlgebraElement,
    DualForm,
    GroupElementB,
    InvalidParameter,
    basis_element,
    bracket,
    coadjoint_b,
    form,
    killing_dualize,
    stabilizer_algebra,
    t_form,
)
from .moment_projection import (
    NotInRegularSet,
    admissible_orbits_in_image,
    holomorphic_cone,
    p1_properness,
    p_properness,
    project_p,
    project_p1,
    r_of_k,
    transversality_dim,
)
from .ode_builder import (
    OdeSystem,
    build_system,
    closed_form_spectrum,
    dump_system,
    to_z_variable,
)
from .regular_singular import (
    BoundaryEigenvalue,
    RadiusError,
    l2_basis_at_zero,
    l2_dimension_at_zero,
    reduce_at_zero,
)
from .symplectic_reduction import (
    ReducedVariety,
    classify_reduced,
    quantize_point,
    reduced_point_coordinate,
    reduced_volume,
)

__version__ = "0.1.0"
