"""Cut-and-project schemes, weak model sets, and their desk-scale identities.

The package builds schemes (a physical group, a compact-able internal group,
and a lattice between them), cuts point configurations through windows,
and verifies the computable identities those objects satisfy: exact
densities, window period groups, Haar regularization, quotient schemes,
torus-parameter reconstruction, autocorrelation coefficients, and the
B-free specialization.
"""

from .bfree import (
    BfreeSystem,
    EntropyEstimate,
    bfree_density_exact,
    bfree_sieve,
    build_bfree,
    check_primitive,
    haar_regularity_report,
    hereditary_entropy_estimate,
    scaled_coprime_pair,
)
from .configurations import (
    Configuration,
    TorusParamResult,
    TorusPoint,
    canonical_parameter,
    cfg_from_dict,
    cfg_to_dict,
    density_bound,
    empirical_density,
    generate,
    is_continuity_point,
    is_maximal_density,
    minimal_window,
    pattern_frequency,
    pattern_prediction,
    sample_mirsky,
    torus_parameters,
    translate_internal,
    write_points_csv,
)
from .diffraction import (
    AutocorrRow,
    AutocorrTable,
    autocorr_empirical,
    autocorr_exact,
    autocorr_spectrum,
    write_autocorr_csv,
)
from .errors import BudgetError, DescriptorError, RefusalError
from .groups import (
    InternalGroup,
    Subgroup,
    cyclic_product,
    euclidean,
    sample_haar,
    torus,
)
from .quotient import (
    MefDescriptor,
    QuotientScheme,
    mef_descriptor,
    quotient_scheme,
    quotient_window,
    verify_projection_identity,
)
from .scheme import (
    LatticePoint,
    Region,
    Scheme,
    build_scheme,
    lattice_density,
    lattice_points_in,
    van_hove,
)
from .window import (
    CylinderWindow,
    FiniteWindow,
    IntervalWindow,
    Window,
    as_finite,
    cylinder_window,
    empty_window,
    finite_window,
    half_open_window,
    interval_window,
    point_window,
)

__version__ = "0.1.0"
