"""crnkit: reaction-network analysis for autocatalytic mass-action systems.

Structural side (exact rational arithmetic): reaction networks as
integer-embedded directed graphs, linkage classes, weak reversibility,
production graphs, convex-geometric endotacticity tests with certificates,
dynamic equivalence, and weakly reversible realizations by reaction
splitting. Numerical side (numpy/scipy): adaptive integration with blow-up
detection, relative-population dynamics, and empirical permanence probes.
"""

from .network import (
    Complex,
    NetworkError,
    ProductionGraph,
    Reaction,
    ReactionNetwork,
    Species,
    compatibility_class_contains,
    is_bimolecular_autocatalytic,
    is_reversible,
    is_strongly_connected,
    is_weakly_reversible,
    linkage_classes,
    pairwise_production_check,
    production_graph,
    species_closure,
    stoichiometric_subspace,
)
from .io import ParseError, format_network, format_system, parse_network, parse_system
from .polynomials import Monomial, PolynomialField, SparsePolynomial
from .dynamics import (
    ConstantRate,
    EquivalenceReport,
    MassActionSystem,
    VariableRate,
    dynamically_equivalent,
    homogeneous_degree,
    is_mass_action_field,
    mass_action_field,
    projectivize_field,
    realize_field,
    relative_network,
    split_reaction,
    wr_realize,
)
from .geometry import (
    Face,
    GeometryError,
    SweepVerdict,
    affine_dim,
    candidate_directions,
    classify_truncated_face,
    endotactic_sampled,
    enumerate_proper_faces,
    parallel_sweep_sampled,
    sources_contain_all_vertices,
    strongly_endotactic_exact,
    truncated_simplex,
)
from .simulate import (
    IntegrateOptions,
    IntegrationError,
    PermanenceReport,
    Trajectory,
    VariableRateProfile,
    check_projectivization_identity,
    estimate_liminf,
    integrate,
    permanence_probe,
)
from . import families

__version__ = "0.1.0"
