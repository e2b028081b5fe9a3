"""Path-complete graph toolkit: labeled-digraph lifts, simulation search,
and certified quadratic bounds on the joint spectral radius of switched
linear systems."""

from .errors import BudgetError, GraphError, ParseError, SamplingError
from .gallery import GALLERY, GalleryEntry, gallery_graph
from .graph_io import load_graph, parse_graph, render_graph, save_graph, to_dot
from .graphs import (
    Alphabet,
    Assumption1Report,
    Base,
    LabeledDigraph,
    LabeledEdge,
    MSet,
    NodeId,
    Word,
    check_assumption1,
    disjoint_union,
    find_isomorphism,
    is_path_complete,
    is_sink_free,
    is_source_free,
    is_strongly_connected,
    is_weakly_connected,
    isomorphic,
    node_key,
    parse_node,
    render_node,
    satisfies_assumption1,
    shortest_unreadable_word,
    transpose,
)
from .lifts import (
    TransitiveLiftGraph,
    bwd_comp_lift,
    comp_lift_union,
    fwd_comp_lift,
    sum_lift,
    transitive_comp_lift,
)
from .lmi import (
    JsrResult,
    LmiProblem,
    MatrixSet,
    QuadCertificate,
    assemble_lmi,
    contraction_horizon,
    horizon_graph,
    load_matrix_set,
    rho_upper,
    save_certificate,
    save_matrix_set,
    sdp_feasible,
    verify_certificate,
    word_product_certificate,
)
from .numerics import (
    RngStream,
    operator_norm,
    sample_stable_invertible_pair,
    spectral_radius,
    sym_eigvals,
)
from .simulation import (
    LiftSimVerdict,
    SimulationWitness,
    find_simulation,
    simulates_comp_lift,
    simulates_sum_lift,
)

__version__ = "0.1.0"
