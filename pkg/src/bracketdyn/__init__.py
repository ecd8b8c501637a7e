"""Exact set-polynomial algebra, bracket polynomials, and desk-scale recurrence.

The package has five working layers:

* ``sets``    - finite index sets, disjoint collections, canonical enumerations;
* ``setpoly`` - polynomial mappings on finite sets via producing functions;
* ``genpoly`` - bracket (generalized) polynomial ASTs and their attribute calculus;
* ``search``  - bounded exhaustive witness searches with verified reports;
* ``nilsys``  - torus skew products and a 2-step nilpotent orbit simulator.

``cli`` exposes the same operations as the ``bracketdyn`` command.
"""

from .sets import (
    EMPTY,
    DisjointCollection,
    FiniteSet,
    d_tuples,
    embed_union,
    fset,
    induced_collection,
    interval,
    nonempty_subsets,
    partitions_into,
    subcollections,
)
from .setpoly import (
    INTEGERS,
    RATIONALS,
    TORUS,
    DegreeCheck,
    QProducing,
    SetMapping,
    SetPolynomial,
    TProducing,
    ValueGroup,
    degree_verify,
    derive,
    integer_vectors,
    iterated_difference,
    q_from_t,
    rational_vectors,
    restrict,
    t_from_q,
)
from .genpoly import (
    ComposedMapping,
    GenPoly,
    GPAttributes,
    GPBracket,
    GPPoly,
    GPProd,
    GPSum,
    NormalForm,
    NotOpenError,
    Poly,
    attributes,
    compose,
    fractional_norm,
    gp_bracket,
    gp_poly,
    gp_prod,
    gp_sum,
    is_constant_free,
    is_open,
    to_normal_form,
)
from .search import (
    BUDGET_HIT,
    DEFAULT_BUDGET,
    EXHAUSTED,
    FOUND,
    BudgetError,
    EmpiricalRReport,
    HitTestReport,
    IPrSet,
    PreconditionError,
    SearchBudget,
    ShiftedIntegerPoly,
    WitnessReport,
    build_ip_r,
    dilated_segment,
    dilated_segment_union,
    empirical_r,
    find_small_alpha,
    gaps_non_decreasing,
    gps_search,
    hits,
    ipstar_hit_test,
    is_polynomial_of_degree,
    skob_search,
    skop_search,
    small_producing_subcollection,
)
from .nilsys import (
    BASE_POINT,
    IDENTITY,
    AffineSkew,
    DeltaReport,
    HeisenbergElement,
    HeisenbergSystem,
    NilPoint,
    PolySeqSystem,
    PolySequence,
    ReturnSet,
    SkewSystem,
    TorusPoint,
    circle_dist,
    delta_hit_test,
    distality_probe,
    heis_mul,
    heis_pow,
    heisenberg_coordinate_gps,
    malcev_reduce,
    nil_metric,
    poly_sequence_eval,
    return_set,
    skew_iterate,
    skew_step,
    system_from_json,
    torus_metric,
    vip_return_test,
)

__version__ = "0.1.0"
