"""Rich nowhere-zero flows on multigraphs: constructive synthesis with full
verification, plus independent exact brute-force oracles."""

from .errors import (
    AdmissibilityError,
    BudgetExhaustedError,
    GraphInputError,
    InternalDefectError,
    PreconditionError,
)
from .multigraph import (
    AdmissibilityVerdict,
    Circuit,
    CircuitChain,
    Edge,
    Multigraph,
    bridges,
    edge_connectivity_at_least,
    enumerate_two_edge_cuts,
    find_attachable_block,
    find_circuit_chain,
    find_circuit_through,
    format_multigraph,
    is_connected,
    is_rich_flow_admissible,
    parse_multigraph,
    validate_circuit,
    validate_circuit_chain,
)
from .flowalg import (
    AdjacentPair,
    Flow,
    FlowReport,
    GroupTag,
    PairRelation,
    RichnessChecks,
    adjacent_pairs,
    chain_edges,
    is_rich,
    linear_combine,
    make_adjacent_pair,
    modular_to_integer,
    pair_relation,
    product_flows,
    project_flow,
    read_flow_json,
    rich_report,
    send_through_circuit,
    strongly_intersecting,
    verify_flow,
    write_flow_json,
    zero_flow,
)
from .seymour import (
    PairSet,
    SplitMap,
    build_pair_splitting,
    flow_avoiding_confluence,
    nowhere_zero_z6,
    validate_pair_set,
)
from .synthesis import (
    AddBlockChain,
    AddChord,
    AddVertex,
    BuildingPhiResult,
    RichFlowCertificate,
    RichModFlowResult,
    Tower,
    TwoCutSplit,
    build_tower,
    building_phi,
    rich_mod_flow,
    split_on_two_cut,
    synthesize_rich_flow,
    verify_mod_flow_bullets,
)
from .oracle import (
    ExactResult,
    SearchBudget,
    brute_force_flow,
    chromatic_index,
    exact_rich_flow_number,
)

__version__ = "0.1.0"
