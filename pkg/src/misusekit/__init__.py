"""Discriminative subgraph mining and active-learning based API misuse detection."""

from .graphs import (
    DataScope,
    Eaug,
    EaugContext,
    Edge,
    EdgeKind,
    InvalidGraphError,
    Node,
    NodeKind,
    SchemaError,
    apply_eaug_extensions,
    validate_graph,
)
from .dfscode import DfsCode, NotCanonicalizable, graph_of, min_dfs_code
from .isomorphism import is_subgraph
from .corpus import (
    Corpus,
    UsageExample,
    clone_similarity,
    deduplicate,
    load_corpus,
    save_corpus,
    token_bag,
)
from .mining import (
    MinerConfig,
    SubgraphFeature,
    SupportStats,
    chi_square,
    cork_select,
    critical_value,
    filter_significant,
    mine_discriminative,
    mine_frequent,
    significance_upper_bound,
)
from .selection import (
    LabelSession,
    SelectorConfig,
    compute_min_signif,
    coverage,
    initial_sample,
    select_batch,
    stopping_check,
)
from .loop import (
    SessionError,
    load_session,
    save_session,
    start_session,
    step_session,
    submit_labels,
)
from .classify import (
    Decision,
    DegenerateTrainingSet,
    ModelBundle,
    classify,
    grid_search,
    load_model,
    oversample,
    rank_findings,
    save_model,
    train_model,
    vectorize,
)
from .lof import LofModel, default_k

__version__ = "0.1.0"
