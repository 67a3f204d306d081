"""Minimum-cost hierarchy DAGs over symbol sequences, grown and shrunk
incrementally under mutation, recombination and cost-based selection,
with measurements of hourglass architecture, core stability and the
price of incremental design."""

from .centrality import (
    CoreSet,
    DegenerateError,
    HourglassReport,
    flat_core,
    greedy_core,
    h_score,
    path_centrality,
    robustness_curve,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .dag import (
    DagError,
    DuplicateStringError,
    DuplicateTargetError,
    HierarchyDag,
    IllegalRewriteError,
    NodeKind,
    NotATargetError,
    OverlapError,
    PruneReport,
    ValidationIssue,
)
from .engine import (
    ComparatorRecord,
    EngineError,
    ExperimentResult,
    MetricRecord,
    RunResult,
    RunState,
    analyze_dir,
    clean_slate_compare,
    init_run,
    run_experiment,
    run_replicate,
    step,
)
from .greedy import (
    AppliedRepeat,
    RepeatCandidate,
    apply_repeat,
    best_repeat,
    greedy_build,
    greedy_compress,
)
from .incremental import (
    CostEvaluator,
    ExpansionReport,
    expand,
    incremental_step,
    marginal_cost,
)
from .metrics import (
    StasisReport,
    avg_depth,
    avg_node_length,
    core_stability,
    diversity,
    lev_jaccard,
    levenshtein,
    medoid,
    normalized_cost,
    pid,
    similarity,
    stasis_periods,
)
from .parse import Matcher, Parse, optimal_parse
from .symbols import Alphabet, SymbolString, SymbolTable
from .targetgen import (
    CandidateRecord,
    GenModelConfig,
    StallError,
    TargetBatch,
    gen_m,
    gen_mr,
    gen_mrs,
    gen_ms,
    gen_rnd,
    generate,
    recombinations,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AppliedRepeat",
    "CandidateRecord",
    "ComparatorRecord",
    "ConfigError",
    "CoreSet",
    "CostEvaluator",
    "DagError",
    "DegenerateError",
    "DuplicateStringError",
    "DuplicateTargetError",
    "EngineError",
    "ExpansionReport",
    "ExperimentResult",
    "GenModelConfig",
    "HierarchyDag",
    "HourglassReport",
    "IllegalRewriteError",
    "Matcher",
    "MetricRecord",
    "NodeKind",
    "NotATargetError",
    "OverlapError",
    "Parse",
    "PruneReport",
    "RepeatCandidate",
    "RunConfig",
    "RunResult",
    "RunState",
    "StallError",
    "StasisReport",
    "SymbolString",
    "SymbolTable",
    "ValidationIssue",
    "analyze_dir",
    "apply_repeat",
    "avg_depth",
    "avg_node_length",
    "best_repeat",
    "clean_slate_compare",
    "core_stability",
    "diversity",
    "expand",
    "flat_core",
    "gen_m",
    "gen_mr",
    "gen_mrs",
    "gen_ms",
    "gen_rnd",
    "generate",
    "greedy_build",
    "greedy_compress",
    "greedy_core",
    "h_score",
    "incremental_step",
    "init_run",
    "lev_jaccard",
    "levenshtein",
    "load_config",
    "marginal_cost",
    "medoid",
    "normalized_cost",
    "optimal_parse",
    "parse_config",
    "path_centrality",
    "pid",
    "recombinations",
    "robustness_curve",
    "run_experiment",
    "run_replicate",
    "similarity",
    "stasis_periods",
    "step",
]
