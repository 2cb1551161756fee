"""Pattern-based NLI corpus generation and per-pattern consistency evaluation.

The package covers the full pipeline: a mini-world ontology with
selection restrictions, an XML pattern language, deterministic sample
generation, corpus statistics and pattern-sharing splits, prediction
scoring (accuracy, pattern accuracy and its curve, cartography), and
annotation-aggregation tools (Cohen's kappa, scale mappings, majority
filtering).
"""

from .agreement import (
    ALL_MONOTONE_MAPPINGS,
    MonotoneMapping,
    best_mappings,
    cohen_kappa,
    majority_filter,
)
from .corpus import (
    Corpus,
    CorpusStats,
    SplitSpec,
    compute_stats,
    corpus_from_jsonl,
    corpus_to_jsonl,
    load_corpus,
    make_splits,
    save_corpus,
)
from .demo import demo_patterns_path, demo_world_path, load_demo
from .errors import ParseError, ValidationError
from .metrics import (
    PACurve,
    PredictionRecord,
    PredictionSet,
    breakdown,
    cartography,
    parse_predictions,
    pa_auc,
    pa_curve,
    pattern_accuracy,
    sample_accuracy,
)
from .patterns import (
    InferenceClass,
    Label,
    Pattern,
    Template,
    check_seed,
    load_patterns,
    load_patterns_file,
    patterns_to_xml,
)
from .sampling import (
    Assignment,
    GenerationResult,
    Sample,
    enumerate_assignments,
    generate,
    realize,
)
from .world import ClassExpr, Entity, MiniWorld, Relation, Taxonomy, load_world, load_world_file

__version__ = "0.1.0"

__all__ = [
    "ALL_MONOTONE_MAPPINGS",
    "Assignment",
    "ClassExpr",
    "Corpus",
    "CorpusStats",
    "Entity",
    "GenerationResult",
    "InferenceClass",
    "Label",
    "MiniWorld",
    "MonotoneMapping",
    "PACurve",
    "ParseError",
    "Pattern",
    "PredictionRecord",
    "PredictionSet",
    "Relation",
    "Sample",
    "SplitSpec",
    "Taxonomy",
    "Template",
    "ValidationError",
    "best_mappings",
    "breakdown",
    "cartography",
    "check_seed",
    "cohen_kappa",
    "compute_stats",
    "corpus_from_jsonl",
    "corpus_to_jsonl",
    "demo_patterns_path",
    "demo_world_path",
    "enumerate_assignments",
    "generate",
    "load_corpus",
    "load_demo",
    "load_patterns",
    "load_patterns_file",
    "load_world",
    "load_world_file",
    "majority_filter",
    "make_splits",
    "parse_predictions",
    "pa_auc",
    "pa_curve",
    "pattern_accuracy",
    "patterns_to_xml",
    "realize",
    "sample_accuracy",
    "save_corpus",
]
