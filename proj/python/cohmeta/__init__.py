"""Meta-evaluation of summary coherence measures."""

from ._cohmeta import (
    CoverageError,
    DataError,
    ScoreDataset,
    __version__,
    bias_matrix,
    confounder_report,
    confounder_scores,
    detect_entities,
    entity_graph_score,
    evaluate,
    generate_synthetic,
    human_scores,
    kendall_tau_b,
    load_dataset,
    load_predictions,
    pairwise_accuracy,
    shuffle_sentences,
)

__all__ = [
    "CoverageError",
    "DataError",
    "ScoreDataset",
    "__version__",
    "bias_matrix",
    "confounder_report",
    "confounder_scores",
    "detect_entities",
    "entity_graph_score",
    "evaluate",
    "generate_synthetic",
    "human_scores",
    "kendall_tau_b",
    "load_dataset",
    "load_predictions",
    "pairwise_accuracy",
    "shuffle_sentences",
]
