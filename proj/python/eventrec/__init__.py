"""Event recommendation toolkit for proximity-sensed conference data.

Thin Python surface over the C++ core: similarity and prior kernels,
factor-graph inference with an enumeration oracle, and the batch pipeline
(synth / ingest / recommend / evaluate) driven by JSON configs.
"""

from eventrec._core import (
    ConfigError,
    DataError,
    __version__,
    adjusted_cosine,
    compute_prior,
    exact_marginals,
    generate_synthetic,
    lbp_marginals,
    ndcg,
    normalize_similarity,
    preference_similarity,
    run_evaluate,
    run_ingest,
    run_recommend,
    run_synth,
)

__all__ = [
    "ConfigError",
    "DataError",
    "__version__",
    "adjusted_cosine",
    "compute_prior",
    "exact_marginals",
    "generate_synthetic",
    "lbp_marginals",
    "ndcg",
    "normalize_similarity",
    "preference_similarity",
    "run_evaluate",
    "run_ingest",
    "run_recommend",
    "run_synth",
]
