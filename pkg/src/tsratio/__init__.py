"""Top-scientist ratios and productivity rankings of universities."""

from .corpus import (
    AuthorSlot,
    Corpus,
    CreditScheme,
    FieldTaxonomy,
    Professor,
    Publication,
    load_corpus,
    validate_corpus,
    years_active,
)
from .errors import ComputationError, CorpusError
from .ranking import Metric, build_ranking, compare_rankings, pearson, quartile_of, spearman
from .scoring import Scope, percentile_rank, score_professors, university_scores

__version__ = "0.1.0"

__all__ = [
    "AuthorSlot", "Corpus", "CreditScheme", "FieldTaxonomy", "Professor", "Publication",
    "load_corpus", "validate_corpus", "years_active",
    "ComputationError", "CorpusError",
    "Metric", "build_ranking", "compare_rankings", "pearson", "quartile_of", "spearman",
    "Scope", "percentile_rank", "score_professors", "university_scores",
]
