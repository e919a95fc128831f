"""Course review analysis: preprocessing, sentiment, topic models and statistics."""

from ._core import (
    Corpus,
    Error,
    TopicModel,
    coherence_cv,
    coherence_umass,
    label_from_compound,
    load_corpus,
    manova,
    pearson,
    permutation_test,
    preprocess,
    score_corpus,
    spearman,
    train_lda,
    valence_score,
)

__all__ = [
    "Corpus",
    "Error",
    "TopicModel",
    "coherence_cv",
    "coherence_umass",
    "label_from_compound",
    "load_corpus",
    "manova",
    "pearson",
    "permutation_test",
    "preprocess",
    "score_corpus",
    "spearman",
    "train_lda",
    "valence_score",
]
