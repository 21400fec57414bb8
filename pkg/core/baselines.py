"""Majority-vote baselines and the dataset transforms behind the ablations"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional

import numpy as np

from core.annotations import ALL, LABELS, AnnotationRecord, Dataset, Label, group_annotations
from core.classifier import ClassifierSpec, ProbabilisticClassifier, TrainSet
from core.exceptions import ConStanceError, DatasetError
from core.utils import write_table

logger = logging.getLogger(__name__)

MASKED_CONTEXT = "masked"
MASKED_ANNOTATOR = "masked"
ABLATION_PRIOR = (0.45, 0.1, 0.45)
VOTE_COLUMNS = ("item_id", "label", "n_votes", "n_majority", "full_agreement")

# Preference among tied labels: Neutral, then -1, then 1
TIE_ORDER = (Label.NEUTRAL, Label.NEG, Label.POS)


@dataclass(frozen=True)
class VoteResult:
    """Outcome of a majority vote over one item's labels"""

    item_id: Optional[str]
    winning_label: Label
    vote_counts: Mapping[Label, int]
    full_agreement: bool

    @property
    def n_votes(self) -> int:
        return sum(self.vote_counts.values())

    @property
    def n_majority(self) -> int:
        return self.vote_counts[self.winning_label]


def majority_vote(labels: Iterable, item_id: Optional[str] = None) -> VoteResult:
    """
    Majority label with ties broken toward 0, then -1

    Args:
        labels: Non-empty labels
        item_id: Identifier recorded on the result

    Returns:
        VoteResult with counts for every label in V

    Raises:
        ConStanceError: If labels is empty
    """
    counts = {label: 0 for label in LABELS}
    for value in labels:
        counts[Label(value)] += 1
    total = sum(counts.values())
    if total == 0:
        raise ConStanceError("majority vote needs at least one label")

    top = max(counts.values())
    winner = next(label for label in TIE_ORDER if counts[label] == top)
    return VoteResult(item_id, winner, counts, top == total)


def _check_context(dataset: Dataset, context_id: str) -> None:
    if context_id not in dataset.contexts:
        raise DatasetError(f"unknown context {context_id!r}; known: {', '.join(dataset.contexts)}")


def per_context_labels(dataset: Dataset, context_id: str = ALL) -> Dict[str, VoteResult]:
    """
    Majority-vote label per item over one context or over all of them

    Args:
        dataset: Annotated items
        context_id: A context id, or ALL for the combined condition

    Returns:
        item_id -> VoteResult, in item order; items without labels in the
        selected context are omitted
    """
    if context_id != ALL:
        _check_context(dataset, context_id)
    index = group_annotations(dataset)
    votes: Dict[str, VoteResult] = {}
    for item_id in dataset.item_ids:
        labels = index.labels_for(item_id, None if context_id == ALL else context_id)
        if labels:
            votes[item_id] = majority_vote(labels, item_id)
    return votes


def _relabel(dataset: Dataset, **fields) -> Dataset:
    records = [
        AnnotationRecord(
            record.item_id,
            fields.get("context_id", record.context_id),
            fields.get("annotator_id", record.annotator_id),
            record.label,
        )
        for record in dataset.annotations
    ]
    return dataset.with_annotations(records)


def mask_contexts(dataset: Dataset) -> Dataset:
    """Collapse every context into one sentinel context"""
    masked = _relabel(dataset, context_id=MASKED_CONTEXT)
    logger.info(f"Masked {len(dataset.contexts)} contexts into {MASKED_CONTEXT!r}")
    return masked


def mask_annotators(dataset: Dataset) -> Dataset:
    """Collapse every annotator into one sentinel annotator"""
    masked = _relabel(dataset, annotator_id=MASKED_ANNOTATOR)
    logger.info(f"Masked {len(dataset.annotators)} annotators into {MASKED_ANNOTATOR!r}")
    return masked


def filter_context(dataset: Dataset, context_id: str) -> Dataset:
    """
    Keep only the annotations of one context

    Items left without annotations are dropped.

    Raises:
        DatasetError: If the context is unknown
    """
    _check_context(dataset, context_id)
    kept = [record for record in dataset.annotations if record.context_id == context_id]
    filtered = dataset.with_annotations(kept)
    logger.info(
        f"Filtered to context {context_id!r}: {len(kept)} of {len(dataset.annotations)} annotations, "
        f"{filtered.n_items} of {dataset.n_items} items"
    )
    return filtered


def train_vote_baseline(
    dataset: Dataset,
    context_id: str = ALL,
    classifier_spec: Optional[ClassifierSpec] = None,
    rng_seed: int = 0,
) -> ProbabilisticClassifier:
    """
    Train the classifier on majority-vote labels of one context (or ALL)

    Args:
        dataset: Annotated items
        context_id: Context whose votes become training labels, or ALL
        classifier_spec: Classifier to train
        rng_seed: Training seed

    Returns:
        Fitted classifier
    """
    classifier_spec = classifier_spec or ClassifierSpec()
    votes = per_context_labels(dataset, context_id)
    rows = [dataset.item_index[item_id] for item_id in votes]
    features = dataset.feature_matrix()[np.asarray(rows)]
    labels = np.array([int(vote.winning_label) for vote in votes.values()])
    logger.info(f"Training {classifier_spec.kind} baseline on {len(rows)} majority labels ({context_id})")
    return classifier_spec.train(TrainSet(features, labels), rng_seed)


def write_votes(votes: Mapping[str, VoteResult], path: str) -> None:
    """Vote file: item_id,label,n_votes,n_majority,full_agreement"""
    rows = (
        [item_id, int(vote.winning_label), vote.n_votes, vote.n_majority, str(vote.full_agreement).lower()]
        for item_id, vote in votes.items()
    )
    write_table(path, VOTE_COLUMNS, rows)
