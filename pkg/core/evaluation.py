"""Metrics and significance tests for comparing probabilistic classifiers"""

import logging
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.stats import mannwhitneyu, rankdata
from sklearn.metrics import f1_score

from core.annotations import N_LABELS, Dataset, Label, group_annotations
from core.baselines import ALL, TIE_ORDER, majority_vote
from core.exceptions import ConStanceError, DatasetError
from core.utils import save_json_file

logger = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-15
SCORED_CLASSES = [int(Label.NEG), int(Label.POS)]
EXACT_TEST_LIMIT = 20
CONFIDENCE_PERCENTILES = (2.5, 97.5)


@dataclass
class EvalReport:
    """Average two-class F1 and log-loss of one set of predictions"""

    avg_f1: float
    log_loss: float
    per_item_losses: np.ndarray
    n_items: int

    def to_dict(self) -> Dict:
        return {"avg_f1": self.avg_f1, "log_loss": self.log_loss, "n_items": self.n_items}


@dataclass
class BootstrapResult:
    mean_diff: float
    ci_low: float
    ci_high: float
    significant: bool
    iterations: int


@dataclass
class MannWhitneyResult:
    u_statistic: float
    p_value: float
    exact: bool


@dataclass
class ComparisonReport:
    report_a: EvalReport
    report_b: EvalReport
    mann_whitney: MannWhitneyResult
    bootstrap: BootstrapResult

    def to_dict(self) -> Dict:
        return {
            "a": self.report_a.to_dict(),
            "b": self.report_b.to_dict(),
            "mann_whitney_per_item_loss": asdict(self.mann_whitney),
            "bootstrap_avg_f1_diff": asdict(self.bootstrap),
        }


def _label_array(labels) -> np.ndarray:
    return np.array([int(Label(v)) for v in labels], dtype=int)


def _check_lengths(*arrays) -> None:
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise ConStanceError(f"length mismatch: {sorted(lengths)}")


def log_loss(probs, gold) -> Tuple[float, np.ndarray]:
    """
    Mean negative log-probability of the gold label

    Args:
        probs: (n, 3) probabilities ordered (-1, 0, 1)
        gold: n gold labels

    Returns:
        Tuple of (mean loss, per-item losses)
    """
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    gold = _label_array(gold)
    _check_lengths(probs, gold)
    if probs.shape[1] != N_LABELS:
        raise ConStanceError(f"expected {N_LABELS} probability columns, got {probs.shape[1]}")
    chosen = probs[np.arange(len(gold)), gold + 1]
    losses = -np.log(np.clip(chosen, PROBABILITY_FLOOR, 1.0))
    return float(losses.mean()) if len(losses) else 0.0, losses


def avg_f1(preds, gold) -> float:
    """
    Mean of the F1 scores of classes -1 and 1; an undefined F1 counts as 0

    Args:
        preds: Predicted labels
        gold: Gold labels

    Returns:
        Score in [0, 1]
    """
    preds, gold = _label_array(preds), _label_array(gold)
    _check_lengths(preds, gold)
    return float(f1_score(gold, preds, labels=SCORED_CLASSES, average="macro", zero_division=0))


def predict_labels(probs) -> np.ndarray:
    """Most probable label per row, ties resolved toward 0, then -1"""
    probs = np.atleast_2d(np.asarray(probs, dtype=float))
    best = probs.max(axis=1)
    labels = np.empty(len(probs), dtype=int)
    for row, top in enumerate(best):
        labels[row] = next(int(label) for label in TIE_ORDER if probs[row, label.index] == top)
    return labels


def agreement(dataset: Dataset, scope: str = ALL) -> float:
    """
    Average over items of the share of annotations matching the majority vote

    Args:
        dataset: Annotated items
        scope: A context id, or ALL

    Returns:
        Agreement in (0, 1]

    Raises:
        DatasetError: If no item has annotations in scope
    """
    if scope != ALL and scope not in dataset.contexts:
        raise DatasetError(f"unknown context {scope!r}")
    index = group_annotations(dataset)
    shares: List[float] = []
    for item_id in dataset.item_ids:
        labels = index.labels_for(item_id, None if scope == ALL else scope)
        if not labels:
            continue
        vote = majority_vote(labels)
        shares.append(vote.n_majority / vote.n_votes)
    if not shares:
        raise DatasetError(f"no annotations in scope {scope!r}")
    return float(np.mean(shares))


def bootstrap_f1_diff(preds_a, preds_b, gold, iterations: int = 1000, rng_seed: int = 0) -> BootstrapResult:
    """
    Bootstrap the difference avg_f1(A) - avg_f1(B) over resampled items

    Significance means the 95% percentile interval excludes 0.

    Args:
        preds_a: Predictions of model A
        preds_b: Predictions of model B
        gold: Gold labels
        iterations: Number of resamples
        rng_seed: Seed of the resampling

    Returns:
        BootstrapResult
    """
    preds_a, preds_b, gold = _label_array(preds_a), _label_array(preds_b), _label_array(gold)
    _check_lengths(preds_a, preds_b, gold)
    if iterations < 1:
        raise ConStanceError("iterations must be at least 1")
    if len(gold) == 0:
        raise ConStanceError("cannot bootstrap an empty sample")

    rng = np.random.default_rng(rng_seed)
    n = len(gold)
    diffs = np.empty(iterations)
    for b in range(iterations):
        sample = rng.integers(0, n, size=n)
        diffs[b] = avg_f1(preds_a[sample], gold[sample]) - avg_f1(preds_b[sample], gold[sample])

    low, high = np.percentile(diffs, CONFIDENCE_PERCENTILES)
    return BootstrapResult(
        mean_diff=float(diffs.mean()),
        ci_low=float(low),
        ci_high=float(high),
        significant=bool(low > 0 or high < 0),
        iterations=iterations,
    )


def _exact_p_value(ranks: np.ndarray, n_a: int, u_observed: float) -> float:
    offset = n_a * (n_a + 1) / 2.0
    mean = n_a * (len(ranks) - n_a) / 2.0
    threshold = abs(u_observed - mean) - 1e-9
    extreme = total = 0
    for chosen in combinations(range(len(ranks)), n_a):
        u = ranks[list(chosen)].sum() - offset
        total += 1
        if abs(u - mean) >= threshold:
            extreme += 1
    return extreme / total


def mann_whitney_u(samples_a: Sequence[float], samples_b: Sequence[float]) -> MannWhitneyResult:
    """
    Two-sided Mann-Whitney U test

    U counts pairs where A exceeds B (ties count one half), from midranks of
    the pooled sample. Pooled samples under 20 use exact enumeration of all
    rank assignments; larger ones use the tie-corrected normal approximation.

    Args:
        samples_a: First sample
        samples_b: Second sample

    Returns:
        MannWhitneyResult with U of sample A
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ConStanceError("Mann-Whitney needs two non-empty samples")

    ranks = rankdata(np.concatenate([a, b]))
    u = float(ranks[:a.size].sum() - a.size * (a.size + 1) / 2.0)
    if a.size + b.size < EXACT_TEST_LIMIT:
        return MannWhitneyResult(u, min(1.0, _exact_p_value(ranks, a.size, u)), True)

    result = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic")
    return MannWhitneyResult(u, float(min(1.0, result.pvalue)), False)


def evaluate(probs, gold) -> EvalReport:
    """
    Average F1 of the argmax labels plus log-loss

    Args:
        probs: (n, 3) predicted probabilities
        gold: n gold labels

    Returns:
        EvalReport
    """
    mean_loss, losses = log_loss(probs, gold)
    return EvalReport(
        avg_f1=avg_f1(predict_labels(probs), gold),
        log_loss=mean_loss,
        per_item_losses=losses,
        n_items=len(losses),
    )


def compare(probs_a, probs_b, gold, iterations: int = 1000, rng_seed: int = 0) -> ComparisonReport:
    """
    Evaluate two models on the same items and test their difference

    Per-item log-losses go through the Mann-Whitney test; argmax labels go
    through the bootstrap F1 comparison.
    """
    report_a, report_b = evaluate(probs_a, gold), evaluate(probs_b, gold)
    test = mann_whitney_u(report_a.per_item_losses, report_b.per_item_losses)
    bootstrap = bootstrap_f1_diff(predict_labels(probs_a), predict_labels(probs_b), gold, iterations, rng_seed)
    logger.info(
        f"A: F1 {report_a.avg_f1:.4f} loss {report_a.log_loss:.4f} | B: F1 {report_b.avg_f1:.4f} "
        f"loss {report_b.log_loss:.4f} | Mann-Whitney p {test.p_value:.4g} | "
        f"F1 diff CI [{bootstrap.ci_low:.4f}, {bootstrap.ci_high:.4f}]"
    )
    return ComparisonReport(report_a, report_b, test, bootstrap)


def align_gold(item_ids: Sequence[str], gold: Mapping[str, Label]) -> List[Label]:
    """
    Gold labels in the order of item_ids

    Raises:
        DatasetError: If an item has no gold label
    """
    missing = [item_id for item_id in item_ids if item_id not in gold]
    if missing:
        raise DatasetError(f"{len(missing)} items have no gold label (first: {missing[0]})")
    return [gold[item_id] for item_id in item_ids]


def write_report(path: str, payload: Dict) -> None:
    """JSON report of metric names, values, interval bounds and p-values"""
    save_json_file(path, payload)
    logger.info(f"Wrote report to {path}")
