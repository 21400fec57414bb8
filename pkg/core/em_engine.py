"""Block EM over joint latent configurations (Y_i, S_i^1..S_i^C)"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from core.annotations import N_LABELS, AnnotationIndex, Dataset, Item, Label, group_annotations
from core.baselines import majority_vote
from core.classifier import ClassifierSpec, TrainSet, predict_proba
from core.data_validator import PROBABILITY_COLUMNS, AnnotationDataValidator
from core.decorators import log_execution_time, validate_probability_output
from core.exceptions import ConfigError, ConStanceError, LikelihoodError, MonotonicityError
from core.noise_model import (
    DEFAULT_DIAG_MASS,
    DEFAULT_SMOOTHING,
    ModelParameters,
    TransitionMatrix,
    renormalize_rows,
)
from core.utils import format_real, write_lines, write_table

logger = logging.getLogger(__name__)

DEFAULT_LABEL_PRIOR = (0.495, 0.01, 0.495)
PROBABILITY_HEADER = ",".join(PROBABILITY_COLUMNS)


@dataclass(frozen=True)
class LatentConfiguration:
    """One joint setting T_i = (Y_i, S_i): true label plus one label per annotated context"""

    y: Label
    s: Tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "y", Label(self.y))
        object.__setattr__(self, "s", tuple(Label(v) for v in self.s))

    @property
    def indices(self) -> Tuple[int, ...]:
        """Position of this configuration in an item's posterior tensor"""
        return (self.y.index,) + tuple(v.index for v in self.s)


@dataclass(frozen=True)
class FitConfig:
    """EM settings"""

    max_iterations: int = 100
    rel_tolerance: float = 1e-6
    samples_per_item: int = 10
    label_prior: Tuple[float, ...] = DEFAULT_LABEL_PRIOR
    rng_seed: int = 0
    smoothing: float = DEFAULT_SMOOTHING
    init_diag_mass: float = DEFAULT_DIAG_MASS
    monotonic_slack: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "label_prior", tuple(float(p) for p in self.label_prior))
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if self.rel_tolerance <= 0:
            raise ConfigError("rel_tolerance must be positive")
        if self.samples_per_item < 1:
            raise ConfigError("samples_per_item must be at least 1")
        if self.smoothing < 0:
            raise ConfigError("smoothing cannot be negative")
        if self.monotonic_slack < 0:
            raise ConfigError("monotonic_slack cannot be negative")
        prior = np.asarray(self.label_prior)
        if prior.shape != (N_LABELS,) or np.any(prior <= 0) or abs(prior.sum() - 1.0) > 1e-9:
            raise ConfigError(f"label_prior must be {N_LABELS} positive values summing to 1")


class PosteriorTable:
    """
    Per-item posterior tau over joint configurations.

    Each item holds a tensor of shape (3,) * (|C_i| + 1): axis 0 is y and
    axis j + 1 is the label under the item's j-th context.
    """

    def __init__(self, tables: Dict[str, Tuple[Tuple[str, ...], np.ndarray]]):
        self._tables = tables

    @property
    def item_ids(self) -> List[str]:
        return list(self._tables)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._tables

    def __len__(self) -> int:
        return len(self._tables)

    def _entry(self, item_id: str) -> Tuple[Tuple[str, ...], np.ndarray]:
        try:
            return self._tables[item_id]
        except KeyError:
            raise ConStanceError(f"item {item_id!r} is not in the posterior table")

    def contexts_of(self, item_id: str) -> Tuple[str, ...]:
        return self._entry(item_id)[0]

    def tensor(self, item_id: str) -> np.ndarray:
        return self._entry(item_id)[1]

    def probability(self, item_id: str, config: LatentConfiguration) -> float:
        contexts, tau = self._entry(item_id)
        if len(config.s) != len(contexts):
            raise ConStanceError(f"configuration has {len(config.s)} context labels, item has {len(contexts)}")
        return float(tau[config.indices])

    def configurations(self, item_id: str) -> Iterator[Tuple[LatentConfiguration, float]]:
        """All |V|^(|C_i|+1) configurations of an item with their probabilities"""
        _, tau = self._entry(item_id)
        for position in np.ndindex(tau.shape):
            config = LatentConfiguration(
                Label.from_index(position[0]), tuple(Label.from_index(p) for p in position[1:])
            )
            yield config, float(tau[position])

    @validate_probability_output()
    def marginal_y(self, item_id: str) -> np.ndarray:
        _, tau = self._entry(item_id)
        return tau.reshape(N_LABELS, -1).sum(axis=1)

    def marginals(self) -> np.ndarray:
        """(N, 3) matrix of marginal_y in item order"""
        return np.vstack([self.marginal_y(item_id) for item_id in self._tables])


@dataclass(frozen=True)
class _ContextGroup:
    context_id: str
    annotator_ids: Tuple[str, ...]
    label_indices: np.ndarray


class _LatentLayout:
    """Per-item context groups in the order used by the posterior tensors"""

    def __init__(self, dataset: Dataset, index: Optional[AnnotationIndex] = None):
        index = index or group_annotations(dataset)
        self.index = index
        self.groups: Dict[str, List[_ContextGroup]] = {}
        for item_id in dataset.item_ids:
            groups = []
            for context_id in index.contexts_of(item_id):
                pairs = index[(item_id, context_id)]
                groups.append(_ContextGroup(
                    context_id,
                    tuple(a for a, _ in pairs),
                    np.array([label.index for _, label in pairs], dtype=int),
                ))
            self.groups[item_id] = groups

    def log_context_factors(self, item_id: str, params: ModelParameters) -> List[np.ndarray]:
        """
        For each context of an item, the 3x3 matrix log(gamma[y, s] * prod_a alpha_a[s, r_a])
        """
        factors = []
        for group in self.groups[item_id]:
            log_gamma = params.gamma_for(group.context_id).log()
            annotator_term = np.zeros(N_LABELS)
            for annotator_id, r in zip(group.annotator_ids, group.label_indices):
                annotator_term = annotator_term + params.alpha_for(annotator_id).log()[:, r]
            factors.append(log_gamma + annotator_term[None, :])
        return factors


def _log_joint_tensor(log_m: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    k = len(factors)
    tensor = log_m.reshape((N_LABELS,) + (1,) * k)
    for j, factor in enumerate(factors):
        shape = [1] * (k + 1)
        shape[0] = N_LABELS
        shape[j + 1] = N_LABELS
        tensor = tensor + factor.reshape(shape)
    return tensor


def _safe_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


@validate_probability_output()
def apply_label_prior(probs, prior) -> np.ndarray:
    """
    Multiply class probabilities by a label prior and renormalize

    Args:
        probs: Probability vector over V, or (N, 3) matrix of them
        prior: Prior over V with positive entries

    Returns:
        Renormalized elementwise product, same shape as probs

    Raises:
        LikelihoodError: If a product has zero total mass
    """
    weighted = np.asarray(probs, dtype=float) * np.asarray(prior, dtype=float)
    totals = weighted.sum(axis=-1, keepdims=True)
    if np.any(totals <= 0):
        raise LikelihoodError("label prior leaves zero total probability mass")
    return weighted / totals


def class_probabilities(
    dataset: Dataset,
    params: ModelParameters,
    item_probs: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    The M_y(x_i) term for every item: classifier output composed with the label prior

    Args:
        dataset: Items to score
        params: Parameters holding the classifier and prior
        item_probs: Optional (N, 3) override used before any classifier exists

    Returns:
        (N, 3) matrix in item order
    """
    if item_probs is not None:
        probs = np.asarray(item_probs, dtype=float)
        if probs.shape != (dataset.n_items, N_LABELS):
            raise ConStanceError(f"item_probs must have shape ({dataset.n_items}, {N_LABELS})")
        return probs
    if params.classifier is None:
        raise ConStanceError("parameters carry no classifier and no item probabilities were given")
    return predict(params, dataset.feature_matrix())


def predict(params: ModelParameters, features) -> np.ndarray:
    """
    Out-of-sample class probabilities from a fitted model

    Args:
        params: Fitted parameters
        features: (n, d) feature matrix

    Returns:
        (n, 3) probabilities with the label prior applied
    """
    if params.classifier is None:
        raise ConStanceError("parameters carry no classifier")
    return apply_label_prior(params.classifier.predict_proba(features), params.label_prior)


def joint_config_likelihood(
    item: Item,
    config: LatentConfiguration,
    annotations: AnnotationIndex,
    params: ModelParameters,
    item_probs: Optional[np.ndarray] = None,
) -> float:
    """
    M_y(x_i) * prod_c gamma^c[y, s_c] * prod_a alpha^a[s_c, r] for one fixed configuration

    Args:
        item: The item
        config: Joint configuration; one s entry per context the item was annotated in
        annotations: Grouped annotations of the item's dataset
        params: Current parameters
        item_probs: Optional length-3 override of the classifier term

    Returns:
        Non-negative likelihood

    Raises:
        ModelParameterError: If a referenced gamma or alpha is missing
    """
    contexts = annotations.contexts_of(item.item_id)
    if len(config.s) != len(contexts):
        raise ConStanceError(
            f"configuration has {len(config.s)} context labels but item {item.item_id} has {len(contexts)} contexts"
        )
    if item_probs is None:
        if params.classifier is None:
            raise ConStanceError("parameters carry no classifier and no item probabilities were given")
        item_probs = apply_label_prior(predict_proba(params.classifier, item.features), params.label_prior)

    value = float(item_probs[config.y.index])
    for context_id, s in zip(contexts, config.s):
        value *= params.gamma_for(context_id)[config.y.index, s.index]
        for annotator_id, r in annotations[(item.item_id, context_id)]:
            value *= params.alpha_for(annotator_id)[s.index, r.index]
    return float(value)


def _item_log_likelihoods(
    dataset: Dataset,
    params: ModelParameters,
    layout: _LatentLayout,
    log_probs: np.ndarray,
) -> np.ndarray:
    # The sum over configurations factorizes: sum_y M_y prod_c sum_s (...)
    values = np.empty(dataset.n_items)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, item_id in enumerate(dataset.item_ids):
            per_y = log_probs[i].copy()
            for factor in layout.log_context_factors(item_id, params):
                per_y += logsumexp(factor, axis=1)
            values[i] = logsumexp(per_y)
    return values


def incomplete_data_log_likelihood(
    dataset: Dataset,
    params: ModelParameters,
    item_probs: Optional[np.ndarray] = None,
    layout: Optional[_LatentLayout] = None,
) -> float:
    """
    Sum over items of the log of the total likelihood of all configurations

    Args:
        dataset: Annotated items
        params: Parameters covering every context and annotator
        item_probs: Optional (N, 3) override of the classifier term
        layout: Cached grouping (built when None)

    Returns:
        Log-likelihood

    Raises:
        LikelihoodError: If some item has zero total configuration mass
    """
    params.check_covers(dataset)
    layout = layout or _LatentLayout(dataset)
    log_probs = _safe_log(class_probabilities(dataset, params, item_probs))
    values = _item_log_likelihoods(dataset, params, layout, log_probs)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise LikelihoodError(
            f"item {dataset.item_ids[bad[0]]} has zero total configuration mass"
        )
    return float(values.sum())


@log_execution_time()
def e_step(
    dataset: Dataset,
    params: ModelParameters,
    item_probs: Optional[np.ndarray] = None,
    layout: Optional[_LatentLayout] = None,
) -> PosteriorTable:
    """
    Posterior over every joint configuration of every item (Bayes' rule)

    Args:
        dataset: Annotated items
        params: Current parameters
        item_probs: Optional (N, 3) override of the classifier term
        layout: Cached grouping (built when None)

    Returns:
        PosteriorTable whose per-item tensors sum to 1

    Raises:
        LikelihoodError: If some item has zero total configuration mass
    """
    params.check_covers(dataset)
    layout = layout or _LatentLayout(dataset)
    log_probs = _safe_log(class_probabilities(dataset, params, item_probs))

    tables: Dict[str, Tuple[Tuple[str, ...], np.ndarray]] = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, item_id in enumerate(dataset.item_ids):
            factors = layout.log_context_factors(item_id, params)
            log_joint = _log_joint_tensor(log_probs[i], factors)
            log_total = logsumexp(log_joint)
            if not np.isfinite(log_total):
                raise LikelihoodError(f"item {item_id} has zero total configuration mass")
            tau = np.exp(log_joint - log_total)
            tau /= tau.sum()
            contexts = tuple(group.context_id for group in layout.groups[item_id])
            tables[item_id] = (contexts, tau)
    return PosteriorTable(tables)


def marginal_y(posterior: PosteriorTable, item_id: str) -> np.ndarray:
    """
    Posterior distribution of the true label with the context labels summed out

    Args:
        posterior: E-step output
        item_id: Item to marginalize

    Returns:
        Length-3 vector ordered (-1, 0, 1)
    """
    return posterior.marginal_y(item_id)


def _other_axes(ndim: int, keep: Sequence[int]) -> Tuple[int, ...]:
    return tuple(axis for axis in range(ndim) if axis not in keep)


def gamma_counts(dataset: Dataset, posterior: PosteriorTable) -> Dict[str, np.ndarray]:
    """Weighted (y, s) counts per context: sum over items of tau mass with Y=y, S^c=s"""
    counts = {context_id: np.zeros((N_LABELS, N_LABELS)) for context_id in dataset.contexts}
    for item_id in dataset.item_ids:
        contexts, tau = posterior.contexts_of(item_id), posterior.tensor(item_id)
        for j, context_id in enumerate(contexts):
            counts[context_id] += tau.sum(axis=_other_axes(tau.ndim, (0, j + 1)))
    return counts


def alpha_counts(dataset: Dataset, posterior: PosteriorTable, index: Optional[AnnotationIndex] = None) -> Dict[str, np.ndarray]:
    """Weighted (s, r) counts per annotator over that annotator's labels in any context"""
    index = index or group_annotations(dataset)
    counts = {annotator_id: np.zeros((N_LABELS, N_LABELS)) for annotator_id in dataset.annotators}
    for item_id in dataset.item_ids:
        contexts, tau = posterior.contexts_of(item_id), posterior.tensor(item_id)
        for j, context_id in enumerate(contexts):
            s_marginal = tau.sum(axis=_other_axes(tau.ndim, (j + 1,)))
            for annotator_id, label in index[(item_id, context_id)]:
                counts[annotator_id][:, label.index] += s_marginal
    return counts


def m_step_gamma(
    dataset: Dataset, posterior: PosteriorTable, smoothing: float = DEFAULT_SMOOTHING
) -> Dict[str, TransitionMatrix]:
    """
    Closed-form context matrices: weighted (y, s) counts, row-renormalized

    Args:
        dataset: Annotated items
        posterior: E-step output covering every item
        smoothing: Added to every count before renormalizing

    Returns:
        context_id -> TransitionMatrix
    """
    return {
        context_id: renormalize_rows(counts, smoothing)
        for context_id, counts in gamma_counts(dataset, posterior).items()
    }


def m_step_alpha(
    dataset: Dataset, posterior: PosteriorTable, smoothing: float = DEFAULT_SMOOTHING
) -> Dict[str, TransitionMatrix]:
    """
    Closed-form annotator matrices: weighted (s, r) counts, row-renormalized

    Args:
        dataset: Annotated items
        posterior: E-step output covering every item
        smoothing: Added to every count before renormalizing

    Returns:
        annotator_id -> TransitionMatrix
    """
    return {
        annotator_id: renormalize_rows(counts, smoothing)
        for annotator_id, counts in alpha_counts(dataset, posterior).items()
    }


def sample_training_labels(marginals, samples_per_item: int, rng_seed: int) -> np.ndarray:
    """
    Draw labels i.i.d. from each item's marginal

    Args:
        marginals: (N, 3) per-item distributions over V
        samples_per_item: Draws per item
        rng_seed: Seed of the draw

    Returns:
        (N, samples_per_item) integer array of labels in {-1, 0, 1}
    """
    probs = np.atleast_2d(np.asarray(marginals, dtype=float))
    rng = np.random.default_rng(rng_seed)
    uniforms = rng.random((probs.shape[0], samples_per_item))
    cumulative = np.cumsum(probs, axis=1)
    # first index whose cumulative mass exceeds the uniform draw
    positions = (uniforms[:, :, None] >= cumulative[:, None, :]).sum(axis=2)
    positions = np.minimum(positions, N_LABELS - 1)
    return positions - 1


def collapse_samples(features, samples: np.ndarray) -> TrainSet:
    """
    Turn per-item samples into one weighted row per (item, distinct label)

    Args:
        features: (N, d) feature matrix in item order
        samples: (N, k) sampled labels

    Returns:
        TrainSet equivalent to training on every sample
    """
    rows, labels, weights = [], [], []
    for i, drawn in enumerate(samples):
        values, counts = np.unique(drawn, return_counts=True)
        rows.extend([i] * len(values))
        labels.extend(values.tolist())
        weights.extend(counts.tolist())
    return TrainSet(features[np.asarray(rows)], np.asarray(labels), np.asarray(weights, dtype=float))


def cold_start_probabilities(dataset: Dataset, index: AnnotationIndex, prior: Sequence[float]) -> np.ndarray:
    """
    Stand-in for the classifier before the first M-step

    Each context votes once with its majority label; the vote shares are
    smoothed with the label prior: (votes + prior) / (|C_i| + 1).

    Returns:
        (N, 3) matrix in item order
    """
    prior = np.asarray(prior, dtype=float)
    probs = np.empty((dataset.n_items, N_LABELS))
    for i, item_id in enumerate(dataset.item_ids):
        votes = np.zeros(N_LABELS)
        contexts = index.contexts_of(item_id)
        for context_id in contexts:
            winner = majority_vote(index.labels_for(item_id, context_id)).winning_label
            votes[winner.index] += 1
        probs[i] = (votes + prior) / (len(contexts) + 1)
    return probs


def _expected_log(weights: np.ndarray, probs: np.ndarray) -> float:
    # 0 * log 0 counts as 0
    logs = _safe_log(probs)
    return float(np.sum(np.where(weights > 0, weights * logs, 0.0)))


def _keep_better(
    candidates: Dict[str, TransitionMatrix],
    current: Dict[str, TransitionMatrix],
    counts: Dict[str, np.ndarray],
) -> Tuple[Dict[str, TransitionMatrix], int]:
    chosen, kept = {}, 0
    for key, candidate in candidates.items():
        previous = current.get(key)
        if previous is not None and _expected_log(counts[key], candidate.rows) < _expected_log(counts[key], previous.rows):
            chosen[key] = previous
            kept += 1
        else:
            chosen[key] = candidate
    return chosen, kept


def _iteration_seeds(rng_seed: int, iteration: int) -> Tuple[int, int]:
    state = np.random.SeedSequence([int(rng_seed), int(iteration)]).generate_state(2)
    return int(state[0]), int(state[1])


@dataclass
class FitResult:
    """Fitted parameters, final posterior and the per-iteration log-likelihood trace"""

    params: ModelParameters
    posterior: PosteriorTable
    trace: List[float]
    converged: bool
    classifier_updates: List[bool] = field(default_factory=list)

    @property
    def n_iterations(self) -> int:
        return len(self.trace)


@log_execution_time()
def fit(
    dataset: Dataset,
    classifier_spec: Optional[ClassifierSpec] = None,
    config: Optional[FitConfig] = None,
) -> FitResult:
    """
    Run EM until the relative log-likelihood change drops below tolerance

    Every iteration performs the E-step under the current parameters, then
    updates gamma, alpha and the classifier. Each updated component replaces
    the previous one only if it does not lower its term of the expected
    complete-data log-likelihood, which keeps the trace non-decreasing.

    Args:
        dataset: Annotated items (gold labels are never read)
        classifier_spec: Classifier to retrain (softmax regression by default)
        config: EM settings

    Returns:
        FitResult with parameters, posterior and trace

    Raises:
        MonotonicityError: If the log-likelihood drops beyond the allowed slack
    """
    classifier_spec = classifier_spec or ClassifierSpec()
    config = config or FitConfig()
    dataset = dataset.without_gold()

    index = group_annotations(dataset)
    layout = _LatentLayout(dataset, index)
    features = dataset.feature_matrix()
    prior = np.asarray(config.label_prior)

    params = ModelParameters.initial(
        dataset.contexts, dataset.annotators, config.init_diag_mass, config.label_prior
    )
    item_probs = cold_start_probabilities(dataset, index, prior)
    logger.info(
        f"Fitting {dataset.n_items} items, {len(dataset.contexts)} contexts, "
        f"{len(dataset.annotators)} annotators ({classifier_spec.kind} classifier)"
    )

    trace: List[float] = []
    updates: List[bool] = []
    converged = False
    for iteration in range(1, config.max_iterations + 1):
        posterior = e_step(dataset, params, item_probs, layout)
        marginals = posterior.marginals()

        g_counts = gamma_counts(dataset, posterior)
        a_counts = alpha_counts(dataset, posterior, index)
        gamma, kept_gamma = _keep_better(
            {c: renormalize_rows(n, config.smoothing) for c, n in g_counts.items()}, params.gamma, g_counts
        )
        alpha, kept_alpha = _keep_better(
            {a: renormalize_rows(n, config.smoothing) for a, n in a_counts.items()}, params.alpha, a_counts
        )

        sample_seed, train_seed = _iteration_seeds(config.rng_seed, iteration)
        samples = sample_training_labels(marginals, config.samples_per_item, sample_seed)
        candidate = classifier_spec.train(collapse_samples(features, samples), train_seed)
        candidate_probs = apply_label_prior(candidate.predict_proba(features), prior)

        accepted = params.classifier is None or (
            _expected_log(marginals, candidate_probs) >= _expected_log(marginals, item_probs)
        )
        updates.append(accepted)
        classifier = candidate if accepted else params.classifier
        if accepted:
            item_probs = candidate_probs

        params = params.updated(gamma=gamma, alpha=alpha, classifier=classifier)
        log_likelihood = incomplete_data_log_likelihood(dataset, params, item_probs, layout)

        change = math.inf
        if trace:
            previous = trace[-1]
            if log_likelihood < previous - config.monotonic_slack:
                raise MonotonicityError(
                    f"log-likelihood decreased from {previous:.10g} to {log_likelihood:.10g} "
                    f"at iteration {iteration}"
                )
            change = abs(log_likelihood - previous) / max(abs(previous), np.finfo(float).tiny)
        trace.append(log_likelihood)

        logger.info(
            f"EM iteration {iteration}: log-likelihood {log_likelihood:.6f}, relative change {change:.3g}, "
            f"classifier {'updated' if accepted else 'kept'}, kept {kept_gamma} gamma / {kept_alpha} alpha"
        )
        if change < config.rel_tolerance:
            converged = True
            break

    posterior = e_step(dataset, params, item_probs, layout)
    if converged:
        logger.info(f"Converged after {len(trace)} iterations")
    else:
        logger.warning(f"Stopped at max_iterations={config.max_iterations} without converging")
    return FitResult(params, posterior, trace, converged, updates)


def write_probability_table(path: str, item_ids: Sequence[str], probs: np.ndarray) -> None:
    """
    Write per-item distributions as item_id,p_neg1,p_0,p_1

    Args:
        path: Destination file
        item_ids: Item identifiers, one per row of probs
        probs: (N, 3) probabilities
    """
    rows = ([item_id] + [format_real(v) for v in row] for item_id, row in zip(item_ids, np.asarray(probs)))
    write_table(path, PROBABILITY_COLUMNS, rows)


def read_probability_table(path: str) -> Tuple[List[str], np.ndarray]:
    """Read a file written by write_probability_table"""
    validator = AnnotationDataValidator()
    return validator.validate_probability_rows(validator.read_table(path), str(path))


def write_posteriors(posterior: PosteriorTable, path: str) -> None:
    """Posterior dump: marginal_y per item"""
    write_probability_table(path, posterior.item_ids, posterior.marginals())


def write_trace(trace: Sequence[float], path: str) -> None:
    """Log-likelihood trace, one value per line"""
    write_lines(path, [format_real(v) for v in trace])


def read_trace(path: str) -> List[float]:
    with open(path, "r", encoding="utf-8") as handle:
        return [float(line) for line in handle if line.strip()]


def read_posteriors(path: str) -> Tuple[List[str], np.ndarray]:
    """Item ids and (N, 3) marginals from a posterior dump"""
    return read_probability_table(path)
