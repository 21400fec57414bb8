"""Synthetic datasets drawn from the generative model with known parameters"""

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from core.annotations import N_LABELS, AnnotationRecord, Dataset, Label, save_dataset, write_features, write_gold
from core.exceptions import ConfigError, MatrixError
from core.noise_model import ModelParameters, TransitionMatrix, export_matrices
from core.utils import ensure_directory

logger = logging.getLogger(__name__)

STUDY_N_ITEMS = 562
STUDY_N_CONTEXTS = 6
STUDY_ANNOTATORS_PER_CONTEXT = 3


@dataclass(frozen=True, eq=False)
class SimulationSpec:
    """
    Everything needed to draw one synthetic dataset.

    Features are class-conditional: mean vector of the true label plus
    spherical Gaussian noise of scale noise_scale.
    """

    n_items: int
    gamma: Mapping[str, TransitionMatrix]
    alpha: Mapping[str, TransitionMatrix]
    annotators_per_context: int
    true_label_distribution: Tuple[float, ...]
    class_means: np.ndarray
    noise_scale: float = 1.0
    rng_seed: int = 0
    n_heldout: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gamma", dict(self.gamma))
        object.__setattr__(self, "alpha", dict(self.alpha))
        distribution = np.asarray(self.true_label_distribution, dtype=float)
        means = np.atleast_2d(np.asarray(self.class_means, dtype=float))
        object.__setattr__(self, "true_label_distribution", tuple(distribution))
        object.__setattr__(self, "class_means", means)

        if self.n_items < 1:
            raise ConfigError("n_items must be at least 1")
        if self.n_heldout < 0:
            raise ConfigError("n_heldout cannot be negative")
        if not self.gamma or not self.alpha:
            raise ConfigError("a simulation needs at least one context and one annotator")
        if not 1 <= self.annotators_per_context <= len(self.alpha):
            raise ConfigError(
                f"annotators_per_context must lie in [1, {len(self.alpha)}], got {self.annotators_per_context}"
            )
        if distribution.shape != (N_LABELS,) or np.any(distribution < 0) or abs(distribution.sum() - 1) > 1e-9:
            raise ConfigError("true_label_distribution must be a probability vector over the three labels")
        if means.shape[0] != N_LABELS:
            raise ConfigError(f"class_means needs one row per label, got {means.shape[0]}")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale cannot be negative")
        for matrix in list(self.gamma.values()) + list(self.alpha.values()):
            if not isinstance(matrix, TransitionMatrix):
                raise ConfigError("gamma and alpha values must be TransitionMatrix instances")

    @property
    def dimension(self) -> int:
        return int(self.class_means.shape[1])


@dataclass
class SimulationResult:
    """A drawn dataset (gold attached), the parameters that produced it, and optional held-out items"""

    dataset: Dataset
    params: ModelParameters
    heldout_ids: List[str] = field(default_factory=list)
    heldout_features: Optional[np.ndarray] = None
    heldout_gold: Dict[str, Label] = field(default_factory=dict)

    def __iter__(self):
        # unpacks as (dataset, true parameters)
        return iter((self.dataset, self.params))


def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
    position = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    return min(position, N_LABELS - 1)


def _draw_items(spec: SimulationSpec, rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
    truth = np.array([_draw(rng, np.asarray(spec.true_label_distribution)) for _ in range(count)], dtype=int)
    noise = rng.normal(scale=spec.noise_scale, size=(count, spec.dimension))
    return truth, spec.class_means[truth] + noise


def simulate(spec: SimulationSpec) -> SimulationResult:
    """
    Draw a dataset from the generative model

    Each item gets a true label, class-conditional features, one context
    label per context drawn from that label's gamma row, and one annotation
    per assigned annotator drawn from the context label's alpha row.
    Annotators are assigned round-robin over the pool.

    Args:
        spec: Simulation settings

    Returns:
        SimulationResult; unpacks as (dataset with gold labels, true parameters)
    """
    rng = np.random.default_rng(spec.rng_seed)
    contexts = list(spec.gamma)
    pool = list(spec.alpha)
    per_context = spec.annotators_per_context

    truth, features = _draw_items(spec, rng, spec.n_items)
    item_ids = [f"item{i}" for i in range(spec.n_items)]

    records: List[AnnotationRecord] = []
    for i, item_id in enumerate(item_ids):
        for k, context_id in enumerate(contexts):
            s = _draw(rng, spec.gamma[context_id][truth[i]])
            start = (i * len(contexts) + k) * per_context
            for j in range(per_context):
                annotator_id = pool[(start + j) % len(pool)]
                r = _draw(rng, spec.alpha[annotator_id][s])
                records.append(AnnotationRecord(item_id, context_id, annotator_id, Label.from_index(r)))

    gold = {item_id: Label.from_index(y) for item_id, y in zip(item_ids, truth)}
    dataset = Dataset.from_matrix(item_ids, features, records, gold)
    params = ModelParameters(spec.gamma, spec.alpha, None, np.asarray(spec.true_label_distribution))

    result = SimulationResult(dataset, params)
    if spec.n_heldout:
        heldout_truth, heldout_features = _draw_items(spec, rng, spec.n_heldout)
        result.heldout_ids = [f"heldout{i}" for i in range(spec.n_heldout)]
        result.heldout_features = heldout_features
        result.heldout_gold = {
            item_id: Label.from_index(y) for item_id, y in zip(result.heldout_ids, heldout_truth)
        }

    logger.info(
        f"Simulated {spec.n_items} items, {len(records)} annotations over {len(contexts)} contexts "
        f"and {len(pool)} annotators ({spec.n_heldout} held out)"
    )
    return result


def recovery_error(true: Mapping[str, TransitionMatrix], estimated: Mapping[str, TransitionMatrix]) -> float:
    """
    Mean absolute entry difference over all matrices of two maps

    Raises:
        MatrixError: If the key sets differ
    """
    if set(true) != set(estimated):
        missing = sorted(set(true) ^ set(estimated))
        raise MatrixError(f"matrix maps have different keys: {', '.join(missing)}")
    if not true:
        return 0.0
    differences = [np.abs(np.asarray(true[key]) - np.asarray(estimated[key])) for key in true]
    return float(np.mean(differences))


def random_transition(rng: np.random.Generator, diag_low: float = 0.6, diag_high: float = 0.9) -> TransitionMatrix:
    """
    Diagonal-dominant random matrix: each diagonal drawn uniformly from
    [diag_low, diag_high], the remainder split by a flat Dirichlet
    """
    if not 0.0 <= diag_low <= diag_high <= 1.0:
        raise MatrixError(f"need 0 <= diag_low <= diag_high <= 1, got {diag_low}, {diag_high}")
    values = np.zeros((N_LABELS, N_LABELS))
    for row in range(N_LABELS):
        diagonal = rng.uniform(diag_low, diag_high)
        rest = rng.dirichlet(np.ones(N_LABELS - 1)) * (1.0 - diagonal)
        values[row] = np.insert(rest, row, diagonal)
    return TransitionMatrix(values)


def study_scale_spec(
    rng_seed: int = 0,
    n_items: int = STUDY_N_ITEMS,
    n_contexts: int = STUDY_N_CONTEXTS,
    annotators_per_context: int = STUDY_ANNOTATORS_PER_CONTEXT,
    n_annotators: int = 30,
    dimension: int = 10,
    noise_scale: float = 1.0,
    n_heldout: int = 0,
) -> SimulationSpec:
    """
    SimulationSpec with the real study's shape: 562 items, 6 contexts, 3 annotators per context

    Matrices and class means are drawn from rng_seed; the simulation itself
    also uses rng_seed.
    """
    rng = np.random.default_rng([rng_seed, 1])
    gamma = {f"ctx{k}": random_transition(rng, 0.6, 0.9) for k in range(n_contexts)}
    alpha = {f"ann{a}": random_transition(rng, 0.7, 0.95) for a in range(n_annotators)}
    class_means = rng.normal(scale=1.5, size=(N_LABELS, dimension))
    return SimulationSpec(
        n_items=n_items,
        gamma=gamma,
        alpha=alpha,
        annotators_per_context=annotators_per_context,
        true_label_distribution=(0.4, 0.2, 0.4),
        class_means=class_means,
        noise_scale=noise_scale,
        rng_seed=rng_seed,
        n_heldout=n_heldout,
    )


def write_simulation(result: SimulationResult, out_dir: str) -> Dict[str, str]:
    """
    Write a simulation in the dataset file formats plus truth_matrices.txt

    Returns:
        Name -> path of every written file
    """
    ensure_directory(out_dir)
    paths = {
        "annotations": os.path.join(out_dir, "annotations.csv"),
        "features": os.path.join(out_dir, "features.csv"),
        "gold": os.path.join(out_dir, "gold.csv"),
        "truth": os.path.join(out_dir, "truth_matrices.txt"),
    }
    save_dataset(result.dataset, paths["annotations"], paths["features"], paths["gold"])
    export_matrices(result.params, paths["truth"])
    if result.heldout_ids:
        paths["heldout_features"] = os.path.join(out_dir, "heldout_features.csv")
        paths["heldout_gold"] = os.path.join(out_dir, "heldout_gold.csv")
        write_features(paths["heldout_features"], result.heldout_ids, result.heldout_features)
        write_gold(paths["heldout_gold"], result.heldout_gold)
    logger.info(f"Wrote simulation to {out_dir}")
    return paths
