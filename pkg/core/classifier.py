"""Probabilistic classifiers: softmax regression reference model and a forest plugin"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Protocol, Tuple, runtime_checkable

import joblib
import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg
from scipy.special import logsumexp
from sklearn.ensemble import RandomForestClassifier

from core.annotations import LABELS, N_LABELS
from core.decorators import log_execution_time
from core.exceptions import ConfigError, ConStanceError
from core.utils import ensure_parent_directory, format_real

logger = logging.getLogger(__name__)

CLASSIFIER_KINDS = ("softmax", "forest")
MODEL_HEADER = "softmax"


@runtime_checkable
class ProbabilisticClassifier(Protocol):
    """Anything that maps a feature matrix to one distribution over V per row"""

    def predict_proba(self, features) -> np.ndarray:
        ...


@dataclass(frozen=True)
class ClassifierSpec:
    """Which classifier the EM engine retrains, and how"""

    kind: str = "softmax"
    regularization: float = 1e-2
    max_epochs: int = 5000
    tolerance: float = 1e-5

    # Forest plugin settings (max depth 30, 3000 trees)
    forest_max_depth: int = 30
    forest_n_estimators: int = 3000

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise ConfigError(f"classifier kind must be one of {CLASSIFIER_KINDS}, got {self.kind!r}")
        if self.regularization < 0:
            raise ConfigError("regularization cannot be negative")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be at least 1")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")
        if self.forest_max_depth < 1 or self.forest_n_estimators < 1:
            raise ConfigError("forest settings must be positive")

    def train(self, trainset: "TrainSet", rng_seed: int = 0) -> ProbabilisticClassifier:
        """
        Train the configured classifier

        Args:
            trainset: Features and labels
            rng_seed: Seed for initialization / tree bagging

        Returns:
            Trained model exposing predict_proba
        """
        if self.kind == "forest":
            return train_forest(trainset, self, rng_seed)
        return train(
            trainset,
            regularization=self.regularization,
            rng_seed=rng_seed,
            max_epochs=self.max_epochs,
            tolerance=self.tolerance,
        )


@dataclass(frozen=True, eq=False)
class TrainSet:
    """Feature rows with one label each and optional per-row weights"""

    features: object
    labels: np.ndarray
    sample_weight: Optional[np.ndarray] = None

    def __post_init__(self):
        features = self.features
        if sparse.issparse(features):
            features = sparse.csr_matrix(features, dtype=float)
        else:
            features = np.atleast_2d(np.asarray(features, dtype=float))
        labels = np.asarray(self.labels, dtype=int).ravel()
        if labels.size == 0:
            raise ConStanceError("cannot train on an empty training set")
        if features.shape[0] != labels.size:
            raise ConStanceError(f"{features.shape[0]} feature rows for {labels.size} labels")
        if not np.all(np.isin(labels, [int(label) for label in LABELS])):
            raise ConStanceError("training labels must be -1, 0 or 1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

        if self.sample_weight is not None:
            weight = np.asarray(self.sample_weight, dtype=float).ravel()
            if weight.size != labels.size or np.any(weight < 0) or weight.sum() <= 0:
                raise ConStanceError("sample_weight must be non-negative with one entry per label")
            object.__setattr__(self, "sample_weight", weight)

    def __len__(self) -> int:
        return int(self.labels.size)

    def normalized_weights(self) -> np.ndarray:
        weight = self.sample_weight if self.sample_weight is not None else np.ones(len(self))
        return weight / weight.sum()

    def one_hot(self) -> np.ndarray:
        targets = np.zeros((len(self), N_LABELS))
        targets[np.arange(len(self)), self.labels + 1] = 1.0
        return targets


def add_bias_column(features):
    """Append a constant 1 column (dense or sparse)"""
    if sparse.issparse(features):
        ones = sparse.csr_matrix(np.ones((features.shape[0], 1)))
        return sparse.hstack([features, ones], format="csr")
    features = np.atleast_2d(np.asarray(features, dtype=float))
    return np.hstack([features, np.ones((features.shape[0], 1))])


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    return scores - logsumexp(scores, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class ClassifierModel:
    """Multinomial logistic regression: one weight row (plus bias) per label"""

    weights: np.ndarray
    regularization: float = 1e-2

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 2 or weights.shape[0] != N_LABELS or weights.shape[1] < 1:
            raise ConStanceError(f"weights must have shape ({N_LABELS}, d+1), got {weights.shape}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def n_features(self) -> int:
        return self.weights.shape[1] - 1

    def scores(self, features) -> np.ndarray:
        if sparse.issparse(features):
            features = sparse.csr_matrix(features)
        else:
            features = np.atleast_2d(np.asarray(features, dtype=float))
        if features.shape[1] != self.n_features:
            raise ConStanceError(
                f"feature dimension {features.shape[1]} does not match model dimension {self.n_features}"
            )
        return np.asarray(add_bias_column(features) @ self.weights.T)

    def predict_proba(self, features) -> np.ndarray:
        """
        Class probabilities for each feature row

        Args:
            features: (n, d) array or sparse matrix

        Returns:
            (n, 3) array; every entry positive, rows sum to 1
        """
        probs = np.exp(_log_softmax(self.scores(features)))
        return np.maximum(probs, np.finfo(float).tiny)


def predict_proba(model: ProbabilisticClassifier, x) -> np.ndarray:
    """
    Distribution over V for a single feature vector

    Args:
        model: Trained classifier
        x: 1-D feature vector or 1 x d sparse row

    Returns:
        Length-3 probability vector ordered (-1, 0, 1)
    """
    if not sparse.issparse(x):
        x = np.asarray(x, dtype=float).reshape(1, -1)
    return model.predict_proba(x)[0]


def loss_and_gradient(
    weights: np.ndarray,
    features,
    targets: np.ndarray,
    regularization: float,
    sample_weight: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray]:
    """
    Weighted mean cross-entropy with L2 shrinkage of the non-bias weights

    Args:
        weights: (3, d+1) weight matrix, bias in the last column
        features: (n, d+1) features that already include the bias column
        targets: (n, 3) one-hot targets
        regularization: L2 strength
        sample_weight: Optional non-negative weights (normalized internally)

    Returns:
        Tuple of (loss, gradient with the shape of weights)
    """
    n = targets.shape[0]
    weight = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    weight = weight / weight.sum()

    scores = np.asarray(features @ weights.T)
    log_probs = _log_softmax(scores)
    loss = -float(np.sum(weight * np.sum(targets * log_probs, axis=1)))
    loss += 0.5 * regularization * float(np.sum(weights[:, :-1] ** 2))

    residual = weight[:, None] * (np.exp(log_probs) - targets)
    gradient = np.asarray(features.T @ residual).T
    gradient[:, :-1] += regularization * weights[:, :-1]
    return loss, gradient


def _smoothness_bound(features, weight: np.ndarray, regularization: float) -> float:
    # Hessian of the mean softmax cross-entropy is bounded by 0.5 * X^T W X
    root = np.sqrt(weight)
    if sparse.issparse(features):
        scaled = sparse.diags(root) @ features
        curvature = sparse_linalg.norm(scaled, "fro") ** 2
    else:
        scaled = root[:, None] * features
        curvature = np.linalg.norm(scaled, 2) ** 2
    return 0.5 * float(curvature) + regularization


def gradient_descent(
    features,
    targets: np.ndarray,
    regularization: float,
    initial: np.ndarray,
    sample_weight: Optional[np.ndarray] = None,
    max_epochs: int = 5000,
    tolerance: float = 1e-5,
) -> Tuple[np.ndarray, List[float]]:
    """
    Full-batch gradient descent with the fixed step 1/L

    Args:
        features: (n, d+1) features including the bias column
        targets: (n, 3) one-hot targets
        regularization: L2 strength
        initial: Starting weights
        sample_weight: Optional per-row weights
        max_epochs: Epoch cap
        tolerance: Stop once the gradient norm is at most this

    Returns:
        Tuple of (weights, loss per epoch starting with the initial loss)
    """
    n = targets.shape[0]
    weight = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    weight = weight / weight.sum()
    step = 1.0 / _smoothness_bound(features, weight, regularization)

    weights = np.array(initial, dtype=float)
    loss, gradient = loss_and_gradient(weights, features, targets, regularization, weight)
    losses = [loss]
    for _ in range(max_epochs):
        if np.linalg.norm(gradient) <= tolerance:
            break
        weights = weights - step * gradient
        loss, gradient = loss_and_gradient(weights, features, targets, regularization, weight)
        losses.append(loss)
    return weights, losses


@log_execution_time()
def train(
    trainset: TrainSet,
    regularization: float = 1e-2,
    rng_seed: int = 0,
    max_epochs: int = 5000,
    tolerance: float = 1e-5,
) -> ClassifierModel:
    """
    Fit softmax regression to a training set

    Args:
        trainset: Features, labels and optional weights
        regularization: L2 strength on non-bias weights
        rng_seed: Seed for the small random initialization
        max_epochs: Epoch cap
        tolerance: Gradient-norm stopping threshold

    Returns:
        Trained ClassifierModel
    """
    features = add_bias_column(trainset.features)
    rng = np.random.default_rng(rng_seed)
    initial = rng.normal(scale=0.01, size=(N_LABELS, features.shape[1]))
    weights, losses = gradient_descent(
        features,
        trainset.one_hot(),
        regularization,
        initial,
        sample_weight=trainset.normalized_weights(),
        max_epochs=max_epochs,
        tolerance=tolerance,
    )
    logger.debug(f"Softmax regression: {len(losses) - 1} epochs, final loss {losses[-1]:.6f}")
    return ClassifierModel(weights, regularization)


class ForestModel:
    """Random forest adapter returning mean tree probabilities over all of V"""

    def __init__(self, estimator: RandomForestClassifier):
        self.estimator = estimator
        self._columns = [int(label) + 1 for label in estimator.classes_]

    def predict_proba(self, features) -> np.ndarray:
        partial = self.estimator.predict_proba(features)
        probs = np.zeros((partial.shape[0], N_LABELS))
        probs[:, self._columns] = partial
        return probs


@log_execution_time()
def train_forest(trainset: TrainSet, spec: ClassifierSpec, rng_seed: int = 0) -> ForestModel:
    """
    Fit the random forest plugin

    Args:
        trainset: Features, labels and optional weights
        spec: Forest depth and size
        rng_seed: Bagging seed

    Returns:
        ForestModel
    """
    estimator = RandomForestClassifier(
        n_estimators=spec.forest_n_estimators,
        max_depth=spec.forest_max_depth,
        random_state=rng_seed,
        n_jobs=1,
    )
    estimator.fit(trainset.features, trainset.labels, sample_weight=trainset.sample_weight)
    return ForestModel(estimator)


def dump_model(model: ProbabilisticClassifier, path: str) -> None:
    """
    Write a trained model

    Softmax models use the text format (regularization, then the weight matrix
    row-major); forest models are written with joblib.

    Args:
        model: Trained classifier
        path: Destination file
    """
    ensure_parent_directory(path)
    if isinstance(model, ForestModel):
        joblib.dump(model.estimator, path)
        return
    if not isinstance(model, ClassifierModel):
        raise ConStanceError(f"cannot dump classifier of type {type(model).__name__}")
    rows, cols = model.weights.shape
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{MODEL_HEADER}\n")
        handle.write(f"regularization {format_real(model.regularization)}\n")
        handle.write(f"weights {rows} {cols}\n")
        for row in model.weights:
            handle.write(" ".join(format_real(v) for v in row) + "\n")


def load_model(path: str) -> ClassifierModel:
    """Read a softmax model written by dump_model"""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.split() for line in handle if line.strip()]
    try:
        if lines[0] != [MODEL_HEADER] or lines[1][0] != "regularization" or lines[2][0] != "weights":
            raise ValueError("unexpected header")
        regularization = float(lines[1][1])
        rows, cols = int(lines[2][1]), int(lines[2][2])
        weights = np.array([[float(v) for v in line] for line in lines[3:3 + rows]])
        if weights.shape != (rows, cols):
            raise ValueError(f"expected {rows}x{cols} weights, found {weights.shape}")
    except (IndexError, ValueError) as e:
        raise ConStanceError(f"{path}: malformed model dump ({e})")
    return ClassifierModel(weights, regularization)

