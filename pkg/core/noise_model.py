"""Row-stochastic noise matrices for contexts (gamma) and annotators (alpha)"""

import logging
import re
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.annotations import N_LABELS, Dataset
from core.exceptions import MatrixError, ModelParameterError
from core.utils import ensure_parent_directory, format_real

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-9
DEFAULT_DIAG_MASS = 0.8
DEFAULT_SMOOTHING = 1e-6

_BLOCK_HEADER = re.compile(r"^\[(gamma|alpha) (.*)\]$")


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """
    |V| x |V| row-stochastic matrix; entry (y, s) is p(observe s | true y).

    Rows and columns follow the label order (-1, 0, 1). The stored array is
    read-only.
    """

    rows: np.ndarray

    def __post_init__(self):
        values = np.array(self.rows, dtype=float)
        if values.shape != (N_LABELS, N_LABELS):
            raise MatrixError(f"transition matrix must be {N_LABELS}x{N_LABELS}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise MatrixError("transition matrix has non-finite entries")
        if np.any(values < 0) or np.any(values > 1 + ROW_SUM_TOLERANCE):
            raise MatrixError("transition matrix entries must lie in [0, 1]")
        deviation = np.max(np.abs(values.sum(axis=1) - 1.0))
        if deviation > ROW_SUM_TOLERANCE:
            raise MatrixError(f"transition matrix rows must sum to 1 (deviation {deviation:.3g})")
        values.setflags(write=False)
        object.__setattr__(self, "rows", values)

    def __getitem__(self, key):
        return self.rows[key]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.rows, dtype=dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return bool(np.array_equal(self.rows, other.rows))

    __hash__ = None

    def log(self) -> np.ndarray:
        """Elementwise natural log (zero entries give -inf)"""
        with np.errstate(divide="ignore"):
            return np.log(self.rows)


def init_transition(diag_mass: float = DEFAULT_DIAG_MASS) -> TransitionMatrix:
    """
    Build the symmetric starting matrix

    Args:
        diag_mass: Probability kept on the diagonal, in (1/|V|, 1]

    Returns:
        Matrix with diag_mass on the diagonal and the rest spread evenly

    Raises:
        MatrixError: If diag_mass is out of range
    """
    if not (1.0 / N_LABELS < diag_mass <= 1.0):
        raise MatrixError(f"diag_mass must lie in (1/{N_LABELS}, 1], got {diag_mass}")
    off = (1.0 - diag_mass) / (N_LABELS - 1)
    values = np.full((N_LABELS, N_LABELS), off)
    np.fill_diagonal(values, diag_mass)
    return TransitionMatrix(values)


def uniform_transition() -> TransitionMatrix:
    """Every row uniform over V"""
    return TransitionMatrix(np.full((N_LABELS, N_LABELS), 1.0 / N_LABELS))


def renormalize_rows(matrix, smoothing: float = 0.0) -> TransitionMatrix:
    """
    Add smoothing to every entry and divide each row by its sum

    Args:
        matrix: TransitionMatrix or non-negative |V| x |V| array (e.g. weighted counts)
        smoothing: Non-negative constant added to every entry

    Returns:
        Row-stochastic TransitionMatrix

    Raises:
        MatrixError: On negative entries or a zero row with smoothing 0
    """
    if smoothing < 0:
        raise MatrixError(f"smoothing must be >= 0, got {smoothing}")
    values = np.array(matrix, dtype=float)
    if values.shape != (N_LABELS, N_LABELS):
        raise MatrixError(f"expected a {N_LABELS}x{N_LABELS} matrix, got {values.shape}")
    if np.any(values < 0):
        raise MatrixError("cannot renormalize a matrix with negative entries")
    values = values + smoothing
    sums = values.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise MatrixError("cannot renormalize an all-zero row without smoothing")
    return TransitionMatrix(values / sums)


@dataclass(frozen=True, eq=False)
class ModelParameters:
    """
    The parameter bundle: classifier, one gamma per context, one alpha per annotator,
    and the label prior composed onto classifier outputs.

    Instances are replaced wholesale between EM iterations.
    """

    gamma: Mapping[str, TransitionMatrix]
    alpha: Mapping[str, TransitionMatrix]
    classifier: Optional[Any] = None
    label_prior: np.ndarray = field(default_factory=lambda: np.full(N_LABELS, 1.0 / N_LABELS))

    def __post_init__(self):
        object.__setattr__(self, "gamma", dict(self.gamma))
        object.__setattr__(self, "alpha", dict(self.alpha))
        prior = np.array(self.label_prior, dtype=float)
        if prior.shape != (N_LABELS,) or np.any(prior <= 0):
            raise MatrixError(f"label_prior must have {N_LABELS} positive entries, got {prior}")
        if abs(prior.sum() - 1.0) > ROW_SUM_TOLERANCE:
            raise MatrixError(f"label_prior must sum to 1, got {prior.sum()}")
        prior.setflags(write=False)
        object.__setattr__(self, "label_prior", prior)

    def gamma_for(self, context_id: str) -> TransitionMatrix:
        try:
            return self.gamma[context_id]
        except KeyError:
            raise ModelParameterError(f"no gamma matrix for context {context_id!r}")

    def alpha_for(self, annotator_id: str) -> TransitionMatrix:
        try:
            return self.alpha[annotator_id]
        except KeyError:
            raise ModelParameterError(f"no alpha matrix for annotator {annotator_id!r}")

    def check_covers(self, dataset: Dataset) -> None:
        """
        Verify there is a gamma for every context and an alpha for every annotator

        Raises:
            ModelParameterError: Naming the first missing identifier
        """
        for context_id in dataset.contexts:
            self.gamma_for(context_id)
        for annotator_id in dataset.annotators:
            self.alpha_for(annotator_id)

    def updated(self, **changes) -> "ModelParameters":
        """Copy with some fields replaced"""
        return replace(self, **changes)

    @classmethod
    def initial(
        cls,
        contexts: Sequence[str],
        annotators: Sequence[str],
        diag_mass: float = DEFAULT_DIAG_MASS,
        label_prior: Optional[Sequence[float]] = None,
    ) -> "ModelParameters":
        """
        Starting parameters with identity-leaning matrices and no classifier

        Args:
            contexts: Context ids
            annotators: Annotator ids
            diag_mass: Diagonal mass of every starting matrix
            label_prior: Prior over V (uniform when None)
        """
        start = init_transition(diag_mass)
        prior = label_prior if label_prior is not None else np.full(N_LABELS, 1.0 / N_LABELS)
        return cls(
            gamma={c: start for c in contexts},
            alpha={a: start for a in annotators},
            classifier=None,
            label_prior=prior,
        )


def _matrix_lines(kind: str, key: str, matrix: TransitionMatrix):
    yield f"[{kind} {key}]"
    for row in matrix.rows:
        yield " ".join(format_real(v) for v in row)


def export_matrices(params: ModelParameters, path: str) -> None:
    """
    Write every gamma and alpha matrix as labeled text blocks

    Each block is a `[gamma <context_id>]` or `[alpha <annotator_id>]` header
    followed by three rows of three reals, rows ordered (-1, 0, 1).

    Args:
        params: Parameters to export
        path: Destination file
    """
    ensure_parent_directory(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for context_id, matrix in params.gamma.items():
            for line in _matrix_lines("gamma", context_id, matrix):
                handle.write(line + "\n")
        for annotator_id, matrix in params.alpha.items():
            for line in _matrix_lines("alpha", annotator_id, matrix):
                handle.write(line + "\n")
    logger.info(f"Exported {len(params.gamma)} gamma and {len(params.alpha)} alpha matrices to {path}")


def load_matrices(path: str) -> Tuple[Dict[str, TransitionMatrix], Dict[str, TransitionMatrix]]:
    """
    Read matrices written by export_matrices

    Args:
        path: Matrix export file

    Returns:
        Tuple of (gamma map, alpha map) in file order
    """
    blocks: Dict[str, Dict[str, TransitionMatrix]] = {"gamma": {}, "alpha": {}}
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]

    position = 0
    while position < len(lines):
        match = _BLOCK_HEADER.match(lines[position])
        if not match:
            raise MatrixError(f"{path}: line {position + 1}: expected a [gamma ...] or [alpha ...] header")
        kind, key = match.group(1), match.group(2)
        rows = lines[position + 1:position + 1 + N_LABELS]
        if len(rows) != N_LABELS:
            raise MatrixError(f"{path}: block [{kind} {key}] is truncated")
        try:
            values = [[float(v) for v in row.split()] for row in rows]
        except ValueError as e:
            raise MatrixError(f"{path}: block [{kind} {key}]: {e}")
        blocks[kind][key] = TransitionMatrix(values)
        position += 1 + N_LABELS
    return blocks["gamma"], blocks["alpha"]

