"""Items, annotations and datasets, plus their file formats"""

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import IntEnum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from core.data_validator import (
    ANNOTATION_COLUMNS,
    GOLD_COLUMNS,
    SPARSE_FEATURE_COLUMNS,
    AnnotationDataValidator,
    ValidationRules,
)
from core.exceptions import DatasetError
from core.utils import format_real, write_table

logger = logging.getLogger(__name__)

FeatureVector = Union[np.ndarray, sparse.csr_matrix]


class Label(IntEnum):
    """Ternary label value; rows and columns of every matrix follow this order"""

    NEG = -1
    NEUTRAL = 0
    POS = 1

    @property
    def index(self) -> int:
        """Position of the label in (-1, 0, 1)"""
        return int(self.value) + 1

    @classmethod
    def from_index(cls, index: int) -> "Label":
        return cls(int(index) - 1)


LABELS: Tuple[Label, ...] = (Label.NEG, Label.NEUTRAL, Label.POS)
N_LABELS = len(LABELS)

# Scope name of the combined condition; no context may use it
ALL = "ALL"


@dataclass(frozen=True)
class AnnotationRecord:
    """One label R_i^{ca} given by an annotator to an item under a context"""

    item_id: str
    context_id: str
    annotator_id: str
    label: Label

    def __post_init__(self):
        object.__setattr__(self, "label", Label(self.label))


def _as_feature_vector(features) -> FeatureVector:
    if sparse.issparse(features):
        row = sparse.csr_matrix(features, dtype=float)
        if row.shape[0] != 1:
            raise DatasetError(f"sparse feature vector must have one row, got shape {row.shape}")
        return row
    vector = np.asarray(features, dtype=float)
    if vector.ndim != 1:
        raise DatasetError(f"dense feature vector must be 1-D, got shape {vector.shape}")
    return vector


@dataclass(frozen=True, eq=False)
class Item:
    """An item to be labeled: identifier, feature vector and optional gold label"""

    item_id: str
    features: FeatureVector
    gold_label: Optional[Label] = None

    def __post_init__(self):
        object.__setattr__(self, "features", _as_feature_vector(self.features))
        if self.gold_label is not None:
            object.__setattr__(self, "gold_label", Label(self.gold_label))

    @property
    def dimension(self) -> int:
        return int(self.features.shape[-1])

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.features)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Item):
            return NotImplemented
        if (self.item_id, self.gold_label, self.is_sparse, self.dimension) != (
            other.item_id, other.gold_label, other.is_sparse, other.dimension
        ):
            return False
        if self.is_sparse:
            return (self.features != other.features).nnz == 0
        return bool(np.array_equal(self.features, other.features))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Items with features plus every annotation record.

    Context and annotator identifiers are kept in first-seen order so that
    dense indices never depend on hashing.
    """

    items: Tuple[Item, ...]
    annotations: Tuple[AnnotationRecord, ...]
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "annotations", tuple(self.annotations))
        if self._validate:
            self._check()

    def _check(self) -> None:
        if not self.items:
            raise DatasetError("a dataset needs at least one item")
        ids = [item.item_id for item in self.items]
        if len(set(ids)) != len(ids):
            duplicates = [k for k, v in Counter(ids).items() if v > 1]
            raise DatasetError(f"duplicate item ids: {duplicates[:5]}")
        dimensions = {item.dimension for item in self.items}
        if len(dimensions) != 1:
            raise DatasetError(f"feature-dimension mismatch across items: {sorted(dimensions)}")
        if len({item.is_sparse for item in self.items}) != 1:
            raise DatasetError("items mix dense and sparse feature vectors")

        known = set(ids)
        annotated = set()
        for record in self.annotations:
            if record.context_id == ALL:
                raise DatasetError(f"context id {ALL!r} is reserved for the combined condition")
            if record.item_id not in known:
                raise DatasetError(f"annotation references unknown item {record.item_id}")
            annotated.add(record.item_id)
        missing = [item_id for item_id in ids if item_id not in annotated]
        if missing:
            raise DatasetError(f"items without annotations: {missing[:5]}")

    @cached_property
    def contexts(self) -> Tuple[str, ...]:
        """Context ids in first-seen order"""
        return tuple(dict.fromkeys(r.context_id for r in self.annotations))

    @cached_property
    def annotators(self) -> Tuple[str, ...]:
        """Annotator ids in first-seen order"""
        return tuple(dict.fromkeys(r.annotator_id for r in self.annotations))

    @cached_property
    def item_ids(self) -> Tuple[str, ...]:
        return tuple(item.item_id for item in self.items)

    @cached_property
    def item_index(self) -> Dict[str, int]:
        return {item_id: i for i, item_id in enumerate(self.item_ids)}

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def dimension(self) -> int:
        return self.items[0].dimension

    @property
    def is_sparse(self) -> bool:
        return self.items[0].is_sparse

    @property
    def has_gold(self) -> bool:
        return any(item.gold_label is not None for item in self.items)

    def feature_matrix(self) -> FeatureVector:
        """
        Stack item features into one matrix

        Returns:
            (N, d) numpy array, or CSR matrix for sparse datasets
        """
        if self.is_sparse:
            return sparse.vstack([item.features for item in self.items], format="csr")
        return np.vstack([item.features for item in self.items])

    def gold_labels(self) -> Dict[str, Label]:
        """Gold labels of the items that carry one (evaluation only)"""
        return {item.item_id: item.gold_label for item in self.items if item.gold_label is not None}

    def without_gold(self) -> "Dataset":
        """The fitting view: identical items with gold labels removed"""
        if not self.has_gold:
            return self
        items = tuple(replace(item, gold_label=None) for item in self.items)
        return Dataset(items, self.annotations, _validate=False)

    def with_annotations(self, annotations: Iterable[AnnotationRecord]) -> "Dataset":
        """
        Same items with a new annotation list; items left without annotations are dropped

        Args:
            annotations: Replacement annotation records

        Returns:
            New validated Dataset
        """
        annotations = tuple(annotations)
        annotated = {r.item_id for r in annotations}
        items = tuple(item for item in self.items if item.item_id in annotated)
        return Dataset(items, annotations)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.items == other.items and self.annotations == other.annotations

    __hash__ = None

    @classmethod
    def from_matrix(
        cls,
        item_ids: Sequence[str],
        features,
        annotations: Iterable[AnnotationRecord],
        gold: Optional[Dict[str, Label]] = None,
    ) -> "Dataset":
        """
        Build a dataset from a feature matrix whose rows follow item_ids

        Args:
            item_ids: Item identifiers, one per matrix row
            features: (N, d) numpy array or sparse matrix
            annotations: Annotation records
            gold: Optional item_id -> gold label map

        Returns:
            Validated Dataset
        """
        gold = gold or {}
        if sparse.issparse(features):
            matrix = sparse.csr_matrix(features, dtype=float)
            rows = [matrix.getrow(i) for i in range(matrix.shape[0])]
        else:
            matrix = np.asarray(features, dtype=float)
            rows = list(matrix)
        if len(rows) != len(item_ids):
            raise DatasetError(f"{len(item_ids)} item ids for {len(rows)} feature rows")
        items = tuple(Item(item_id, row, gold.get(item_id)) for item_id, row in zip(item_ids, rows))
        return cls(items, tuple(annotations))


class AnnotationIndex:
    """
    Annotations grouped by (item_id, context_id), preserving input order.

    Also holds the per-item context order used by the latent enumeration.
    """

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.groups: Dict[Tuple[str, str], List[Tuple[str, Label]]] = {}
        self.item_contexts: Dict[str, List[str]] = {item_id: [] for item_id in dataset.item_ids}

        duplicates = Counter(
            (r.item_id, r.context_id, r.annotator_id) for r in dataset.annotations
        )
        repeated = sum(1 for count in duplicates.values() if count > 1)
        if repeated:
            logger.debug(f"{repeated} (item, context, annotator) triples occur more than once; all kept")

        for record in dataset.annotations:
            key = (record.item_id, record.context_id)
            if key not in self.groups:
                self.groups[key] = []
                self.item_contexts[record.item_id].append(record.context_id)
            self.groups[key].append((record.annotator_id, record.label))

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups.items())

    def __getitem__(self, key: Tuple[str, str]) -> List[Tuple[str, Label]]:
        return self.groups[key]

    def contexts_of(self, item_id: str) -> List[str]:
        """Contexts an item was annotated in, first-seen order"""
        return self.item_contexts[item_id]

    def labels_for(self, item_id: str, context_id: Optional[str] = None) -> List[Label]:
        """
        Labels of an item, optionally restricted to one context

        Args:
            item_id: Item identifier
            context_id: Context to restrict to, or None for every context

        Returns:
            Labels in input order
        """
        contexts = [context_id] if context_id is not None else self.item_contexts[item_id]
        labels: List[Label] = []
        for context in contexts:
            labels.extend(label for _, label in self.groups.get((item_id, context), []))
        return labels


def group_annotations(dataset: Dataset) -> AnnotationIndex:
    """
    Group a dataset's annotations by (item_id, context_id)

    Args:
        dataset: Valid dataset

    Returns:
        AnnotationIndex mapping (item_id, context_id) -> [(annotator_id, label), ...]
    """
    return AnnotationIndex(dataset)


def load_features(path: str, rules: ValidationRules = None) -> Tuple[List[str], FeatureVector]:
    """
    Read a dense or sparse feature file

    Args:
        path: Features file (header item_id,f0,... or item_id,feature_index,value)
        rules: Optional validation rules

    Returns:
        Tuple of (item ids, feature matrix)
    """
    validator = AnnotationDataValidator(rules)
    frame = validator.read_table(path)
    return validator.validate_feature_table(frame, str(path))


def load_gold(path: str, rules: ValidationRules = None) -> Dict[str, Label]:
    """Read a gold label file into an item_id -> Label map"""
    validator = AnnotationDataValidator(rules)
    rows = validator.validate_gold_rows(validator.read_table(path), str(path))
    return {item_id: Label(label) for _, item_id, label in rows}


def load_dataset(
    annotations_path: str,
    features_path: str,
    gold_path: Optional[str] = None,
    rules: ValidationRules = None,
) -> Dataset:
    """
    Load and validate a dataset from its three files

    Args:
        annotations_path: item_id,context_id,annotator_id,label file
        features_path: Dense or sparse feature file
        gold_path: Optional item_id,label file
        rules: Optional validation rules

    Returns:
        Validated Dataset

    Raises:
        DatasetError: On malformed rows, unknown items or dimension mismatches
    """
    validator = AnnotationDataValidator(rules)
    item_ids, matrix = load_features(features_path, rules)
    known = set(item_ids)

    annotation_rows = validator.validate_annotation_rows(
        validator.read_table(annotations_path), str(annotations_path)
    )
    annotations = []
    for line, item_id, context_id, annotator_id, label in annotation_rows:
        if context_id == ALL:
            raise DatasetError(
                f"context id {ALL!r} is reserved for the combined condition", row=line, path=str(annotations_path)
            )
        if item_id not in known:
            raise DatasetError(
                f"annotation references unknown item {item_id}", row=line, path=str(annotations_path)
            )
        annotations.append(AnnotationRecord(item_id, context_id, annotator_id, Label(label)))

    gold: Dict[str, Label] = {}
    if gold_path:
        for line, item_id, label in validator.validate_gold_rows(
            validator.read_table(gold_path), str(gold_path)
        ):
            if item_id not in known:
                raise DatasetError(f"gold label for unknown item {item_id}", row=line, path=str(gold_path))
            gold[item_id] = Label(label)

    dataset = Dataset.from_matrix(item_ids, matrix, annotations, gold)
    logger.info(
        f"Loaded {dataset.n_items} items, {len(dataset.annotations)} annotations, "
        f"{len(dataset.contexts)} contexts, {len(dataset.annotators)} annotators"
    )
    return dataset


def write_features(path: str, item_ids: Sequence[str], features) -> None:
    """
    Write a feature matrix in the dense or sparse triplet format

    Sparse files list stored entries only; an explicit zero keeps an empty row
    (or a trailing all-zero column) recoverable on reload.

    Args:
        path: Destination file
        item_ids: Identifiers of the matrix rows
        features: (N, d) numpy array or sparse matrix
    """
    if not sparse.issparse(features):
        matrix = np.asarray(features, dtype=float)
        columns = ["item_id"] + [f"f{j}" for j in range(matrix.shape[1])]
        rows = ([item_id] + [format_real(v) for v in row] for item_id, row in zip(item_ids, matrix))
        write_table(path, columns, rows)
        return

    matrix = sparse.csr_matrix(features)
    matrix.sort_indices()
    dimension = matrix.shape[1]
    rows = []
    for row, item_id in enumerate(item_ids):
        start, end = matrix.indptr[row], matrix.indptr[row + 1]
        indices = matrix.indices[start:end]
        values = matrix.data[start:end]
        if len(indices) == 0:
            indices, values = np.array([0]), np.array([0.0])
        rows.extend([item_id, int(index), format_real(value)] for index, value in zip(indices, values))
        if row == 0 and dimension > 0 and indices[-1] != dimension - 1:
            rows.append([item_id, dimension - 1, "0"])
    write_table(path, SPARSE_FEATURE_COLUMNS, rows)


def write_annotations(path: str, annotations: Iterable[AnnotationRecord]) -> None:
    """Write annotation records in the item_id,context_id,annotator_id,label format"""
    write_table(
        path,
        ANNOTATION_COLUMNS,
        ([r.item_id, r.context_id, r.annotator_id, int(r.label)] for r in annotations),
    )


def write_gold(path: str, gold: Dict[str, Label]) -> None:
    """Write gold labels in the item_id,label format"""
    write_table(path, GOLD_COLUMNS, ([item_id, int(label)] for item_id, label in gold.items()))


def save_dataset(
    dataset: Dataset,
    annotations_path: str,
    features_path: str,
    gold_path: Optional[str] = None,
) -> None:
    """
    Save a dataset so that load_dataset returns an equal Dataset

    Args:
        dataset: Dataset to save
        annotations_path: Destination annotation file
        features_path: Destination feature file
        gold_path: Destination gold file (skipped when None)
    """
    write_annotations(annotations_path, dataset.annotations)
    write_features(features_path, dataset.item_ids, dataset.feature_matrix())
    if gold_path:
        write_gold(gold_path, dataset.gold_labels())
    logger.info(f"Saved dataset with {dataset.n_items} items to {annotations_path}")
