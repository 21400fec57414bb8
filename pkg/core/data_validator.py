"""Annotation, feature and gold table validation and cleaning utilities"""

import logging
import math
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import sparse

from core.exceptions import DatasetError

ANNOTATION_COLUMNS = ("item_id", "context_id", "annotator_id", "label")
GOLD_COLUMNS = ("item_id", "label")
SPARSE_FEATURE_COLUMNS = ("item_id", "feature_index", "value")
PROBABILITY_COLUMNS = ("item_id", "p_neg1", "p_0", "p_1")

# Data rows start on the second line of every file
FIRST_DATA_LINE = 2


@dataclass
class ValidationRules:
    """Configuration for table validation rules"""

    # Label literals accepted in annotation and gold files
    allowed_labels: Tuple[int, ...] = (-1, 0, 1)

    # Column separator of every delimited file
    delimiter: str = ","

    # Reject non-finite feature values (nan, inf)
    require_finite_features: bool = True


class AnnotationDataValidator:
    """Validates and cleans delimited tables before they become a Dataset"""

    def __init__(self, rules: ValidationRules = None):
        self.rules = rules or ValidationRules()
        self.logger = logging.getLogger(__name__)

    def read_table(self, path: str) -> pd.DataFrame:
        """
        Read a delimited text file as strings, mapping parser failures to DatasetError

        The header is tokenized like any other line, so a row with more
        fields than the header is a parser error rather than an index column.
        Cells are kept verbatim; quoted fields may contain the delimiter.

        Args:
            path: File to read

        Returns:
            DataFrame with every cell as a string
        """
        try:
            raw = pd.read_csv(
                path,
                sep=self.rules.delimiter,
                header=None,
                index_col=False,
                dtype=str,
                keep_default_na=False,
                na_filter=False,
            )
        except pd.errors.EmptyDataError:
            raise DatasetError("file is empty (a header row is required)", path=str(path))
        except pd.errors.ParserError as e:
            match = re.search(r"line (\d+)", str(e))
            row = int(match.group(1)) if match else None
            raise DatasetError(f"malformed row ({e})", row=row, path=str(path))

        frame = raw.iloc[1:].reset_index(drop=True)
        frame.columns = [str(c) for c in raw.iloc[0]]
        return frame

    def _clean_identifier(self, value: Any) -> Optional[str]:
        """Identifiers are taken verbatim; only a missing or empty cell is rejected"""
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return None
        text = str(value)
        return text if text else None

    def _clean_string(self, value: Any) -> Optional[str]:
        """Clean and validate string values"""
        if value is None:
            return None
        if isinstance(value, float) and math.isnan(value):
            return None
        text = str(value).strip()
        return text if text else None

    def _clean_float(self, value: Any) -> Optional[float]:
        """Clean and validate float values"""
        text = self._clean_string(value)
        if text is None:
            return None
        try:
            result = float(text)
        except (ValueError, TypeError):
            return None
        if self.rules.require_finite_features and not math.isfinite(result):
            return None
        return result

    def _clean_int(self, value: Any) -> Optional[int]:
        """Clean and validate integer values (no silent truncation of '1.5')"""
        text = self._clean_string(value)
        if text is None:
            return None
        try:
            return int(text)
        except (ValueError, TypeError):
            return None

    def _clean_label(self, value: Any) -> Optional[int]:
        """Clean a label literal; None unless it is one of the allowed labels"""
        number = self._clean_int(value)
        if number is None or number not in self.rules.allowed_labels:
            return None
        return number

    def _check_header(self, frame: pd.DataFrame, expected: Tuple[str, ...], path: str) -> None:
        columns = tuple(str(c).strip() for c in frame.columns)
        if columns != expected:
            raise DatasetError(
                f"expected header {','.join(expected)}, found {','.join(columns)}",
                row=1, path=path,
            )

    def validate_annotation_rows(self, frame: pd.DataFrame, path: str) -> List[Tuple[int, str, str, str, int]]:
        """
        Validate an annotation table

        Args:
            frame: Table read by read_table
            path: Source path, used in error messages

        Returns:
            List of (line number, item_id, context_id, annotator_id, label) tuples
        """
        self._check_header(frame, ANNOTATION_COLUMNS, path)
        if frame.empty:
            raise DatasetError("no annotation rows", path=path)

        rows = []
        for offset, record in enumerate(frame.itertuples(index=False, name=None)):
            line = FIRST_DATA_LINE + offset
            item_id, context_id, annotator_id = (self._clean_identifier(v) for v in record[:3])
            if item_id is None or context_id is None or annotator_id is None:
                self.logger.warning(f"Annotation row {line} has an empty identifier")
                raise DatasetError("empty identifier in annotation row", row=line, path=path)
            label = self._clean_label(record[3])
            if label is None:
                self.logger.warning(f"Annotation row {line} has invalid label {record[3]!r}")
                raise DatasetError(
                    f"label {record[3]!r} is not one of {list(self.rules.allowed_labels)}",
                    row=line, path=path,
                )
            rows.append((line, item_id, context_id, annotator_id, label))
        return rows

    def validate_gold_rows(self, frame: pd.DataFrame, path: str) -> List[Tuple[int, str, int]]:
        """
        Validate a gold label table

        Returns:
            List of (line number, item_id, label) tuples
        """
        self._check_header(frame, GOLD_COLUMNS, path)
        rows = []
        seen = set()
        for offset, record in enumerate(frame.itertuples(index=False, name=None)):
            line = FIRST_DATA_LINE + offset
            item_id = self._clean_identifier(record[0])
            label = self._clean_label(record[1])
            if item_id is None or label is None:
                raise DatasetError(f"invalid gold row {list(record)!r}", row=line, path=path)
            if item_id in seen:
                raise DatasetError(f"duplicate gold label for item {item_id}", row=line, path=path)
            seen.add(item_id)
            rows.append((line, item_id, label))
        return rows

    def validate_probability_rows(self, frame: pd.DataFrame, path: str) -> Tuple[List[str], np.ndarray]:
        """
        Validate a posterior or prediction table

        Returns:
            Tuple of (item ids, (N, 3) probabilities)
        """
        self._check_header(frame, PROBABILITY_COLUMNS, path)
        item_ids: List[str] = []
        values = np.empty((len(frame), len(PROBABILITY_COLUMNS) - 1), dtype=float)
        for offset, record in enumerate(frame.itertuples(index=False, name=None)):
            line = FIRST_DATA_LINE + offset
            item_id = self._clean_identifier(record[0])
            cleaned = [self._clean_float(v) for v in record[1:]]
            if item_id is None or any(v is None or v < 0 for v in cleaned):
                raise DatasetError(f"invalid probability row {list(record)!r}", row=line, path=path)
            item_ids.append(item_id)
            values[offset] = cleaned
        return item_ids, values

    def validate_feature_table(self, frame: pd.DataFrame, path: str) -> Tuple[List[str], Any]:
        """
        Validate a feature table, detecting dense or sparse triplet format from the header

        Args:
            frame: Table read by read_table
            path: Source path, used in error messages

        Returns:
            Tuple of (item ids in first-seen order, feature matrix). The matrix is a
            2-D numpy array for dense files and a CSR matrix for triplet files.
        """
        columns = tuple(str(c).strip() for c in frame.columns)
        if columns == SPARSE_FEATURE_COLUMNS:
            return self._validate_sparse_features(frame, path)
        if columns and columns[0] == "item_id" and len(columns) > 1:
            expected = tuple(f"f{j}" for j in range(len(columns) - 1))
            if columns[1:] == expected:
                return self._validate_dense_features(frame, path)
        raise DatasetError(
            "feature header must be item_id,f0,f1,... or item_id,feature_index,value",
            row=1, path=path,
        )

    def _validate_dense_features(self, frame: pd.DataFrame, path: str) -> Tuple[List[str], np.ndarray]:
        dimension = frame.shape[1] - 1
        item_ids: List[str] = []
        seen: Dict[str, int] = {}
        values = np.empty((len(frame), dimension), dtype=float)

        for offset, record in enumerate(frame.itertuples(index=False, name=None)):
            line = FIRST_DATA_LINE + offset
            item_id = self._clean_identifier(record[0])
            if item_id is None:
                raise DatasetError("empty item_id in feature row", row=line, path=path)
            if item_id in seen:
                raise DatasetError(f"duplicate feature row for item {item_id}", row=line, path=path)
            cells = record[1:]
            cleaned = [self._clean_float(v) for v in cells]
            if len(cleaned) != dimension or any(v is None for v in cleaned):
                raise DatasetError(
                    f"feature-dimension mismatch: expected {dimension} numeric values",
                    row=line, path=path,
                )
            seen[item_id] = offset
            item_ids.append(item_id)
            values[offset] = cleaned

        if not item_ids:
            raise DatasetError("no feature rows", path=path)
        return item_ids, values

    def _validate_sparse_features(self, frame: pd.DataFrame, path: str) -> Tuple[List[str], sparse.csr_matrix]:
        item_ids: List[str] = []
        positions: Dict[str, int] = {}
        entries = set()
        rows, cols, data = [], [], []

        for offset, record in enumerate(frame.itertuples(index=False, name=None)):
            line = FIRST_DATA_LINE + offset
            item_id = self._clean_identifier(record[0])
            index = self._clean_int(record[1])
            value = self._clean_float(record[2])
            if item_id is None or index is None or index < 0 or value is None:
                raise DatasetError(f"invalid feature triplet {list(record)!r}", row=line, path=path)
            if (item_id, index) in entries:
                raise DatasetError(
                    f"duplicate feature index {index} for item {item_id}", row=line, path=path
                )
            entries.add((item_id, index))
            if item_id not in positions:
                positions[item_id] = len(item_ids)
                item_ids.append(item_id)
            rows.append(positions[item_id])
            cols.append(index)
            data.append(value)

        if not item_ids:
            raise DatasetError("no feature rows", path=path)
        shape = (len(item_ids), max(cols) + 1)
        matrix = sparse.csr_matrix((data, (rows, cols)), shape=shape, dtype=float)
        return item_ids, matrix
