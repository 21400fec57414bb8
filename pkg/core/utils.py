"""Utility functions shared by the artifact writers"""

import json
import logging
import os
from typing import Dict, Iterable, Sequence

import pandas as pd

logger = logging.getLogger(__name__)

# 17 significant digits reproduce any float64 exactly
REAL_FORMAT = ".17g"


def format_real(value: float) -> str:
    """
    Format a real number so that float(format_real(x)) == x

    Args:
        value: Number to format

    Returns:
        Decimal string with 17 significant digits
    """
    return format(float(value), REAL_FORMAT)


def ensure_parent_directory(path: str) -> None:
    """Create the directory that will hold path if it doesn't exist"""
    directory = os.path.dirname(os.path.abspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)


def ensure_directory(directory: str) -> str:
    """
    Create directory if needed and verify that it is writable

    Args:
        directory: Directory path

    Returns:
        The directory path

    Raises:
        PermissionError: If the directory exists but cannot be written
    """
    os.makedirs(directory, exist_ok=True)
    if not os.access(directory, os.W_OK):
        raise PermissionError(f"Output directory {directory} is not writable")
    return directory


def write_lines(path: str, lines: Iterable[str]) -> None:
    """
    Write lines to a text file with a trailing newline, creating parent directories

    Args:
        path: Destination file
        lines: Lines without newline characters
    """
    ensure_parent_directory(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in lines:
            handle.write(line)
            handle.write("\n")
    logger.debug("Wrote %s", path)


def write_table(path: str, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    """
    Write a comma-separated table through pandas, quoting fields that need it

    Cells are written as given; format reals with format_real first.

    Args:
        path: Destination file
        columns: Header names
        rows: One sequence of cells per row
    """
    ensure_parent_directory(path)
    frame = pd.DataFrame([[str(cell) for cell in row] for row in rows], columns=list(columns), dtype=str)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    logger.debug("Wrote %s", path)


def load_json_file(path: str) -> Dict:
    """
    Load a JSON object from file

    Args:
        path: JSON file path

    Returns:
        Parsed dictionary
    """
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError(f"{path} must contain a JSON object")
    return data


def save_json_file(path: str, data: Dict) -> None:
    """Save a dictionary as indented, key-sorted JSON"""
    ensure_parent_directory(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")
