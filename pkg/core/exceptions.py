"""Exception hierarchy for the annotation aggregation toolkit"""

from typing import Optional


class ConStanceError(Exception):
    """Base class for every error raised by this package"""


class DatasetError(ConStanceError, ValueError):
    """Raised when an annotation, feature or gold file fails validation"""

    def __init__(self, message: str, row: Optional[int] = None, path: Optional[str] = None):
        self.row = row
        self.path = path
        location = ""
        if path:
            location += f"{path}: "
        if row is not None:
            location += f"row {row}: "
        super().__init__(f"{location}{message}")


class MatrixError(ConStanceError, ValueError):
    """Raised when a transition matrix is malformed or cannot be normalized"""


class ModelParameterError(ConStanceError, KeyError):
    """Raised when parameters lack a matrix for a referenced context or annotator"""

    def __str__(self) -> str:
        # KeyError quotes its argument; keep messages readable
        return str(self.args[0]) if self.args else ""


class LikelihoodError(ConStanceError, ArithmeticError):
    """Raised when an item's total configuration mass is zero"""


class MonotonicityError(ConStanceError, RuntimeError):
    """Raised when the log-likelihood trace decreases beyond the allowed slack"""


class ConfigError(ConStanceError, ValueError):
    """Raised for invalid run configuration"""
