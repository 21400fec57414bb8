"""Useful decorators for the aggregation toolkit"""

import logging
import time
from functools import wraps
from typing import Any, Callable

import numpy as np


def log_execution_time(logger: logging.Logger = None):
    """
    Decorator to log function execution time

    Args:
        logger: Logger instance to use (creates default if None)
    """
    def decorator(func: Callable) -> Callable:
        nonlocal logger
        if logger is None:
            logger = logging.getLogger(func.__module__)

        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
                execution_time = time.perf_counter() - start_time
                logger.debug(f"{func.__name__} executed in {execution_time:.3f}s")
                return result
            except Exception as e:
                execution_time = time.perf_counter() - start_time
                logger.debug(f"{func.__name__} failed after {execution_time:.3f}s: {e}")
                raise

        return wrapper
    return decorator


def validate_probability_output(atol: float = 1e-9):
    """
    Decorator to validate that a function returns probability vectors

    The wrapped function must return an array whose last axis is a
    distribution (a single vector or one row per item).

    Args:
        atol: Allowed deviation of every row sum from 1
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            result = func(*args, **kwargs)
            probs = np.asarray(result, dtype=float)
            if probs.size == 0:
                return result

            problems = []
            if not np.all(np.isfinite(probs)):
                problems.append("non-finite entries")
            elif np.any(probs < 0):
                problems.append("negative entries")
            else:
                deviation = np.max(np.abs(probs.sum(axis=-1) - 1.0))
                if deviation > atol:
                    problems.append(f"row sums deviate from 1 by {deviation:.3g}")

            if problems:
                logging.getLogger(func.__module__).warning(
                    f"{func.__name__} returned invalid probabilities: {problems}"
                )
                raise ValueError(f"{func.__name__} returned invalid probabilities: {', '.join(problems)}")
            return result

        return wrapper
    return decorator
