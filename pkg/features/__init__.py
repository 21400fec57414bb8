"""Feature modules for the aggregation toolkit.

This package provides the n-gram text featurizer.
"""
