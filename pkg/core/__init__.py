# core/__init__.py
"""Core functionality: data model, noise matrices, EM, classifiers, baselines, simulation and metrics"""

from .annotations import Dataset, Label, group_annotations, load_dataset
from .classifier import ClassifierSpec
from .em_engine import FitConfig, fit
from .noise_model import ModelParameters, TransitionMatrix

__all__ = [
    'ClassifierSpec', 'Dataset', 'FitConfig', 'Label', 'ModelParameters',
    'TransitionMatrix', 'fit', 'group_annotations', 'load_dataset',
]
