"""Quantum-kernel support vector machines on an exact statevector simulator."""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND
from .featuremap import FeatureMapConfig, prepare_state
from .kernel import KernelConfig, KernelMatrix, cross_gram, gram_matrix
from .svm import SvmModel, train_dual

__all__ = [
    "BACKEND",
    "FeatureMapConfig",
    "KernelConfig",
    "KernelMatrix",
    "SvmModel",
    "cross_gram",
    "gram_matrix",
    "prepare_state",
    "train_dual",
]
