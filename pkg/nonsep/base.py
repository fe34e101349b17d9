"""Base class for nonseparable DGT algorithms."""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from dgt_core import Window, check_grid
from exceptions import DimensionError
from lattice import GaborLattice

logger = logging.getLogger(__name__)


class BaseDgtAlgorithm(ABC):
    """
    Abstract base class for DGT algorithms on a fixed lattice.

    Subclasses do their planning (decompositions, index maps, phases) in
    __init__ so one instance can transform many signals.
    """

    name = "base"

    def __init__(self, lat: GaborLattice):
        self.lat = lat

    def _check_signal(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=complex)
        if f.ndim != 1 or f.shape[0] != self.lat.L:
            raise DimensionError(f"signal of shape {f.shape} does not match L={self.lat.L}")
        return f

    def _check_coefficients(self, c: np.ndarray) -> np.ndarray:
        return check_grid(c, self.lat.M, self.lat.N)

    @abstractmethod
    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        """Analysis: the (M, N) grid of <f, pi(z) g> over the lattice."""
        pass

    def adjoint(self, c: np.ndarray, gd: Window) -> np.ndarray:
        """Synthesis: sum over the lattice of c(z) pi(z) gd."""
        raise NotImplementedError(f"{self.name} has no synthesis")

    def describe(self) -> Dict[str, Any]:
        """Plan details for status output."""
        return {"algorithm": self.name}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.lat})"
