"""Reference summation and the rectangular lattice transform."""

import logging

import numpy as np

from dgt_core import FirWindow, Window, dgt_fir, dgt_naive, dgt_sep, idgt_sep
from exceptions import IllegalLengthError
from lattice import GaborLattice

from .base import BaseDgtAlgorithm

logger = logging.getLogger(__name__)


class NaiveAlgorithm(BaseDgtAlgorithm):
    """Direct O(L*M*N) summation."""

    name = "naive"

    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        return dgt_naive(self._check_signal(f), g, self.lat)


class SeparableAlgorithm(BaseDgtAlgorithm):
    """Rectangular lattices only; FIR windows go through dgt_fir."""

    name = "separable"

    def __init__(self, lat: GaborLattice):
        if not lat.is_separable:
            raise IllegalLengthError(f"lattice {lat} is not separable")
        super().__init__(lat)

    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        f = self._check_signal(f)
        if isinstance(g, FirWindow):
            return dgt_fir(f, g, self.lat.a, self.lat.M)
        return dgt_sep(f, g, self.lat.a, self.lat.M)

    def adjoint(self, c: np.ndarray, gd: Window) -> np.ndarray:
        return idgt_sep(self._check_coefficients(c), gd, self.lat.a, self.lat.M)
