"""Multiwindow algorithm: lambda2 rectangular transforms, one per coset."""

import logging
from typing import Any, Dict, List

import numpy as np

from dgt_core import FirWindow, Window, as_full, dgt_fir, dgt_sep, idgt_sep, multiwindow_windows
from lattice import GaborLattice, multiwin_decomp

from .base import BaseDgtAlgorithm

logger = logging.getLogger(__name__)


class MultiwinAlgorithm(BaseDgtAlgorithm):
    """
    Coefficients of coset j live in the columns n = j (mod lambda2).

    Coset j uses the window pi(a*j, j*s mod b) g on the lattice (lambda2*a, b)
    and picks up exp(-2*pi*i*n'*lambda2*a*(j*s mod b)/L) at column n'.
    """

    name = "multiwin"

    def __init__(self, lat: GaborLattice):
        super().__init__(lat)
        self.decomp = multiwin_decomp(lat)
        L = lat.L
        n_sub = np.arange(lat.N // self.decomp.lambda2, dtype=np.int64)
        self.phases: List[np.ndarray] = [
            np.exp(-2j * np.pi * ((n_sub * self.decomp.base_a * sigma) % L) / L)
            for _, sigma in self.decomp.offsets
        ]
        logger.debug(f"Multiwindow plan {lat}: {self.decomp.lambda2} windows")

    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        f = self._check_signal(f)
        lat, lam2 = self.lat, self.decomp.lambda2
        c = np.empty((lat.M, lat.N), dtype=complex)
        for j, gj in enumerate(multiwindow_windows(g, lat)):
            if isinstance(gj, FirWindow):
                cj = dgt_fir(f, gj, self.decomp.base_a, lat.M)
            else:
                cj = dgt_sep(f, gj, self.decomp.base_a, lat.M)
            c[:, j::lam2] = self.phases[j][None, :] * cj
        return c

    def adjoint(self, c: np.ndarray, gd: Window) -> np.ndarray:
        c = self._check_coefficients(c)
        lat, lam2 = self.lat, self.decomp.lambda2
        f = np.zeros(lat.L, dtype=complex)
        for j, gj in enumerate(multiwindow_windows(gd, lat)):
            cj = np.conj(self.phases[j])[None, :] * c[:, j::lam2]
            f += idgt_sep(cj, as_full(gj, lat.L), self.decomp.base_a, lat.M)
        return f

    def describe(self) -> Dict[str, Any]:
        return {
            "algorithm": self.name,
            "windows": self.decomp.lambda2,
            "base_a": self.decomp.base_a,
            "base_b": self.decomp.base_b,
        }


def dgtns_multiwin(f: np.ndarray, g: Window, lat: GaborLattice) -> np.ndarray:
    """DGT on a general lattice by the multiwindow algorithm."""
    return MultiwinAlgorithm(lat).forward(f, g)
