"""Smith normal form algorithm."""

import logging
from typing import Any, Dict

import numpy as np

from dgt_core import Window, as_full, dgt_sep, idgt_sep
from lattice import GaborLattice, smith2x2, weil_decompose
from metaplectic import metaplectic_apply, metaplectic_phase, unit_phase

from .base import BaseDgtAlgorithm

logger = logging.getLogger(__name__)


class SnfAlgorithm(BaseDgtAlgorithm):
    """
    Factor [[a, 0], [s, b]] = P D V; the lattice is P applied to D Z^2.

    The signal and window go through U_P^-1, the rectangular DGT runs on
    diag(d1, d2) and the phases of U_P are attached per point.
    """

    name = "snf"

    def __init__(self, lat: GaborLattice):
        super().__init__(lat)
        L = lat.L
        self.smith = smith2x2(((lat.a, 0), (lat.s, lat.b)), L)
        self.d1, self.d2 = self.smith.d1, self.smith.d2
        self.factors = weil_decompose(self.smith.P)

        i = np.arange(L // self.d1, dtype=np.int64)
        k = np.arange(L // self.d2, dtype=np.int64)
        yx = np.broadcast_to(self.d1 * i[None, :], (k.shape[0], i.shape[0]))
        yw = np.broadcast_to(self.d2 * k[:, None], yx.shape)
        E, zx, zw = metaplectic_phase(self.factors, yx, yw)
        self.phase = unit_phase(E, L)
        self.rows, self.cols = lat.coefficient_index(zx, zw)
        logger.debug(f"SNF plan {lat}: D=diag({self.d1}, {self.d2}), {len(self.factors.factors)} factors")

    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        f = self._check_signal(f)
        fp = metaplectic_apply(self.factors, f, inverse=True)
        gp = metaplectic_apply(self.factors, as_full(g, self.lat.L), inverse=True)
        inner = dgt_sep(fp, gp, self.d1, self.lat.L // self.d2)
        c = np.empty((self.lat.M, self.lat.N), dtype=complex)
        c[self.rows, self.cols] = self.phase * inner
        return c

    def adjoint(self, c: np.ndarray, gd: Window) -> np.ndarray:
        c = self._check_coefficients(c)
        inner = np.conj(self.phase) * c[self.rows, self.cols]
        gp = metaplectic_apply(self.factors, as_full(gd, self.lat.L), inverse=True)
        h = idgt_sep(inner, gp, self.d1, self.lat.L // self.d2)
        return metaplectic_apply(self.factors, h)

    def describe(self) -> Dict[str, Any]:
        return {"algorithm": self.name, "d1": self.d1, "d2": self.d2}


def dgtns_snf(f: np.ndarray, g: Window, lat: GaborLattice) -> np.ndarray:
    """DGT on a general lattice by the Smith normal form algorithm."""
    return SnfAlgorithm(lat).forward(f, g)
