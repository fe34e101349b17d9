"""
Shear algorithm.

The lattice is sheared into a rectangular one by a time chirp (s1) and, when
that is not enough, a frequency chirp (s0) applied in the Fourier domain. The
rectangular transform then runs on the chirped signal and the coefficients
are moved back with exact integer phases.
"""

import logging
from typing import Any, Dict

import numpy as np
import scipy.fft

from dgt_core import FirWindow, Window, as_full, dgt_fir, dgt_sep, idgt_sep
from lattice import GaborLattice, ShearDecomp, shearfind
from metaplectic import chirp_exponent, pchirp, unit_phase

from .base import BaseDgtAlgorithm

logger = logging.getLogger(__name__)


class ShearAlgorithm(BaseDgtAlgorithm):
    """Transform via shearfind and one rectangular DGT."""

    name = "shear"

    def __init__(self, lat: GaborLattice):
        super().__init__(lat)
        L = lat.L
        self.shear: ShearDecomp = shearfind(L, lat.a, lat.M, lat.lambda1, lat.lambda2)
        sh = self.shear
        self.freq = sh.freq_shear_needed
        self.time_chirp = pchirp(L, sh.s1) if sh.s1 else None
        # frequency-side chirp parameter
        self.c = (-sh.s0) % L

        x, w = lat.grid_points()
        x = np.broadcast_to(x[None, :], w.shape)
        wp = (w + sh.s1 * x) % L
        E = chirp_exponent(sh.s1, x, L)
        if self.freq:
            self.freq_chirp = pchirp(L, self.c)
            E = (E - 2 * ((x * wp) % L) + chirp_exponent(self.c, wp, L)) % (2 * L)
            v = (-x - sh.s0 * wp) % L
            self.rows, self.cols = v // sh.a_r, wp // sh.b_r
            self.inner_shape = (sh.N_r, sh.M_r)
            self.scale = 1.0 / L
        else:
            self.freq_chirp = None
            self.rows, self.cols = wp // sh.b_r, x // sh.a_r
            self.inner_shape = (sh.M_r, sh.N_r)
            self.scale = 1.0
        self.phase = unit_phase(E, L)
        logger.debug(
            f"Shear plan {lat}: s0={sh.s0} s1={sh.s1} "
            f"{'frequency' if self.freq else 'time'} path, a_r={sh.a_r} b_r={sh.b_r}"
        )

    def transport(self, f: np.ndarray) -> np.ndarray:
        """Chirp (and Fourier transform) a signal into the rectangular problem."""
        if self.time_chirp is not None:
            f = self.time_chirp * f
        if self.freq:
            f = self.freq_chirp * scipy.fft.fft(f)
        return f

    def transport_adjoint(self, h: np.ndarray) -> np.ndarray:
        if self.freq:
            h = self.lat.L * scipy.fft.ifft(np.conj(self.freq_chirp) * h)
        if self.time_chirp is not None:
            h = np.conj(self.time_chirp) * h
        return h

    def _inner_params(self):
        sh = self.shear
        if self.freq:
            return sh.b_r, sh.N_r
        return sh.a_r, sh.M_r

    def _transport_window(self, g: Window) -> Window:
        if isinstance(g, FirWindow) and not self.freq:
            if self.time_chirp is None:
                return g
            pos = (g.offset + np.arange(len(g))) % self.lat.L
            return FirWindow(self.time_chirp[pos] * g.values, g.offset)
        return self.transport(as_full(g, self.lat.L))

    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        f = self.transport(self._check_signal(f))
        gt = self._transport_window(g)
        step, channels = self._inner_params()
        if isinstance(gt, FirWindow):
            inner = dgt_fir(f, gt, step, channels)
        else:
            inner = dgt_sep(f, gt, step, channels)
        return self.scale * self.phase * inner[self.rows, self.cols]

    def adjoint(self, c: np.ndarray, gd: Window) -> np.ndarray:
        c = self._check_coefficients(c)
        inner = np.zeros(self.inner_shape, dtype=complex)
        inner[self.rows, self.cols] = self.scale * np.conj(self.phase) * c
        step, channels = self._inner_params()
        wd = self.transport(as_full(gd, self.lat.L))
        return self.transport_adjoint(idgt_sep(inner, wd, step, channels))

    def describe(self) -> Dict[str, Any]:
        sh = self.shear
        return {
            "algorithm": self.name,
            "s0": sh.s0,
            "s1": sh.s1,
            "a_r": sh.a_r,
            "b_r": sh.b_r,
            "freq_shear": sh.freq_shear_needed,
            "time_shear": sh.time_shear_needed,
        }


def dgtns_shear(f: np.ndarray, g: Window, lat: GaborLattice) -> np.ndarray:
    """DGT on a general lattice by the shear algorithm."""
    return ShearAlgorithm(lat).forward(f, g)


def idgtns(c: np.ndarray, gd: Window, lat: GaborLattice) -> np.ndarray:
    """Inverse DGT: sum over the lattice of c(z) pi(z) gd."""
    return ShearAlgorithm(lat).adjoint(c, gd)
