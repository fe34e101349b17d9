"""
Shear-OLA: blocked shear transform for FIR windows.

Each block of the signal is zero-padded, transformed by the shear
algorithm on a short lattice with the same a, M and lambda, and its
coefficients are added into the global grid with a modulation phase.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional

import numpy as np

from config import get_config
from dgt_core import FirWindow, Window
from exceptions import BlockLengthError
from lattice import GaborLattice, min_length

from .base import BaseDgtAlgorithm
from .shear import ShearAlgorithm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OlaConfig:
    """Block length L_b and window support L_g of a blocked transform."""
    block_length: int
    window_length: int

    @property
    def rho(self) -> Fraction:
        """Total length of the short transforms relative to L."""
        return Fraction(self.window_length + self.block_length, self.block_length)

    def block_count(self, L: int) -> int:
        return L // self.block_length

    def validate(self, lat: GaborLattice):
        Lb, Lg = self.block_length, self.window_length
        if Lb <= Lg:
            raise BlockLengthError(f"block length must exceed window support ({Lb} <= {Lg})")
        if lat.L % Lb:
            raise BlockLengthError(f"block length {Lb} does not divide L={lat.L}")
        step = lat.lambda2 * lat.a
        if Lb % step:
            raise BlockLengthError(f"block length {Lb} is not a multiple of lambda2*a={step}")

    def extended_length(self, lat: GaborLattice) -> int:
        """Shortest feasible padded length >= L_b + L_g."""
        l_min = min_length(lat.a, lat.M, lat.lambda1, lat.lambda2)
        target = self.block_length + self.window_length
        return -(-target // l_min) * l_min


def default_block_length(lat: GaborLattice, window_length: int, multiple: Optional[int] = None) -> int:
    """Divisor of L, multiple of lambda2*a, above L_g and closest to multiple*L_g."""
    if multiple is None:
        multiple = get_config().transform.ola_block_multiple
    step = lat.lambda2 * lat.a
    target = multiple * window_length
    candidates = [
        Lb for Lb in range(step, lat.L + 1, step)
        if lat.L % Lb == 0 and Lb > window_length
    ]
    if not candidates:
        raise BlockLengthError(f"no block length above L_g={window_length} for {lat}")
    return min(candidates, key=lambda Lb: (abs(Lb - target), Lb))


class OlaAlgorithm(BaseDgtAlgorithm):
    """Shear algorithm applied block by block."""

    name = "ola"

    def __init__(self, lat: GaborLattice, block_length: Optional[int] = None):
        super().__init__(lat)
        self.block_length = block_length
        self._plans: Dict[int, ShearAlgorithm] = {}

    def config_for(self, g: FirWindow) -> OlaConfig:
        Lb = self.block_length or default_block_length(self.lat, len(g))
        cfg = OlaConfig(Lb, len(g))
        cfg.validate(self.lat)
        return cfg

    def forward(self, f: np.ndarray, g: Window) -> np.ndarray:
        if not isinstance(g, FirWindow):
            g = FirWindow(g)
        return dgtns_ola(self._check_signal(f), g, self.lat, self.config_for(g), plans=self._plans)

    def describe(self) -> Dict[str, Any]:
        return {"algorithm": self.name, "block_length": self.block_length}


def dgtns_ola(
    f: np.ndarray,
    g: FirWindow,
    lat: GaborLattice,
    cfg: OlaConfig,
    plans: Optional[Dict[int, ShearAlgorithm]] = None,
) -> np.ndarray:
    """Blocked DGT; equal to the full-length transform for any valid block length."""
    f = np.asarray(f, dtype=complex)
    if not isinstance(g, FirWindow):
        g = FirWindow(g)
    cfg.validate(lat)
    L, a, Lb, Lg = lat.L, lat.a, cfg.block_length, len(g)
    if Lg > cfg.window_length:
        raise BlockLengthError(f"window support {Lg} exceeds the configured {cfg.window_length}")
    Lx = cfg.extended_length(lat)
    if plans is None:
        plans = {}
    if Lx not in plans:
        plans[Lx] = ShearAlgorithm(GaborLattice.from_params(Lx, a, lat.M, lat.lambda1, lat.lambda2))
    local = plans[Lx]
    logger.debug(
        f"OLA {lat}: {cfg.block_count(L)} blocks of {Lb}, padded to {Lx}, rho={cfg.rho}"
    )

    # local window positions, mapped to the interval where the window can meet the block
    lo = 1 - g.offset - Lg
    n_x = np.arange(Lx // a, dtype=np.int64)
    r = lo + (a * n_x - lo) % Lx

    _, w = lat.grid_points()
    rows = np.arange(lat.M)[:, None]
    c = np.zeros((lat.M, lat.N), dtype=complex)
    u = np.zeros(Lx, dtype=complex)
    for t in range(0, L, Lb):
        u[:Lb] = f[t:t + Lb]
        if not np.any(u[:Lb]):
            continue
        cx = local.forward(u, g)
        n_glob = ((t + r) // a) % lat.N
        wn = w[:, n_glob]
        phase = np.exp(-2j * np.pi * ((t * wn) % L) / L)
        np.add.at(c, (rows, n_glob[None, :]), phase * cx)
    return c
