"""DGT algorithms for nonseparable lattices."""

import logging
from typing import Optional

from config import TransformConfig, get_config
from dgt_core import FirWindow, Window
from lattice import GaborLattice

from .base import BaseDgtAlgorithm
from .direct import NaiveAlgorithm, SeparableAlgorithm
from .duals import gabdualns, gabdualns_cg, gabtightns
from .multiwin import MultiwinAlgorithm, dgtns_multiwin
from .ola import OlaAlgorithm, OlaConfig, default_block_length, dgtns_ola
from .shear import ShearAlgorithm, dgtns_shear, idgtns
from .snf import SnfAlgorithm, dgtns_snf

logger = logging.getLogger(__name__)

ALGORITHMS = {
    cls.name: cls
    for cls in (NaiveAlgorithm, SeparableAlgorithm, ShearAlgorithm, MultiwinAlgorithm, SnfAlgorithm, OlaAlgorithm)
}


def choose_algorithm(lat: GaborLattice, g: Optional[Window] = None, cfg: Optional[TransformConfig] = None) -> str:
    """
    Pick an algorithm for `auto` mode.

    Rectangular lattices go straight to the separable transform, short FIR
    windows to shear-OLA, simple lattices (small lambda2) to the multiwindow
    algorithm and everything else to the shear algorithm.
    """
    if cfg is None:
        cfg = get_config().transform
    if lat.is_separable:
        return "separable"
    if isinstance(g, FirWindow) and len(g) * cfg.ola_ratio <= lat.L:
        return "ola"
    if lat.lambda2 <= cfg.multiwin_threshold:
        return "multiwin"
    return "shear"


def create_algorithm(name: str, lat: GaborLattice, g: Optional[Window] = None, **kwargs) -> BaseDgtAlgorithm:
    """Factory for DGT algorithms; `auto` resolves through choose_algorithm."""
    name = name.lower()
    if name == "auto":
        name = choose_algorithm(lat, g)
        logger.debug(f"auto dispatch for {lat}: {name}")
    if name not in ALGORITHMS:
        raise ValueError(f"Unknown algorithm: {name}")
    return ALGORITHMS[name](lat, **kwargs)


__all__ = [
    'ALGORITHMS',
    'BaseDgtAlgorithm',
    'MultiwinAlgorithm',
    'NaiveAlgorithm',
    'OlaAlgorithm',
    'OlaConfig',
    'SeparableAlgorithm',
    'ShearAlgorithm',
    'SnfAlgorithm',
    'choose_algorithm',
    'create_algorithm',
    'default_block_length',
    'dgtns_multiwin',
    'dgtns_ola',
    'dgtns_shear',
    'dgtns_snf',
    'gabdualns',
    'gabdualns_cg',
    'gabtightns',
    'idgtns',
]
