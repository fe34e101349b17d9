"""
Canonical dual and tight windows on general lattices.

A unitary chirp/Fourier operator Q maps the lattice onto a rectangular one
and conjugates the frame operator, S_{g} = Q* S_{Qg} Q, so both windows are
computed for the rectangular problem and mapped back.
"""

import logging
from typing import Callable, Optional

import numpy as np
import scipy.fft
from scipy.sparse.linalg import LinearOperator, cg

from config import get_config
from dgt_core import (
    Window,
    check_frame_spectrum,
    as_full,
    frame_blocks,
    frame_op_apply,
    gabdual_sep,
    gabtight_sep,
    multiwindow_windows,
    solve_blocks,
)
from exceptions import NotAFrameError
from lattice import GaborLattice, shearfind
from metaplectic import pchirp

logger = logging.getLogger(__name__)


def _through_shear(g: Window, lat: GaborLattice, solve: Callable[[np.ndarray, int, int], np.ndarray]) -> np.ndarray:
    L = lat.L
    g = as_full(g, L)
    sh = shearfind(L, lat.a, lat.M, lat.lambda1, lat.lambda2)
    p1 = pchirp(L, sh.s1)
    if not sh.freq_shear_needed:
        return np.conj(p1) * solve(p1 * g, sh.a_r, sh.M_r)
    pc = pchirp(L, -sh.s0)
    h = solve(pc * scipy.fft.fft(p1 * g, norm="ortho"), sh.b_r, sh.N_r)
    return np.conj(p1) * scipy.fft.ifft(np.conj(pc) * h, norm="ortho")


def gabdualns(g: Window, lat: GaborLattice) -> np.ndarray:
    """Canonical dual window S^-1 g through the shear decomposition."""
    return _through_shear(g, lat, gabdual_sep)


def gabtightns(g: Window, lat: GaborLattice) -> np.ndarray:
    """Canonical tight window S^-1/2 g through the shear decomposition."""
    return _through_shear(g, lat, gabtight_sep)


def gabdualns_cg(
    g: Window,
    lat: GaborLattice,
    tol: Optional[float] = None,
    maxiter: Optional[int] = None,
) -> np.ndarray:
    """Canonical dual by conjugate gradients with S as a sum of multiwindow frame operators."""
    cfg = get_config()
    L = lat.L
    g = as_full(g, L)
    tol = cfg.solver.cg_tol if tol is None else tol
    maxiter = cfg.solver.cg_maxiter_factor * L if maxiter is None else maxiter

    blocks = None
    if lat.b <= cfg.limits.dense_limit:
        # every multiwindow frame operator shares the block structure of M channels
        blocks = sum(
            frame_blocks(as_full(gj, L), lat.lambda2 * lat.a, lat.M)
            for gj in multiwindow_windows(g, lat)
        )
        check_frame_spectrum(np.linalg.eigvalsh(blocks), cfg.solver.frame_ratio)

    def matvec(v):
        return frame_op_apply(np.asarray(v, dtype=complex).ravel(), g, lat)

    S = LinearOperator((L, L), matvec=matvec, dtype=complex)
    gd, info = cg(S, g, rtol=tol, atol=0.0, maxiter=maxiter)
    if info == 0:
        logger.debug(f"gabdualns_cg {lat}: converged")
        return gd
    if blocks is None:
        raise NotAFrameError(f"conjugate gradients did not converge in {maxiter} iterations")
    logger.warning(f"CG stalled for {lat}; solving the frame blocks directly")
    return solve_blocks(blocks, g)
