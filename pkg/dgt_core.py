"""
Separable Gabor transforms and frame machinery.

Coefficients are c(m, n) = <f, pi(a*n, b*m + (n*s mod b)) g> stored as an
(M, N) array. Analysis is unnormalized; synthesis is its adjoint.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
import scipy.fft
from scipy.sparse.linalg import LinearOperator, cg

from config import get_config
from exceptions import DimensionError, IllegalLengthError, NotAFrameError, OracleLimitError
from lattice import GaborLattice

logger = logging.getLogger(__name__)

# elements per temporary array in the chunked loops
_CHUNK_ELEMENTS = 1 << 22


@dataclass
class FirWindow:
    """Window supported on offset, offset+1, ..., offset+len(values)-1 (mod L)."""
    values: np.ndarray
    offset: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).ravel()
        self.offset = int(self.offset)

    def __len__(self) -> int:
        return self.values.shape[0]

    def to_full(self, L: int) -> np.ndarray:
        if len(self) > L:
            raise DimensionError(f"FIR window of length {len(self)} exceeds L={L}")
        g = np.zeros(L, dtype=complex)
        np.add.at(g, (self.offset + np.arange(len(self))) % L, self.values)
        return g

    @classmethod
    def from_full(cls, g: np.ndarray, Lg: int) -> "FirWindow":
        """Keep the Lg samples centered around index 0."""
        g = np.asarray(g, dtype=complex)
        L = g.shape[0]
        if not 1 <= Lg <= L:
            raise DimensionError(f"window support {Lg} must lie in [1, {L}]")
        offset = -(Lg // 2)
        return cls(g[(offset + np.arange(Lg)) % L], offset)


Window = Union[np.ndarray, FirWindow]


def as_full(g: Window, L: int) -> np.ndarray:
    if isinstance(g, FirWindow):
        return g.to_full(L)
    g = np.asarray(g, dtype=complex)
    if g.ndim != 1 or g.shape[0] != L:
        raise DimensionError(f"window of shape {g.shape} does not match L={L}")
    return g


def _as_signal(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1:
        raise DimensionError(f"expected a 1-D signal, got shape {f.shape}")
    return f


def check_lengths(L: int, a: int, M: int):
    if a < 1 or M < 1 or L % a or L % M:
        raise IllegalLengthError(f"a={a} and M={M} must divide L={L}")


def check_grid(c: np.ndarray, M: int, N: int) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.shape != (M, N):
        raise DimensionError(f"coefficient grid of shape {c.shape}, expected ({M}, {N})")
    return c


def _chunks(N: int, width: int):
    step = max(1, _CHUNK_ELEMENTS // max(width, 1))
    for start in range(0, N, step):
        yield np.arange(start, min(N, start + step), dtype=np.int64)


# --- transforms ---------------------------------------------------------------

def dgt_naive(f: np.ndarray, g: Window, lat: GaborLattice, limit: Optional[int] = None) -> np.ndarray:
    """Direct summation over the lattice; the reference for every fast path."""
    f = _as_signal(f)
    L = lat.L
    if f.shape[0] != L:
        raise DimensionError(f"signal length {f.shape[0]} does not match L={L}")
    if limit is None:
        limit = get_config().limits.naive_limit
    if L > limit:
        raise OracleLimitError("dgt_naive", L, limit)
    g = as_full(g, L)
    x, w = lat.grid_points()
    l = np.arange(L, dtype=np.int64)
    c = np.empty((lat.M, lat.N), dtype=complex)
    for n in range(lat.N):
        h = f * np.conj(np.roll(g, x[n]))
        kernel = np.exp(-2j * np.pi * ((w[:, n, None] * l[None, :]) % L) / L)
        c[:, n] = kernel @ h
    return c


def dgt_sep(f: np.ndarray, g: Window, a: int, M: int) -> np.ndarray:
    """Rectangular lattice DGT: modulate by the shifted window, fold to M, FFT."""
    f = _as_signal(f)
    L = f.shape[0]
    check_lengths(L, a, M)
    g = as_full(g, L)
    N = L // a
    l = np.arange(L, dtype=np.int64)
    c = np.empty((M, N), dtype=complex)
    for n in _chunks(N, L):
        h = f[None, :] * np.conj(g[(l[None, :] - a * n[:, None]) % L])
        folded = h.reshape(n.shape[0], L // M, M).sum(axis=1)
        c[:, n] = scipy.fft.fft(folded, axis=1).T
    return c


def dgt_fir(f: np.ndarray, g: FirWindow, a: int, M: int) -> np.ndarray:
    """Rectangular lattice DGT touching only the window support."""
    f = _as_signal(f)
    L = f.shape[0]
    check_lengths(L, a, M)
    if not isinstance(g, FirWindow):
        g = FirWindow(g)
    if len(g) > L:
        raise DimensionError(f"FIR window of length {len(g)} exceeds L={L}")
    N = L // a
    k = np.arange(len(g), dtype=np.int64)
    c = np.empty((M, N), dtype=complex)
    for n in _chunks(N, len(g)):
        idx = (a * n[:, None] + g.offset + k[None, :]) % L
        h = f[idx] * np.conj(g.values)[None, :]
        folded = np.zeros((n.shape[0], M), dtype=complex)
        rows = np.broadcast_to(np.arange(n.shape[0])[:, None], idx.shape)
        np.add.at(folded, (rows, idx % M), h)
        c[:, n] = scipy.fft.fft(folded, axis=1).T
    return c


def idgt_sep(c: np.ndarray, gd: Window, a: int, M: int) -> np.ndarray:
    """Synthesis sum_{m,n} c(m, n) pi(a*n, b*m) gd."""
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2 or c.shape[0] != M:
        raise DimensionError(f"coefficient grid of shape {c.shape} does not have {M} channels")
    N = c.shape[1]
    L = N * a
    check_lengths(L, a, M)
    gd = as_full(gd, L)
    l = np.arange(L, dtype=np.int64)
    f = np.zeros(L, dtype=complex)
    for n in _chunks(N, L):
        h = M * scipy.fft.ifft(c[:, n], axis=0)
        tiled = np.tile(h.T, (1, L // M))
        f += (tiled * gd[(l[None, :] - a * n[:, None]) % L]).sum(axis=0)
    return f


# --- multiwindow structure and frame operators --------------------------------

def multiwindow_windows(g: Window, lat: GaborLattice) -> List[Window]:
    """Windows pi(a*j, j*s mod b) g for j < lambda2, one per coset of (lambda2*a, b)."""
    L = lat.L
    windows = []
    for j in range(lat.lambda2):
        shift, sigma = lat.a * j, (j * lat.s) % lat.b
        if isinstance(g, FirWindow):
            pos = (g.offset + shift + np.arange(len(g), dtype=np.int64)) % L
            mod = np.exp(2j * np.pi * ((pos * sigma) % L) / L)
            windows.append(FirWindow(g.values * mod, g.offset + shift))
        else:
            full = as_full(g, L)
            l = np.arange(L, dtype=np.int64)
            windows.append(np.exp(2j * np.pi * ((l * sigma) % L) / L) * np.roll(full, shift))
    return windows


def frame_op_apply(f: np.ndarray, g: Window, lat: GaborLattice) -> np.ndarray:
    """S f as the sum of the separable frame operators of the multiwindow system."""
    f = _as_signal(f)
    if f.shape[0] != lat.L:
        raise DimensionError(f"signal length {f.shape[0]} does not match L={lat.L}")
    step = lat.lambda2 * lat.a
    out = np.zeros(lat.L, dtype=complex)
    for gj in multiwindow_windows(g, lat):
        gj = as_full(gj, lat.L)
        out += idgt_sep(dgt_sep(f, gj, step, lat.M), gj, step, lat.M)
    return out


def frame_matrix(g: Window, lat: GaborLattice, limit: Optional[int] = None) -> np.ndarray:
    """Dense frame operator, sum over lattice points of the rank-one projections."""
    L = lat.L
    if limit is None:
        limit = get_config().limits.dense_limit
    if L > limit:
        raise OracleLimitError("frame_matrix", L, limit)
    g = as_full(g, L)
    x, w = lat.grid_points()
    l = np.arange(L, dtype=np.int64)
    S = np.zeros((L, L), dtype=complex)
    for n in range(lat.N):
        atoms = np.exp(2j * np.pi * ((l[:, None] * w[None, :, n]) % L) / L) * np.roll(g, x[n])[:, None]
        S += atoms @ atoms.conj().T
    return S


def frame_blocks(g: np.ndarray, a: int, M: int) -> np.ndarray:
    """
    The M diagonal blocks of the separable frame operator.

    Block j acts on the samples j, j+M, j+2M, ...; shape (M, b, b) with b = L/M.
    """
    g = _as_signal(g)
    L = g.shape[0]
    check_lengths(L, a, M)
    b, N = L // M, L // a
    r = np.arange(b, dtype=np.int64)
    n = np.arange(N, dtype=np.int64)
    blocks = np.empty((M, b, b), dtype=complex)
    for j in _chunks(M, b * N):
        G = g[(j[:, None, None] + M * r[None, :, None] - a * n[None, None, :]) % L]
        blocks[j] = M * np.einsum('jrn,jsn->jrs', G, G.conj())
    return blocks


def _block_index(L: int, M: int) -> np.ndarray:
    return np.arange(M, dtype=np.int64)[:, None] + M * np.arange(L // M, dtype=np.int64)[None, :]


def solve_blocks(blocks: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Solve S x = g for a frame operator given by its M diagonal blocks."""
    L = g.shape[0]
    idx = _block_index(L, blocks.shape[0])
    out = np.empty(L, dtype=complex)
    out[idx] = np.linalg.solve(blocks, g[idx][..., None])[..., 0]
    return out


def check_frame_spectrum(eigs: np.ndarray, ratio: float):
    top = float(eigs.max())
    low = float(eigs.min())
    if top <= 0 or low <= ratio * top:
        raise NotAFrameError(f"frame bounds {low:.3e} / {top:.3e}")


def gabdual_sep(
    g: np.ndarray,
    a: int,
    M: int,
    tol: Optional[float] = None,
    maxiter: Optional[int] = None,
    dense_limit: Optional[int] = None,
) -> np.ndarray:
    """Canonical dual window S^-1 g by conjugate gradients on the frame operator."""
    solver = get_config().solver
    if dense_limit is None:
        dense_limit = get_config().limits.dense_limit
    g = _as_signal(g)
    L = g.shape[0]
    check_lengths(L, a, M)
    tol = solver.cg_tol if tol is None else tol
    maxiter = solver.cg_maxiter_factor * L if maxiter is None else maxiter

    blocks = None
    if L // M <= dense_limit:
        blocks = frame_blocks(g, a, M)
        check_frame_spectrum(np.linalg.eigvalsh(blocks), solver.frame_ratio)

    def matvec(v):
        v = np.asarray(v, dtype=complex).ravel()
        return idgt_sep(dgt_sep(v, g, a, M), g, a, M)

    S = LinearOperator((L, L), matvec=matvec, dtype=complex)
    gd, info = cg(S, g, rtol=tol, atol=0.0, maxiter=maxiter)
    if info == 0:
        logger.debug(f"gabdual_sep L={L} a={a} M={M}: CG converged")
        return gd
    if blocks is None:
        raise NotAFrameError(f"conjugate gradients did not converge in {maxiter} iterations")
    logger.warning(f"CG stalled for L={L} a={a} M={M}; solving the frame blocks directly")
    return solve_blocks(blocks, g)


def gabtight_sep(
    g: np.ndarray,
    a: int,
    M: int,
    ratio: Optional[float] = None,
    dense_limit: Optional[int] = None,
) -> np.ndarray:
    """
    Canonical tight window S^-1/2 g from the eigendecomposition of the frame blocks.

    The M blocks hold M*b^2 values, so b = L/M is bounded by limits.dense_limit.
    """
    if ratio is None:
        ratio = get_config().solver.frame_ratio
    if dense_limit is None:
        dense_limit = get_config().limits.dense_limit
    g = _as_signal(g)
    L = g.shape[0]
    check_lengths(L, a, M)
    if L // M > dense_limit:
        raise OracleLimitError("gabtight_sep", L // M, dense_limit, unit="b")
    blocks = frame_blocks(g, a, M)
    eigs, vecs = np.linalg.eigh(blocks)
    check_frame_spectrum(eigs, ratio)
    idx = _block_index(L, M)
    coords = np.einsum('jsk,js->jk', vecs.conj(), g[idx]) / np.sqrt(eigs)
    out = np.empty(L, dtype=complex)
    out[idx] = np.einsum('jrk,jk->jr', vecs, coords)
    return out


def pgauss(L: int, tfr: Optional[float] = None, a: Optional[int] = None, M: Optional[int] = None) -> np.ndarray:
    """
    Periodized Gaussian with unit 2-norm.

    tfr defaults to a*M/L when a and M are given, else 1 (the Fourier invariant case).
    """
    if tfr is None:
        tfr = a * M / L if a is not None and M is not None else 1.0
    if tfr <= 0:
        raise ValueError(f"time-frequency ratio must be positive, got {tfr}")
    l = np.arange(L, dtype=float)
    x = np.where(l <= L / 2, l, l - L)
    k = np.arange(-3, 4, dtype=float)
    g = np.exp(-np.pi * (x[:, None] + k[None, :] * L) ** 2 / (tfr * L)).sum(axis=1)
    return (g / np.linalg.norm(g)).astype(complex)


def window_from_spec(spec: str, lat: GaborLattice) -> Window:
    """'gauss', 'gauss:TFR' or 'gauss:TFR:LG' (FIR truncated to LG samples)."""
    parts = spec.split(":")
    if parts[0] != "gauss":
        raise ValueError(f"Unknown window: {spec}")
    tfr = float(parts[1]) if len(parts) > 1 and parts[1] else None
    g = pgauss(lat.L, tfr, lat.a, lat.M)
    if len(parts) > 2:
        return FirWindow.from_full(g, int(parts[2]))
    return g


def relative_error(x: np.ndarray, ref: np.ndarray) -> float:
    den = np.linalg.norm(ref)
    num = np.linalg.norm(np.asarray(x) - np.asarray(ref))
    return float(num / den) if den > 0 else float(num)

