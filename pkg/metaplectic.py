"""
Metaplectic operators on C^L.

Periodic chirps, the unitary DFT and dilations realize the elementary
symplectic matrices; every operator U_M here satisfies

    U_M pi(z) = exp(i*pi*E(z)/L) * pi(M z) U_M

with an integer exponent E(z) mod 2L that is tracked exactly.
"""

import logging
from typing import Tuple

import numpy as np
import scipy.fft

from exceptions import DilationError, DimensionError
from lattice import ElementaryOp, Mat2L, OpKind, WeilFactors, mod_inverse

logger = logging.getLogger(__name__)


def chirp_exponent(c: int, j, L: int) -> np.ndarray:
    """(c * j^2 * (L+1)) mod 2L, in int64 arithmetic without overflow for L < 2**31."""
    two_l = 2 * L
    j = np.asarray(j, dtype=np.int64) % two_l
    t = (j * j) % two_l
    t = (t * (int(c) % two_l)) % two_l
    return (t * ((L + 1) % two_l)) % two_l


def unit_phase(exponent, L: int) -> np.ndarray:
    """exp(i*pi*exponent/L) for integer exponents."""
    return np.exp(1j * np.pi * (np.asarray(exponent, dtype=np.int64) % (2 * L)) / L)


def pchirp(L: int, s: int) -> np.ndarray:
    """Periodic chirp exp(pi*i*s*j^2*(L+1)/L), j = 0..L-1."""
    return unit_phase(chirp_exponent(s, np.arange(L), L), L)


def _check_signal(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1:
        raise DimensionError(f"expected a 1-D signal, got shape {f.shape}")
    return f


def dilate(f: np.ndarray, a: int) -> np.ndarray:
    """g(j) = f(a^-1 j mod L)."""
    f = _check_signal(f)
    L = f.shape[0]
    inv = mod_inverse(a, L)
    if inv is None:
        raise DilationError(a, L)
    return f[(inv * np.arange(L, dtype=np.int64)) % L]


def apply_elementary(op: ElementaryOp, f: np.ndarray) -> np.ndarray:
    f = _check_signal(f)
    L = f.shape[0]
    if op.kind is OpKind.FOURIER:
        return scipy.fft.fft(f, norm="ortho")
    if op.kind is OpKind.INV_FOURIER:
        return scipy.fft.ifft(f, norm="ortho")
    if op.kind is OpKind.CHIRP:
        return pchirp(L, op.param) * f
    return dilate(f, op.param)


def elementary_phase(op: ElementaryOp, x, w, L: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Commutation exponent of one factor and the mapped points."""
    x = np.asarray(x, dtype=np.int64) % L
    w = np.asarray(w, dtype=np.int64) % L
    if op.kind is OpKind.FOURIER:
        return (2 * x * w) % (2 * L), w, (-x) % L
    if op.kind is OpKind.INV_FOURIER:
        return (2 * x * w) % (2 * L), (-w) % L, x
    if op.kind is OpKind.CHIRP:
        return (-chirp_exponent(op.param, x, L)) % (2 * L), x, (w + op.param * x) % L
    inv = mod_inverse(op.param, L)
    if inv is None:
        raise DilationError(op.param, L)
    return np.zeros_like(x), (op.param * x) % L, (inv * w) % L


def metaplectic_apply(factors: WeilFactors, f: np.ndarray, inverse: bool = False) -> np.ndarray:
    """
    Apply U_M (or its inverse) for the factor chain.

    Factors are listed as in the matrix product, so the rightmost acts first.
    """
    f = _check_signal(f)
    if f.shape[0] != factors.L:
        raise DimensionError(f"signal length {f.shape[0]} does not match L={factors.L}")
    if inverse:
        for op in factors.factors:
            f = apply_elementary(op.inverse(factors.L), f)
    else:
        for op in reversed(factors.factors):
            f = apply_elementary(op, f)
    return f


def metaplectic_phase(factors: WeilFactors, x, w) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exponent E (mod 2L) of phi_M and the mapped points M (x, w); vectorized."""
    L = factors.L
    E = np.zeros(np.broadcast(np.asarray(x), np.asarray(w)).shape, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64) % L
    w = np.asarray(w, dtype=np.int64) % L
    for op in reversed(factors.factors):
        e, x, w = elementary_phase(op, x, w, L)
        E = (E + e) % (2 * L)
    return E, x, w


def shear_phase_exponent(x, w, s0: int, s1: int, L: int) -> np.ndarray:
    """(s0*w^2 - s1*(x - s0*w)^2)*(L+1) mod 2L."""
    x = np.asarray(x, dtype=np.int64) % L
    w = np.asarray(w, dtype=np.int64) % L
    t = (x - (s0 % L) * w) % L
    return (chirp_exponent(s0, w, L) - chirp_exponent(s1, t, L)) % (2 * L)


def phase_shear(z: Tuple[int, int], s0: int, s1: int, L: int) -> complex:
    """Commutation phase of shear_operator(s0, s1) at the point z."""
    x, w = z
    return complex(unit_phase(shear_phase_exponent(x, w, s0, s1, L), L))


def shear_factors(s0: int, s1: int, L: int) -> WeilFactors:
    """C_{s1} F C_{s0} F^-1, listed left to right."""
    return WeilFactors(L, (
        ElementaryOp(OpKind.CHIRP, s1),
        ElementaryOp(OpKind.FOURIER),
        ElementaryOp(OpKind.CHIRP, s0),
        ElementaryOp(OpKind.INV_FOURIER),
    ))


def shear_matrix(s0: int, s1: int, L: int) -> Mat2L:
    """Symplectic matrix [[1, -s0], [s1, 1 - s0*s1]] of shear_operator."""
    return Mat2L(1, -s0, s1, 1 - s0 * s1, L)


def shear_operator(s0: int, s1: int, f: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Frequency shear by s0 followed by time shear by s1."""
    f = _check_signal(f)
    return metaplectic_apply(shear_factors(s0, s1, f.shape[0]), f, inverse=inverse)


def tf_shift_apply(z: Tuple[int, int], f: np.ndarray) -> np.ndarray:
    """(pi(x, w) f)(l) = exp(2*pi*i*l*w/L) f(l - x)."""
    f = _check_signal(f)
    L = f.shape[0]
    x, w = int(z[0]) % L, int(z[1]) % L
    l = np.arange(L, dtype=np.int64)
    return unit_phase(2 * ((l * w) % L), L) * np.roll(f, x)
