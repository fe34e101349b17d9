"""
Integer layer for time-frequency lattices in Z_L x Z_L.

Normal forms, Smith/Weil/shear/multiwindow decompositions, feasible signal
lengths and the structural constants c, d, p, q.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from config import get_config
from exceptions import (
    IllegalLengthError,
    NotUnimodularError,
    OracleLimitError,
    UndefinedGcdError,
)

logger = logging.getLogger(__name__)

Point = Tuple[int, int]
IntMatrix = Tuple[Tuple[int, int], Tuple[int, int]]


# --- number theory ---------------------------------------------------------

def _ext_gcd(x: int, y: int) -> Tuple[int, int, int]:
    if x == 0:
        return y, 0, 1
    g, k2, k1 = _ext_gcd(y % x, x)
    return g, k1 - (y // x) * k2, k2


def ext_gcd(x: int, y: int) -> Tuple[int, int, int]:
    """
    Extended Euclid.

    Returns (g, k1, k2) with g = gcd(x, y) > 0 and k1*x + k2*y = g.
    """
    x, y = int(x), int(y)
    if x == 0 and y == 0:
        raise UndefinedGcdError()
    g, k1, k2 = _ext_gcd(x, y)
    if g < 0:
        g, k1, k2 = -g, -k1, -k2
    return g, k1, k2


def mod_inverse(x: int, L: int) -> Optional[int]:
    """Inverse of x modulo L, or None if it does not exist."""
    if L == 1:
        return 0
    if x % L == 0:
        return None
    g, k1, _ = ext_gcd(x % L, L)
    if g != 1:
        return None
    return k1 % L


def prime_factors(n: int) -> List[Tuple[int, int]]:
    """Trial division; returns [(prime, exponent), ...] in increasing order."""
    n = abs(int(n))
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return factors


def _valuation(n: int, p: int) -> int:
    if n == 0:
        return math.inf
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


# --- 2x2 matrices modulo L ---------------------------------------------------

@dataclass(frozen=True)
class Mat2L:
    """2x2 integer matrix with entries reduced modulo L."""
    a11: int
    a12: int
    a21: int
    a22: int
    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"modulus must be positive, got {self.L}")
        for name in ('a11', 'a12', 'a21', 'a22'):
            object.__setattr__(self, name, int(getattr(self, name)) % self.L)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], L: int) -> "Mat2L":
        (a11, a12), (a21, a22) = rows
        return cls(a11, a12, a21, a22, L)

    @classmethod
    def identity(cls, L: int) -> "Mat2L":
        return cls(1, 0, 0, 1, L)

    @property
    def rows(self) -> IntMatrix:
        return ((self.a11, self.a12), (self.a21, self.a22))

    def det(self) -> int:
        return (self.a11 * self.a22 - self.a12 * self.a21) % self.L

    def __matmul__(self, other: "Mat2L") -> "Mat2L":
        if other.L != self.L:
            raise ValueError(f"modulus mismatch: {self.L} vs {other.L}")
        return Mat2L(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
            self.L,
        )

    def inverse(self) -> "Mat2L":
        """Inverse modulo L; the determinant must be a unit."""
        inv = mod_inverse(self.det(), self.L)
        if inv is None:
            raise NotUnimodularError(self.det(), self.L)
        return Mat2L(inv * self.a22, -inv * self.a12, -inv * self.a21, inv * self.a11, self.L)

    def apply(self, x, w):
        """Map points (x, w) (ints or integer arrays) to A @ (x, w) mod L."""
        x = np.asarray(x, dtype=np.int64) % self.L
        w = np.asarray(w, dtype=np.int64) % self.L
        return (self.a11 * x + self.a12 * w) % self.L, (self.a21 * x + self.a22 * w) % self.L

    def is_diagonal(self) -> bool:
        return self.a12 == 0 and self.a21 == 0


def _int_matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def _int_inverse_unimodular(A: IntMatrix) -> IntMatrix:
    # valid for det(A) == 1 over Z
    return ((A[1][1], -A[0][1]), (-A[1][0], A[0][0]))


# --- lattices ---------------------------------------------------------------

@dataclass(frozen=True)
class GaborLattice:
    """
    Lattice in normal form [[a, 0], [s, b]] of Z_L x Z_L.

    Points are (a*n, s*n + b*k) mod L. Coefficient (m, n) sits at
    (a*n, b*m + (n*s mod b)).
    """
    L: int
    a: int
    b: int
    s: int = 0

    def __post_init__(self):
        L, a, b, s = self.L, self.a, self.b, self.s
        if L < 1 or a < 1 or b < 1:
            raise IllegalLengthError(f"L={L}, a={a}, b={b} must be positive")
        if L % a or L % b:
            raise IllegalLengthError(f"a={a} and b={b} must divide L={L}")
        if not 0 <= s < b:
            raise IllegalLengthError(f"shear s={s} must satisfy 0 <= s < b={b}")
        if (L // a) * s % b:
            raise IllegalLengthError(f"shear s={s} is not compatible with a={a}, b={b}, L={L}")

    @classmethod
    def from_params(cls, L: int, a: int, M: int, lp: int = 0, lq: int = 1) -> "GaborLattice":
        """Build the lattice for time shift a, M channels and shear fraction lp/lq."""
        lp, lq = reduce_lambda(lp, lq)
        if a < 1 or M < 1:
            raise IllegalLengthError(f"a={a} and M={M} must be positive")
        l_min = min_length(a, M, lp, lq)
        if L < 1 or L % l_min:
            raise IllegalLengthError(f"L={L} for a={a}, M={M}, lambda={lp}/{lq}", l_min=l_min)
        b = L // M
        return cls(L, a, b, b * lp // lq)

    @property
    def M(self) -> int:
        return self.L // self.b

    @property
    def N(self) -> int:
        return self.L // self.a

    @property
    def lambda1(self) -> int:
        return self.s // math.gcd(self.s, self.b)

    @property
    def lambda2(self) -> int:
        return self.b // math.gcd(self.s, self.b)

    @property
    def is_separable(self) -> bool:
        return self.s == 0

    @property
    def redundancy(self) -> Fraction:
        return Fraction(self.L, self.a * self.b)

    @property
    def c(self) -> int:
        return math.gcd(self.a, self.M)

    @property
    def d(self) -> int:
        return math.gcd(self.b, self.N)

    @property
    def p(self) -> int:
        return self.a // self.c

    @property
    def q(self) -> int:
        return self.M // self.c

    def generator(self) -> Mat2L:
        return Mat2L(self.a, 0, self.s, self.b, self.L)

    def grid_points(self) -> Tuple[np.ndarray, np.ndarray]:
        """(x, w) of every coefficient: x has shape (N,), w has shape (M, N)."""
        n = np.arange(self.N, dtype=np.int64)
        x = self.a * n
        w = self.b * np.arange(self.M, dtype=np.int64)[:, None] + ((n * self.s) % self.b)[None, :]
        return x, w

    def coefficient_index(self, x, w) -> Tuple[np.ndarray, np.ndarray]:
        """Inverse of grid_points: (m, n) for lattice points (x, w)."""
        x = np.asarray(x, dtype=np.int64) % self.L
        w = np.asarray(w, dtype=np.int64) % self.L
        n = x // self.a
        m = ((w - (n * self.s) % self.b) % self.L) // self.b
        return m, n

    def __str__(self) -> str:
        return f"L={self.L} a={self.a} M={self.M} lambda={self.lambda1}/{self.lambda2}"


def reduce_lambda(lp: int, lq: int) -> Tuple[int, int]:
    """Reduce the shear fraction lp/lq to lowest terms with 0 <= lp < lq."""
    if lq == 0:
        raise IllegalLengthError("lambda2 must be nonzero")
    if lq < 0:
        lp, lq = -lp, -lq
    lp %= lq
    g = math.gcd(lp, lq)
    if g > 1:
        logger.debug(f"Reducing lambda {lp}/{lq} by {g}")
    return lp // g, lq // g


def normal_form(A: Mat2L) -> GaborLattice:
    """Normal form (a, b, s) of the subgroup generated by the columns of A."""
    L = A.L
    px, pw = L, 0
    zeros = [L]
    for vx, vw in ((A.a11, A.a21), (A.a12, A.a22)):
        if vx == 0:
            zeros.append(vw)
            continue
        g, k1, k2 = ext_gcd(px, vx)
        zeros.append((vx // g) * pw - (px // g) * vw)
        px, pw = g, k1 * pw + k2 * vw
    b = 0
    for z in zeros:
        b = math.gcd(b, z)
    return GaborLattice(L, px, b, pw % b)


def upper_form(lat: GaborLattice) -> Mat2L:
    """Equivalent upper triangular generator [[ab/g, k1*a], [0, g]], g = gcd(b, s)."""
    g, k1, _ = ext_gcd(lat.s, lat.b)
    return Mat2L(lat.a * lat.b // g, k1 * lat.a, 0, g, lat.L)


def _check_oracle(L: int, what: str, limit: Optional[int]):
    if limit is None:
        limit = get_config().limits.oracle_limit
    if L > limit:
        raise OracleLimitError(what, L, limit)


def lattice_points(lat: GaborLattice, limit: Optional[int] = None) -> FrozenSet[Point]:
    """All points of the lattice, by enumeration."""
    _check_oracle(lat.L, "lattice_points", limit)
    x, w = lat.grid_points()
    xs = np.broadcast_to(x[None, :], w.shape)
    return frozenset(zip(xs.ravel().tolist(), w.ravel().tolist()))


def span_points(A: Mat2L, limit: Optional[int] = None) -> FrozenSet[Point]:
    """Subgroup generated by the columns of A, by enumeration."""
    _check_oracle(A.L, "span_points", limit)
    i = np.arange(A.L, dtype=np.int64)
    x = (i[:, None] * A.a11 + i[None, :] * A.a12) % A.L
    w = (i[:, None] * A.a21 + i[None, :] * A.a22) % A.L
    return frozenset(zip(x.ravel().tolist(), w.ravel().tolist()))


# --- lengths and constants ---------------------------------------------------

def min_length(a: int, M: int, lp: int, lq: int) -> int:
    """Smallest feasible signal length, lambda2 * lcm(a, M)."""
    if lq == 0:
        raise IllegalLengthError("lambda2 must be nonzero")
    return abs(lq) * math.lcm(a, M)


def is_feasible(L: int, a: int, M: int, lp: int = 0, lq: int = 1) -> bool:
    lp, lq = reduce_lambda(lp, lq)
    return L >= 1 and L % min_length(a, M, lp, lq) == 0


def nearest_lengths(L: int, a: int, M: int, lp: int = 0, lq: int = 1) -> Tuple[Optional[int], int]:
    """Feasible lengths just below and just above L (lower is None below L_min)."""
    lp, lq = reduce_lambda(lp, lq)
    l_min = min_length(a, M, lp, lq)
    lower = (L // l_min) * l_min
    upper = lower if lower == L else lower + l_min
    return (lower if lower > 0 else None), upper


def noshear_factor(a: int, M: int, lp: int, lq: int) -> Tuple[int, int]:
    """
    (c1, c/c1) where c1 collects the prime powers of c = gcd(a, M) coprime to lambda2.

    Lengths n * L_min * c/c1 never need a frequency side shear.
    """
    lp, lq = reduce_lambda(lp, lq)
    c = math.gcd(a, M)
    c1 = 1
    for p, e in prime_factors(c):
        if lq % p:
            c1 *= p ** e
    return c1, c // c1


def constants(lat: GaborLattice) -> Tuple[int, int, int, int]:
    """(c, d, p, q) with L = c*d*p*q and redundancy q/p."""
    return lat.c, lat.d, lat.p, lat.q


# --- decompositions -----------------------------------------------------------

@dataclass(frozen=True)
class MultiwinDecomp:
    """Coset decomposition of a lattice over the separable lattice (lambda2*a, b)."""
    lambda2: int
    base_a: int
    base_b: int
    offsets: Tuple[Point, ...]


def multiwin_decomp(lat: GaborLattice) -> MultiwinDecomp:
    lam2 = lat.lambda2
    offsets = tuple((lat.a * m, (lat.s * m) % lat.b) for m in range(lam2))
    return MultiwinDecomp(lam2, lam2 * lat.a, lat.b, offsets)


@dataclass(frozen=True)
class SmithDecomp:
    """A = P D V over Z with D = diag(d1, d2), d1 | d2 and det P = det V = 1."""
    P: Mat2L
    D: Mat2L
    V: Mat2L
    P_int: IntMatrix
    V_int: IntMatrix
    d1: int
    d2: int


def smith2x2(A: Sequence[Sequence[int]], L: int) -> SmithDecomp:
    """Smith normal form of a 2x2 integer matrix by extended-gcd row/column operations."""
    (w00, w01), (w10, w11) = [[int(v) for v in row] for row in A]
    work = ((w00, w01), (w10, w11))
    R: IntMatrix = ((1, 0), (0, 1))
    C: IntMatrix = ((1, 0), (0, 1))
    while True:
        (w00, w01), (w10, w11) = work
        if w01 != 0:
            g, k1, k2 = ext_gcd(w00, w01)
            col = ((k1, -w01 // g), (k2, w00 // g))
            work = _int_matmul(work, col)
            C = _int_matmul(C, col)
            (w00, w01), (w10, w11) = work
        if w10 != 0:
            g, u, v = ext_gcd(w00, w10)
            row = ((u, v), (-w10 // g, w00 // g))
            work = _int_matmul(row, work)
            R = _int_matmul(row, R)
            continue
        if w01 != 0:
            continue
        d1, d2 = w00, w11
        if (d1 == 0 and d2 != 0) or (d1 != 0 and d2 % d1 != 0):
            row = ((1, 1), (0, 1))
            work = _int_matmul(row, work)
            R = _int_matmul(row, R)
            continue
        break
    if d1 < 0:
        flip = ((-1, 0), (0, -1))
        R = _int_matmul(flip, R)
        d1, d2 = -d1, -d2
    # R A C = D  =>  A = R^-1 D C^-1
    P_int = _int_inverse_unimodular(R)
    V_int = _int_inverse_unimodular(C)
    return SmithDecomp(
        P=Mat2L.from_rows(P_int, L),
        D=Mat2L(d1, 0, 0, d2, L),
        V=Mat2L.from_rows(V_int, L),
        P_int=P_int,
        V_int=V_int,
        d1=d1,
        d2=d2,
    )


class OpKind(str, Enum):
    """Elementary metaplectic generators."""
    FOURIER = "fourier"  # unitary DFT, matrix [[0, 1], [-1, 0]]
    INV_FOURIER = "inv_fourier"  # unitary inverse DFT, matrix [[0, -1], [1, 0]]
    CHIRP = "chirp"  # pchirp multiplication, matrix [[1, 0], [c, 1]]
    DILATION = "dilation"  # f(a^-1 j), matrix diag(a, a^-1)


@dataclass(frozen=True)
class ElementaryOp:
    kind: OpKind
    param: int = 0

    def matrix(self, L: int) -> Mat2L:
        if self.kind is OpKind.FOURIER:
            return Mat2L(0, 1, -1, 0, L)
        if self.kind is OpKind.INV_FOURIER:
            return Mat2L(0, -1, 1, 0, L)
        if self.kind is OpKind.CHIRP:
            return Mat2L(1, 0, self.param, 1, L)
        inv = mod_inverse(self.param, L)
        if inv is None:
            raise NotUnimodularError(self.param, L)
        return Mat2L(self.param, 0, 0, inv, L)

    def inverse(self, L: int) -> "ElementaryOp":
        if self.kind is OpKind.FOURIER:
            return ElementaryOp(OpKind.INV_FOURIER)
        if self.kind is OpKind.INV_FOURIER:
            return ElementaryOp(OpKind.FOURIER)
        if self.kind is OpKind.CHIRP:
            # pchirp has period 2L in its parameter
            return ElementaryOp(OpKind.CHIRP, (-self.param) % (2 * L))
        inv = mod_inverse(self.param, L)
        if inv is None:
            raise NotUnimodularError(self.param, L)
        return ElementaryOp(OpKind.DILATION, inv)


@dataclass(frozen=True)
class WeilFactors:
    """Elementary factors listed as in the matrix product (leftmost first)."""
    L: int
    factors: Tuple[ElementaryOp, ...]

    def matrix(self) -> Mat2L:
        out = Mat2L.identity(self.L)
        for op in self.factors:
            out = out @ op.matrix(self.L)
        return out


def weil_decompose(A: Mat2L) -> WeilFactors:
    """
    Factor a unimodular matrix as S_{c0/a0} D_{a0} F^-1 S_{-b/a0} F S_{-m}.

    m is the smallest nonnegative integer making a0 = a11 + m*a12 invertible.
    """
    L = A.L
    if A.det() != 1 % L:
        raise NotUnimodularError(A.det(), L)
    a, b, c, d = A.a11, A.a12, A.a21, A.a22
    for m in range(L):
        if math.gcd(a + m * b, L) == 1:
            break
    else:
        raise NotUnimodularError(A.det(), L)
    a0 = (a + m * b) % L
    a0_inv = mod_inverse(a0, L)
    c0 = c + m * d
    factors = (
        ElementaryOp(OpKind.CHIRP, (c0 * a0_inv) % L),
        ElementaryOp(OpKind.DILATION, a0),
        ElementaryOp(OpKind.FOURIER),
        ElementaryOp(OpKind.CHIRP, (-a0_inv * b) % L),
        ElementaryOp(OpKind.INV_FOURIER),
        ElementaryOp(OpKind.CHIRP, (-m) % L),
    )
    return WeilFactors(L, factors)


@dataclass(frozen=True)
class ShearDecomp:
    """
    Shears (s0, s1) with U^-1 A = D V, U^-1 = [[s0*s1 + 1, s0], [s1, 1]].

    D = diag(a_r, b_r); the sheared rectangular problem runs with time step
    a_r, or in the frequency domain with time step b_r and N_r channels.
    """
    s0: int
    s1: int
    b_r: int
    a_r: int
    M_r: int
    N_r: int
    U_inv: Mat2L = field(repr=False)
    D: Mat2L = field(repr=False)
    V: Mat2L = field(repr=False)

    @property
    def freq_shear_needed(self) -> bool:
        return self.s0 != 0

    @property
    def time_shear_needed(self) -> bool:
        return self.s1 != 0


def _shear_candidate(lat: GaborLattice, s0: int, s1: int) -> Optional[ShearDecomp]:
    L, a, b, s = lat.L, lat.a, lat.b, lat.s
    U_inv = Mat2L(s0 * s1 + 1, s0, s1, 1, L)
    sheared = normal_form(U_inv @ lat.generator())
    if sheared.s != 0:
        return None
    d1, d2 = sheared.a, sheared.b
    # V = D^-1 U^-1 A over Z, rows divide exactly
    top = ((s0 * s1 + 1) * a + s0 * s, s0 * b)
    bottom = (s1 * a + s, b)
    V = Mat2L(top[0] // d1, top[1] // d1, bottom[0] // d2, bottom[1] // d2, L)
    return ShearDecomp(
        s0=s0 % L,
        s1=s1 % L,
        b_r=d2,
        a_r=d1,
        M_r=L // d2,
        N_r=L // d1,
        U_inv=U_inv,
        D=Mat2L(d1, 0, 0, d2, L),
        V=V,
    )


def _solve_s0(lat: GaborLattice, s1: int) -> Optional[int]:
    # diagonal condition (s0*X + a*k1) = 0 mod ab/X with X = gcd(s1*a + s, b)
    a, b = lat.a, lat.b
    t = s1 * a + lat.s
    X, k1, _ = ext_gcd(t, b)
    mod = a * b // X
    g = math.gcd(X, mod)
    if (a * k1) % g:
        return None
    mod_g = mod // g
    inv = mod_inverse(X // g, mod_g)
    return (-(a * k1) // g * inv) % mod_g if mod_g > 1 else 0


@lru_cache(maxsize=256)
def shearfind(L: int, a: int, M: int, lp: int, lq: int) -> ShearDecomp:
    """
    Shears turning the lattice into a rectangular one.

    Preference: no shear for separable lattices, then the smallest pure time
    shear, then the prime-factor construction for s1 with s0 solved from the
    diagonal condition.
    """
    lat = GaborLattice.from_params(L, a, M, lp, lq)
    a, b, s = lat.a, lat.b, lat.s
    if s == 0:
        return _shear_candidate(lat, 0, 0)

    g = math.gcd(a, b)
    if s % g == 0:
        # s1*a = -s (mod b)
        s1 = (-(s // g) * mod_inverse(a // g, b // g)) % (b // g) if b // g > 1 else 0
        found = _shear_candidate(lat, 0, s1)
        if found is not None:
            logger.debug(f"shearfind {lat}: time shear s1={s1}")
            return found

    s1 = 1
    for p, _ in prime_factors(L):
        if _valuation(a, p) == _valuation(s, p):
            s1 *= p
    candidates = itertools.chain([s1], (t for t in range(L) if t != s1))
    for s1 in candidates:
        s0 = _solve_s0(lat, s1)
        if s0 is None:
            continue
        found = _shear_candidate(lat, s0, s1)
        if found is not None:
            logger.debug(f"shearfind {lat}: s0={found.s0}, s1={found.s1}, b_r={found.b_r}")
            return found
    raise IllegalLengthError(f"no shear decomposition found for {lat}")
