import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from exceptions import IllegalLengthError, NotUnimodularError, OracleLimitError, UndefinedGcdError
from lattice import (
    ElementaryOp,
    GaborLattice,
    Mat2L,
    OpKind,
    constants,
    ext_gcd,
    is_feasible,
    lattice_points,
    min_length,
    mod_inverse,
    multiwin_decomp,
    nearest_lengths,
    normal_form,
    noshear_factor,
    prime_factors,
    reduce_lambda,
    shearfind,
    smith2x2,
    span_points,
    upper_form,
    weil_decompose,
)


# --- number theory ------------------------------------------------------------

@pytest.mark.parametrize("x, y, expected", [
    (3, 6, (3, 1, 0)),
    (5, 7, (1, 3, -2)),
    (0, 4, (4, 0, 1)),
])
def test_ext_gcd_examples(x, y, expected):
    assert ext_gcd(x, y) == expected


def test_ext_gcd_bezout_identity():
    for x, y in itertools.product(range(-12, 13), repeat=2):
        if x == 0 and y == 0:
            continue
        g, k1, k2 = ext_gcd(x, y)
        assert g == math.gcd(x, y)
        assert k1 * x + k2 * y == g


def test_ext_gcd_both_zero():
    with pytest.raises(UndefinedGcdError):
        ext_gcd(0, 0)


def test_mod_inverse():
    assert mod_inverse(5, 12) == 5
    assert mod_inverse(3, 12) is None
    assert (7 * mod_inverse(7, 36)) % 36 == 1


def test_prime_factors():
    assert prime_factors(2520) == [(2, 3), (3, 2), (5, 1), (7, 1)]
    assert prime_factors(1) == []
    assert prime_factors(97) == [(97, 1)]


# --- normal forms ---------------------------------------------------------------

@pytest.mark.parametrize("rows, L, expected", [
    (((6, 0), (3, 6)), 36, (6, 6, 3)),
    (((6, 0), (9, 6)), 36, (6, 6, 3)),
    (((1, 0), (0, 1)), 12, (1, 1, 0)),
])
def test_normal_form_examples(rows, L, expected):
    lat = normal_form(Mat2L.from_rows(rows, L))
    assert (lat.a, lat.b, lat.s) == expected


def test_normal_form_preserves_point_set():
    L = 24
    for a11, a12, a21, a22 in [(4, 2, 6, 8), (3, 0, 5, 6), (6, 8, 2, 12), (2, 3, 4, 1)]:
        A = Mat2L(a11, a12, a21, a22, L)
        assert lattice_points(normal_form(A)) == span_points(A)


def test_upper_form_examples():
    assert upper_form(GaborLattice(36, 6, 6, 3)).rows == ((12, 6), (0, 3))
    assert upper_form(GaborLattice(8, 4, 2, 0)).rows == ((4, 0), (0, 2))


@pytest.mark.parametrize("lat", [
    GaborLattice(36, 6, 6, 3),
    GaborLattice(16, 2, 4, 2),
    GaborLattice(16, 2, 4, 1),
    GaborLattice(8, 4, 2, 0),
])
def test_upper_form_spans_same_lattice(lat):
    assert span_points(upper_form(lat)) == lattice_points(lat)


def test_lattice_points_examples():
    assert lattice_points(GaborLattice(4, 2, 2, 0)) == {(0, 0), (0, 2), (2, 0), (2, 2)}
    assert lattice_points(GaborLattice(4, 2, 2, 1)) == {(0, 0), (0, 2), (2, 1), (2, 3)}


def test_lattice_points_cardinality():
    lat = GaborLattice(36, 6, 6, 3)
    assert len(lattice_points(lat)) == 36 * 36 // 36


def test_oracle_limit():
    with pytest.raises(OracleLimitError):
        lattice_points(GaborLattice(64, 8, 8, 0), limit=32)


def test_invalid_lattice():
    with pytest.raises(IllegalLengthError):
        GaborLattice(12, 5, 2, 0)
    with pytest.raises(IllegalLengthError):
        GaborLattice(12, 2, 3, 3)


# --- lattice parameters ---------------------------------------------------------

def test_from_params_quincunx():
    lat = GaborLattice.from_params(36, 6, 6, 1, 2)
    assert (lat.a, lat.b, lat.s) == (6, 6, 3)
    assert (lat.M, lat.N) == (6, 6)
    assert (lat.lambda1, lat.lambda2) == (1, 2)
    assert lat.redundancy == Fraction(1)
    assert not lat.is_separable


def test_from_params_reports_min_length():
    with pytest.raises(IllegalLengthError) as info:
        GaborLattice.from_params(100, 32, 64, 1, 2)
    assert info.value.l_min == 128


def test_grid_points_and_coefficient_index():
    lat = GaborLattice.from_params(36, 6, 6, 1, 2)
    x, w = lat.grid_points()
    np.testing.assert_array_equal(w[0], [0, 3, 0, 3, 0, 3])
    m, n = lat.coefficient_index(np.broadcast_to(x, w.shape), w)
    np.testing.assert_array_equal(m, np.arange(6)[:, None] * np.ones(6, dtype=int))
    np.testing.assert_array_equal(n, np.ones(6, dtype=int)[:, None] * np.arange(6))


def test_reduce_lambda():
    assert reduce_lambda(2, 4) == (1, 2)
    assert reduce_lambda(5, 4) == (1, 4)
    assert reduce_lambda(0, 3) == (0, 1)
    with pytest.raises(IllegalLengthError):
        reduce_lambda(1, 0)


@pytest.mark.parametrize("params, expected", [
    ((32, 64, 1, 2), 128),
    ((27, 54, 1, 2), 108),
    ((6, 6, 0, 1), 6),
])
def test_min_length(params, expected):
    assert min_length(*params) == expected


def test_min_length_zero_lambda2():
    with pytest.raises(IllegalLengthError):
        min_length(4, 4, 1, 0)


def test_feasibility_and_nearest_lengths():
    assert is_feasible(256, 32, 64, 1, 2)
    assert not is_feasible(200, 32, 64, 1, 2)
    assert nearest_lengths(200, 32, 64, 1, 2) == (128, 256)
    assert nearest_lengths(100, 32, 64, 1, 2) == (None, 128)


def test_noshear_factor():
    assert noshear_factor(32, 64, 1, 2) == (1, 32)
    assert noshear_factor(27, 54, 1, 2) == (27, 1)
    assert noshear_factor(12, 18, 0, 1)[1] == 1


def test_constants():
    assert constants(GaborLattice.from_params(128, 16, 32)) == (16, 4, 1, 2)
    assert constants(GaborLattice.from_params(24, 1, 24)) == (1, 1, 1, 24)
    c, d, p, q = constants(GaborLattice.from_params(256, 32, 64, 1, 2))
    assert c == 32
    assert c * d * p * q == 256


# --- decompositions ---------------------------------------------------------------

def test_multiwin_decomp_quincunx():
    mw = multiwin_decomp(GaborLattice(36, 6, 6, 3))
    assert (mw.base_a, mw.base_b) == (12, 6)
    assert set(mw.offsets) == {(0, 0), (6, 3)}


def test_multiwin_decomp_lambda_quarter():
    mw = multiwin_decomp(GaborLattice(16, 2, 4, 1))
    assert mw.lambda2 == 4
    assert (mw.base_a, mw.base_b) == (8, 4)
    assert set(mw.offsets) == {(0, 0), (2, 1), (4, 2), (6, 3)}


def test_multiwin_decomp_covers_lattice():
    lat = GaborLattice(16, 2, 4, 1)
    mw = multiwin_decomp(lat)
    base = lattice_points(GaborLattice(16, mw.base_a, mw.base_b, 0))
    union = {((x + ox) % 16, (w + ow) % 16) for ox, ow in mw.offsets for x, w in base}
    assert union == lattice_points(lat)


def test_multiwin_decomp_separable():
    mw = multiwin_decomp(GaborLattice(12, 3, 4, 0))
    assert mw.offsets == ((0, 0),)
    assert (mw.base_a, mw.base_b) == (3, 4)


def _int_product(*mats):
    out = ((1, 0), (0, 1))
    for B in mats:
        out = tuple(
            tuple(sum(out[i][k] * B[k][j] for k in range(2)) for j in range(2))
            for i in range(2)
        )
    return out


@pytest.mark.parametrize("A, L, d", [
    (((2, 0), (0, 4)), 16, (2, 4)),
    (((2, 0), (1, 2)), 16, (1, 4)),
    (((6, 0), (3, 6)), 36, (3, 12)),
])
def test_smith2x2(A, L, d):
    sm = smith2x2(A, L)
    assert (sm.d1, sm.d2) == d
    assert sm.d2 % sm.d1 == 0
    assert _int_product(sm.P_int, ((sm.d1, 0), (0, sm.d2)), sm.V_int) == A
    for U in (sm.P_int, sm.V_int):
        assert U[0][0] * U[1][1] - U[0][1] * U[1][0] == 1


@pytest.mark.parametrize("rows, L", [
    (((1, 0), (0, 1)), 7),
    (((0, -1), (1, 0)), 12),
    (((1, 0), (5, 1)), 12),
    (((5, 2), (2, 1)), 12),
    (((3, 4), (2, 3)), 36),
])
def test_weil_decompose_product(rows, L):
    A = Mat2L.from_rows(rows, L)
    assert weil_decompose(A).matrix() == A


def test_weil_decompose_rejects_non_unimodular():
    with pytest.raises(NotUnimodularError):
        weil_decompose(Mat2L(2, 0, 0, 1, 12))


def test_elementary_inverse_matrices():
    L = 12
    for op in (ElementaryOp(OpKind.FOURIER), ElementaryOp(OpKind.CHIRP, 5), ElementaryOp(OpKind.DILATION, 7)):
        assert op.matrix(L) @ op.inverse(L).matrix(L) == Mat2L.identity(L)


# --- shears -------------------------------------------------------------------------

def test_shearfind_separable():
    sh = shearfind(24, 4, 6, 0, 1)
    assert (sh.s0, sh.s1) == (0, 0)
    assert sh.b_r == 4


def test_shearfind_time_shear():
    sh = shearfind(16, 2, 4, 1, 2)
    assert (sh.s0, sh.s1) == (0, 1)
    assert not sh.freq_shear_needed
    assert sh.time_shear_needed


def test_shearfind_needs_frequency_shear():
    sh = shearfind(16, 4, 4, 1, 4)
    assert sh.s0 != 0
    assert sh.freq_shear_needed


@pytest.mark.parametrize("params", [
    (16, 2, 4, 1, 2),
    (16, 4, 4, 1, 4),
    (36, 6, 6, 1, 2),
    (72, 4, 6, 1, 3),
    (64, 4, 8, 1, 2),
    (96, 6, 8, 3, 4),
])
def test_shearfind_diagonalizes(params):
    L, a, M, lp, lq = params
    lat = GaborLattice.from_params(L, a, M, lp, lq)
    sh = shearfind(*params)
    assert sh.U_inv @ lat.generator() == sh.D @ sh.V
    assert sh.V.det() == 1 % L
    assert sh.a_r * sh.b_r == lat.a * lat.b
    assert span_points(sh.D) == lattice_points(GaborLattice(L, sh.a_r, sh.b_r, 0))


def test_shearfind_infeasible_length():
    with pytest.raises(IllegalLengthError) as info:
        shearfind(20, 2, 4, 1, 2)
    assert info.value.l_min == 8


# --- sweeps -------------------------------------------------------------------------

def _closes(L, a, M, lp, lq):
    """Does {(a*n, s*n + b*k)} with s = b*lp/lq close up into a subgroup of Z_L x Z_L?"""
    if L % a or L % M:
        return False
    b = L // M
    if (b * lp) % lq:
        return False
    return (L // a) * (b * lp // lq) % b == 0


def test_feasible_exactly_at_multiples_of_min_length(rng):
    checked = 0
    while checked < 200:
        a, M = (int(v) for v in rng.integers(1, 13, size=2))
        lq = int(rng.integers(1, 7))
        lp = int(rng.integers(0, lq))
        if math.gcd(lp, lq) != 1:
            continue
        l_min = min_length(a, M, lp, lq)
        closing = [L for L in range(1, 3 * l_min + 1) if _closes(L, a, M, lp, lq)]
        assert closing == [l_min, 2 * l_min, 3 * l_min], (a, M, lp, lq)
        assert all(is_feasible(L, a, M, lp, lq) == (L in closing) for L in range(1, 3 * l_min + 1))
        checked += 1


@pytest.mark.parametrize("L", range(1, 65))
def test_normal_form_unique_for_every_subgroup(L):
    seen = {}
    for a in range(1, L + 1):
        for b in range(1, L + 1):
            if L % a or L % b:
                continue
            for s in range(b):
                if (L // a) * s % b:
                    continue
                lat = GaborLattice(L, a, b, s)
                A = lat.generator()
                assert normal_form(A) == lat
                assert normal_form(A @ Mat2L(1, 1, 1, 2, L)) == lat
                assert normal_form(upper_form(lat)) == lat
                points = lattice_points(lat)
                assert points == span_points(A)
                assert points not in seen, (lat, seen.get(points))
                seen[points] = lat


def test_smith2x2_random_integer_matrices(rng):
    for _ in range(1000):
        A = tuple(tuple(int(v) for v in row) for row in rng.integers(-60, 61, size=(2, 2)))
        sm = smith2x2(A, int(rng.integers(1, 500)))
        assert _int_product(sm.P_int, ((sm.d1, 0), (0, sm.d2)), sm.V_int) == A
        for U in (sm.P_int, sm.V_int):
            assert U[0][0] * U[1][1] - U[0][1] * U[1][0] == 1
        assert sm.d1 >= 0
        assert sm.d1 == math.gcd(*A[0], *A[1])
        assert sm.d1 * sm.d2 == A[0][0] * A[1][1] - A[0][1] * A[1][0]
        assert sm.d2 % sm.d1 == 0 if sm.d1 else sm.d2 == 0


def _random_unimodular(rng, L):
    A = Mat2L.identity(L)
    for _ in range(int(rng.integers(1, 6))):
        kind = int(rng.integers(0, 3))
        x = int(rng.integers(0, L))
        if kind == 0:
            A = A @ Mat2L(1, x, 0, 1, L)
        elif kind == 1:
            A = A @ Mat2L(1, 0, x, 1, L)
        else:
            u = next(v for v in itertools.chain(range(x, L), range(1, x)) if math.gcd(v, L) == 1)
            A = A @ Mat2L(u, 0, 0, mod_inverse(u, L), L)
    return A


def test_weil_decompose_random_unimodular(rng):
    for _ in range(1000):
        L = int(rng.integers(2, 200))
        A = _random_unimodular(rng, L)
        assert A.det() == 1
        assert weil_decompose(A).matrix() == A


def test_shearfind_avoids_frequency_shear_at_noshear_lengths(rng):
    assert shearfind(4096, 32, 64, 1, 2).s0 == 0
    assert shearfind(108, 27, 54, 1, 2).s0 == 0
    checked = 0
    while checked < 200:
        a, M = (int(v) for v in rng.integers(1, 25, size=2))
        lq = int(rng.integers(2, 7))
        lp = int(rng.integers(1, lq))
        if math.gcd(lp, lq) != 1:
            continue
        _, stride = noshear_factor(a, M, lp, lq)
        L = int(rng.integers(1, 4)) * min_length(a, M, lp, lq) * stride
        sh = shearfind(L, a, M, lp, lq)
        assert sh.s0 == 0, (L, a, M, lp, lq)
        checked += 1


@pytest.mark.slow
def test_shearfind_diagonalizes_every_small_lattice(feasible_lattices):
    checked = 0
    for L, a, M, lp, lq in feasible_lattices(1024):
        lat = GaborLattice.from_params(L, a, M, lp, lq)
        sh = shearfind(L, a, M, lp, lq)
        assert sh.U_inv @ lat.generator() == sh.D @ sh.V, (L, a, M, lp, lq)
        assert sh.V.det() in (1 % L, -1 % L), (L, a, M, lp, lq)
        if L % (min_length(a, M, lp, lq) * noshear_factor(a, M, lp, lq)[1]) == 0:
            assert sh.s0 == 0, (L, a, M, lp, lq)
        checked += 1
    assert checked > 1_000_000
