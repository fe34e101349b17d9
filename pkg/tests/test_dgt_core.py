import numpy as np
import pytest

from dgt_core import (
    FirWindow,
    as_full,
    check_grid,
    dgt_fir,
    dgt_naive,
    dgt_sep,
    frame_blocks,
    frame_matrix,
    frame_op_apply,
    gabdual_sep,
    gabtight_sep,
    idgt_sep,
    multiwindow_windows,
    pgauss,
    relative_error,
    solve_blocks,
    window_from_spec,
)
from exceptions import DimensionError, IllegalLengthError, NotAFrameError, OracleLimitError
from lattice import GaborLattice

SEPARABLE_CASES = [(12, 3, 4), (24, 4, 6), (36, 6, 9), (60, 5, 12), (64, 4, 8), (72, 8, 12)]


def delta(L):
    d = np.zeros(L, dtype=complex)
    d[0] = 1
    return d


# --- windows --------------------------------------------------------------------

def test_fir_window_roundtrip():
    g = pgauss(32)
    fir = FirWindow.from_full(g, 9)
    assert len(fir) == 9
    assert fir.offset == -4
    full = fir.to_full(32)
    support = np.r_[28:32, 0:5]
    np.testing.assert_allclose(full[support], g[support])
    assert np.count_nonzero(full) == 9


def test_fir_window_longer_than_signal():
    with pytest.raises(DimensionError):
        FirWindow(np.ones(10)).to_full(8)


def test_as_full_checks_length():
    with pytest.raises(DimensionError):
        as_full(np.ones(7), 8)


def test_pgauss_unit_norm_and_fourier_invariant():
    g = pgauss(64)
    assert np.linalg.norm(g) == pytest.approx(1.0)
    np.testing.assert_allclose(np.fft.fft(g, norm="ortho"), g, atol=1e-10)
    np.testing.assert_allclose(g[1:], g[:0:-1], atol=1e-14)


def test_pgauss_rejects_bad_tfr():
    with pytest.raises(ValueError):
        pgauss(16, tfr=0)


def test_window_from_spec():
    lat = GaborLattice.from_params(64, 4, 8)
    np.testing.assert_allclose(window_from_spec("gauss", lat), pgauss(64, a=4, M=8))
    fir = window_from_spec("gauss:1:16", lat)
    assert isinstance(fir, FirWindow)
    assert len(fir) == 16
    with pytest.raises(ValueError, match="Unknown window"):
        window_from_spec("hann", lat)


# --- transforms -------------------------------------------------------------------

def test_dgt_naive_zero_signal():
    lat = GaborLattice.from_params(36, 6, 6, 1, 2)
    c = dgt_naive(np.zeros(36), pgauss(36), lat)
    assert c.shape == (6, 6)
    assert not c.any()


def test_dgt_naive_delta_window(random_signal):
    f = random_signal(4)
    c = dgt_naive(f, delta(4), GaborLattice(4, 2, 2, 0))
    np.testing.assert_allclose(c, np.tile(f[::2], (2, 1)), atol=1e-14)


def test_dgt_naive_limit():
    lat = GaborLattice.from_params(16, 2, 4)
    with pytest.raises(OracleLimitError):
        dgt_naive(np.ones(16), pgauss(16), lat, limit=8)


def test_dgt_naive_length_mismatch():
    lat = GaborLattice.from_params(16, 2, 4)
    with pytest.raises(DimensionError):
        dgt_naive(np.ones(12), pgauss(16), lat)


@pytest.mark.parametrize("L, a, M", SEPARABLE_CASES)
def test_dgt_sep_matches_naive(L, a, M, random_signal):
    f = random_signal(L)
    g = random_signal(L)
    ref = dgt_naive(f, g, GaborLattice.from_params(L, a, M))
    assert relative_error(dgt_sep(f, g, a, M), ref) < 1e-12


def test_dgt_sep_full_window_is_dft(random_signal):
    f = random_signal(10)
    c = dgt_sep(f, np.ones(10), 10, 10)
    np.testing.assert_allclose(c[:, 0], np.fft.fft(f), atol=1e-12)


def test_dgt_sep_inner_product():
    g = pgauss(48)
    c = dgt_sep(g, g, 4, 6)
    assert c[0, 0] == pytest.approx(1.0)


def test_dgt_sep_illegal_length():
    with pytest.raises(IllegalLengthError):
        dgt_sep(np.ones(10), np.ones(10), 3, 5)


@pytest.mark.parametrize("L, a, M", SEPARABLE_CASES)
@pytest.mark.parametrize("Lg", [1, 3, 8])
def test_dgt_fir_matches_sep(L, a, M, Lg, random_signal):
    f = random_signal(L)
    g = FirWindow(random_signal(Lg), offset=-(Lg // 2))
    ref = dgt_sep(f, g.to_full(L), a, M)
    assert relative_error(dgt_fir(f, g, a, M), ref) < 1e-12


def test_dgt_fir_delta_window(random_signal):
    L, a, M = 24, 4, 6
    f = random_signal(L)
    c = dgt_fir(f, FirWindow([1.0]), a, M)
    m, n = np.meshgrid(np.arange(M), np.arange(L // a), indexing="ij")
    expected = f[a * n] * np.exp(-2j * np.pi * a * n * m / M)
    np.testing.assert_allclose(c, expected, atol=1e-12)


def test_idgt_sep_zero():
    np.testing.assert_array_equal(idgt_sep(np.zeros((6, 4)), pgauss(24), 6, 6), np.zeros(24))


@pytest.mark.parametrize("L, a, M", SEPARABLE_CASES)
def test_idgt_sep_is_adjoint(L, a, M, rng, random_signal):
    f = random_signal(L)
    g = random_signal(L)
    c = rng.standard_normal((M, L // a)) + 1j * rng.standard_normal((M, L // a))
    lhs = np.vdot(c, dgt_sep(f, g, a, M))
    rhs = np.vdot(idgt_sep(c, g, a, M), f)
    assert lhs == pytest.approx(rhs)


def test_check_grid():
    with pytest.raises(DimensionError):
        check_grid(np.zeros((3, 4)), 4, 3)


# --- frame operators -----------------------------------------------------------------

def test_frame_operator_delta_full_lattice(random_signal):
    L = 12
    lat = GaborLattice.from_params(L, 1, L)
    f = random_signal(L)
    np.testing.assert_allclose(frame_op_apply(f, delta(L), lat), L * f, atol=1e-12)


@pytest.mark.parametrize("params", [(36, 6, 6, 1, 2), (16, 2, 4, 1, 4), (36, 2, 6, 1, 3), (24, 4, 6, 0, 1)])
def test_frame_op_matches_dense_matrix(params, random_signal):
    L = params[0]
    lat = GaborLattice.from_params(*params)
    g = random_signal(L)
    f = random_signal(L)
    S = frame_matrix(g, lat)
    np.testing.assert_allclose(S, S.conj().T, atol=1e-10)
    assert relative_error(frame_op_apply(f, g, lat), S @ f) < 1e-12


def test_frame_op_with_fir_window(random_signal):
    lat = GaborLattice.from_params(36, 6, 6, 1, 2)
    g = FirWindow(random_signal(5), offset=-2)
    f = random_signal(36)
    windows = multiwindow_windows(g, lat)
    assert len(windows) == 2
    assert all(isinstance(w, FirWindow) for w in windows)
    expected = frame_matrix(g.to_full(36), lat) @ f
    assert relative_error(frame_op_apply(f, g, lat), expected) < 1e-12


def test_frame_matrix_limit():
    lat = GaborLattice.from_params(64, 4, 8)
    with pytest.raises(OracleLimitError):
        frame_matrix(pgauss(64), lat, limit=32)


def test_frame_blocks_solve(random_signal):
    L, a, M = 48, 4, 12
    g = pgauss(L, a=a, M=M)
    v = random_signal(L)
    S = frame_matrix(g, GaborLattice.from_params(L, a, M))
    x = solve_blocks(frame_blocks(g, a, M), v)
    assert relative_error(S @ x, v) < 1e-10


# --- duals ----------------------------------------------------------------------------

def test_gabdual_sep_tight_input():
    L = 12
    np.testing.assert_allclose(gabdual_sep(delta(L), 1, L), delta(L) / L, atol=1e-12)


def test_gabdual_sep_reconstructs(random_signal):
    L, a, M = 64, 4, 8
    g = pgauss(L, a=a, M=M)
    gd = gabdual_sep(g, a, M)
    f = random_signal(L)
    assert relative_error(idgt_sep(dgt_sep(f, g, a, M), gd, a, M), f) < 1e-10


def test_gabdual_sep_not_a_frame():
    with pytest.raises(NotAFrameError):
        gabdual_sep(pgauss(32), 8, 2)


def test_gabtight_sep_tight_input():
    L = 12
    np.testing.assert_allclose(gabtight_sep(delta(L), 1, L), delta(L) / np.sqrt(L), atol=1e-12)


def test_gabtight_sep_is_tight(random_signal):
    L, a, M = 64, 4, 8
    gt = gabtight_sep(pgauss(L, a=a, M=M), a, M)
    f = random_signal(L)
    lat = GaborLattice.from_params(L, a, M)
    assert relative_error(frame_op_apply(f, gt, lat), f) < 1e-9


def test_relative_error():
    assert relative_error(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 0.0
    assert relative_error(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_gabtight_sep_block_limit():
    with pytest.raises(OracleLimitError, match="b=8"):
        gabtight_sep(pgauss(64, a=4, M=8), 4, 8, dense_limit=4)
    assert gabtight_sep(pgauss(64, a=4, M=8), 4, 8, dense_limit=8).shape == (64,)


def test_frame_matrix_splits_into_multiwindow_parts(feasible_lattices, rng, random_signal):
    nonseparable = [p for p in feasible_lattices(64) if p[4] > 1]
    for i in rng.choice(len(nonseparable), size=20, replace=False):
        L, a, M, lp, lq = nonseparable[i]
        lat = GaborLattice.from_params(L, a, M, lp, lq)
        base = GaborLattice.from_params(L, lq * a, M)
        g = random_signal(L)
        parts = sum(frame_matrix(gj, base) for gj in multiwindow_windows(g, lat))
        assert relative_error(parts, frame_matrix(g, lat)) < 1e-12, (L, a, M, lp, lq)
