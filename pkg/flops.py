"""
Flop-count model of the DGT algorithms and the lambda2 crossover benchmark.

A complex FFT of length M is counted as 4*M*log2(M) flops; signal and
window are complex.
"""

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from scipy.stats import spearmanr

from config import get_config
from dgt_core import pgauss
from lattice import GaborLattice, is_feasible, min_length, shearfind, smith2x2
from nonsep import create_algorithm
from nonsep.ola import OlaConfig

logger = logging.getLogger(__name__)

CROSSOVER_HEADER = [
    "lambda1", "lambda2", "L", "a", "M", "algorithm",
    "flops_model", "time_ns_median", "freq_shear", "time_shear",
]


class FlopAlgorithm(str, Enum):
    MW_FIR = "mw_fir"
    MW_FULL = "mw_full"
    SNF = "snf"
    SHEAR_NO_FREQ = "shear_no_freq"
    SHEAR_FREQ = "shear_freq"
    SHEAR_OLA_NO_FREQ = "shear_ola_no_freq"
    SHEAR_OLA_FREQ = "shear_ola_freq"
    RECT_FULL = "rect_full"
    RECT_FIR = "rect_fir"


@dataclass
class FlopEstimate:
    algorithm: FlopAlgorithm
    flops: float
    inputs: Dict[str, Optional[int]] = field(default_factory=dict)
    constants: Dict[str, float] = field(default_factory=dict)


def _rect_constants(L: int, a: int, M: int) -> Tuple[int, int, int, int]:
    """(c, d, p, q) of the rectangular lattice with time step a and M channels."""
    b, N = L // M, L // a
    c = math.gcd(a, M)
    return c, math.gcd(b, N), a // c, M // c


def flops_rect_full(L: int, a: int, M: int) -> float:
    c, d, p, q = _rect_constants(L, a, M)
    N = L // a
    return L * (8 * q + 4 * math.log2(d)) + 4 * M * N * math.log2(L / p)


def flops_rect_full_expanded(L: int, a: int, M: int) -> float:
    """Uncollected form: factorization products, signal/coefficient reshuffles, FFTs."""
    _, d, _, q = _rect_constants(L, a, M)
    N = L // a
    return 8 * L * q + 4 * L * math.log2(d) + 4 * M * N * math.log2(d) + 4 * M * N * math.log2(M)


def flops_rect_fir(L: int, a: int, M: int, Lg: int) -> float:
    N = L // a
    return 8 * L * Lg / a + 4 * N * M * math.log2(M)


def flops_naive(L: int, M: int, N: int) -> float:
    return 8.0 * L * M * N


def _require(value: Optional[int], what: str, algorithm: FlopAlgorithm) -> int:
    if value is None:
        raise ValueError(f"{algorithm.value} needs {what}")
    return value


def flops_table(
    lat: GaborLattice,
    algorithm: FlopAlgorithm,
    Lg: Optional[int] = None,
    Lb: Optional[int] = None,
) -> FlopEstimate:
    """Evaluate one row of the cost table for the lattice."""
    algorithm = FlopAlgorithm(algorithm)
    L, a, M, N = lat.L, lat.a, lat.M, lat.N
    lam2 = lat.lambda2
    c, d, p, q = lat.c, lat.d, lat.p, lat.q
    sh = shearfind(L, a, M, lat.lambda1, lam2)
    k_time = 1 if sh.time_shear_needed else 0
    consts: Dict[str, float] = {"c": c, "d": d, "p": p, "q": q, "k_time": k_time}
    log2 = math.log2

    if algorithm is FlopAlgorithm.RECT_FULL:
        flops = flops_rect_full(L, a, M)
    elif algorithm in (FlopAlgorithm.RECT_FIR, FlopAlgorithm.MW_FIR):
        flops = flops_rect_fir(L, a, M, _require(Lg, "L_g", algorithm))
    elif algorithm is FlopAlgorithm.MW_FULL:
        _, d_mw, p_mw, q_mw = _rect_constants(L, lam2 * a, M)
        consts.update(d_mw=d_mw, p_mw=p_mw, q_mw=q_mw)
        flops = L * lam2 * (8 * q_mw + 4 * log2(d_mw)) + M * N * (4 * log2(L / p_mw) + 6)
    elif algorithm is FlopAlgorithm.SNF:
        sm = smith2x2(((a, 0), (lat.s, lat.b)), L)
        _, d_sm, _, _ = _rect_constants(L, sm.d1, L // sm.d2)
        consts.update(d_sm=d_sm)
        flops = L * (8 * q + 4 * log2(d_sm) + 8 * log2(L) + 18) + M * N * (4 * log2(L / p) + 6)
    elif algorithm is FlopAlgorithm.SHEAR_NO_FREQ:
        flops = L * (8 * q + 4 * log2(d) + 6 * k_time) + M * N * (4 * log2(L / p) + 6 * k_time)
    elif algorithm is FlopAlgorithm.SHEAR_FREQ:
        c_sh = math.gcd(sh.b_r, sh.N_r)
        consts.update(c_sh=c_sh)
        flops = L * (8 * q + 4 * log2(L * c_sh) + 6 + 6 * k_time) + M * N * (4 * log2(L / p) + 6)
    else:
        Lg = _require(Lg, "L_g", algorithm)
        Lb = _require(Lb, "L_b", algorithm)
        ola = OlaConfig(Lb, Lg)
        rho = float(ola.rho)
        Lx = ola.extended_length(lat)
        local = GaborLattice.from_params(Lx, a, M, lat.lambda1, lam2)
        local_sh = shearfind(Lx, a, M, lat.lambda1, lam2)
        consts.update(rho=rho, k_time=1 if local_sh.time_shear_needed else 0)
        k_time = consts["k_time"]
        if algorithm is FlopAlgorithm.SHEAR_OLA_NO_FREQ:
            d_shola = local.d
            consts.update(d_shola=d_shola)
            flops = (rho * L * (8 * q + 4 * log2(rho * d_shola) + 6 * k_time)
                     + rho * M * N * (4 * log2(rho * Lb / p) + 6 * k_time))
        else:
            c_shola = math.gcd(local_sh.b_r, local_sh.N_r)
            consts.update(c_shola=c_shola)
            flops = (rho * L * (8 * q + 4 * log2(rho * L * c_shola) + 6 * k_time + 6)
                     + rho * M * N * (4 * log2(rho * Lb / p) + 6))

    inputs = {"L": L, "a": a, "M": M, "lambda1": lat.lambda1, "lambda2": lam2, "L_g": Lg, "L_b": Lb}
    return FlopEstimate(algorithm, float(flops), inputs, consts)


def flops_for(lat: GaborLattice, name: str, Lg: Optional[int] = None, Lb: Optional[int] = None) -> float:
    """Model count for a runtime algorithm name, picking the matching table row."""
    if name == "naive":
        return flops_naive(lat.L, lat.M, lat.N)
    if name == "separable":
        row = FlopAlgorithm.RECT_FIR if Lg is not None else FlopAlgorithm.RECT_FULL
    elif name == "multiwin":
        row = FlopAlgorithm.MW_FIR if Lg is not None else FlopAlgorithm.MW_FULL
    elif name == "snf":
        row = FlopAlgorithm.SNF
    elif name == "shear":
        freq = shearfind(lat.L, lat.a, lat.M, lat.lambda1, lat.lambda2).freq_shear_needed
        row = FlopAlgorithm.SHEAR_FREQ if freq else FlopAlgorithm.SHEAR_NO_FREQ
    elif name == "ola":
        Lx = OlaConfig(Lb, Lg).extended_length(lat)
        freq = shearfind(Lx, lat.a, lat.M, lat.lambda1, lat.lambda2).freq_shear_needed
        row = FlopAlgorithm.SHEAR_OLA_FREQ if freq else FlopAlgorithm.SHEAR_OLA_NO_FREQ
    else:
        raise ValueError(f"Unknown algorithm: {name}")
    return flops_table(lat, row, Lg, Lb).flops


# --- crossover benchmark ----------------------------------------------------------

@dataclass
class CrossoverRow:
    lambda1: int
    lambda2: int
    L: int
    a: int
    M: int
    algorithm: str
    flops_model: float
    time_ns_median: Optional[int]
    freq_shear: bool
    time_shear: bool


def _time_algorithm(lat: GaborLattice, name: str, f: np.ndarray, g: np.ndarray, repeats: int) -> int:
    algo = create_algorithm(name, lat)
    times = []
    for _ in range(repeats):
        start = time.perf_counter_ns()
        algo.forward(f, g)
        times.append(time.perf_counter_ns() - start)
    return int(np.median(times))


def crossover_scan(
    a: int,
    M: int,
    lambda2_values: Iterable[int],
    l_factor: Optional[int] = None,
    repeats: Optional[int] = None,
    seed: Optional[int] = None,
    algorithms: Sequence[str] = ("multiwin", "shear", "snf"),
    measure: bool = True,
) -> List[CrossoverRow]:
    """
    Model and time each algorithm for lambda = 1/lambda2 at L = lcm(a, M) * l_factor.

    Lambdas for which L is not a legal length are skipped with a warning.
    """
    bench = get_config().bench
    l_factor = bench.l_factor if l_factor is None else l_factor
    repeats = bench.repeats if repeats is None else repeats
    seed = bench.seed if seed is None else seed
    L = math.lcm(a, M) * l_factor
    rng = np.random.default_rng(seed)

    rows: List[CrossoverRow] = []
    for lam2 in lambda2_values:
        lam1 = 1 if lam2 > 1 else 0
        if not is_feasible(L, a, M, lam1, lam2):
            logger.warning(
                f"Skipping lambda={lam1}/{lam2}: L={L} is not a multiple of "
                f"L_min={min_length(a, M, lam1, lam2)}"
            )
            continue
        lat = GaborLattice.from_params(L, a, M, lam1, lam2)
        sh = shearfind(L, a, M, lam1, lam2)
        f = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g = pgauss(L, a=a, M=M)
        for name in algorithms:
            flops = flops_for(lat, name)
            elapsed = _time_algorithm(lat, name, f, g, repeats) if measure else None
            rows.append(CrossoverRow(
                lambda1=lam1, lambda2=lam2, L=L, a=a, M=M, algorithm=name,
                flops_model=flops, time_ns_median=elapsed,
                freq_shear=sh.freq_shear_needed, time_shear=sh.time_shear_needed,
            ))
            logger.debug(f"{lat} {name}: {flops:.4g} flops, {elapsed} ns")
    return rows


def write_crossover_csv(rows: Iterable[CrossoverRow], stream: TextIO):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CROSSOVER_HEADER)
    for row in rows:
        d = asdict(row)
        d["flops_model"] = f"{row.flops_model:.17g}"
        d["time_ns_median"] = "" if row.time_ns_median is None else row.time_ns_median
        d["freq_shear"] = int(row.freq_shear)
        d["time_shear"] = int(row.time_shear)
        writer.writerow([d[key] for key in CROSSOVER_HEADER])


@dataclass
class CrossoverSummary:
    a: int
    M: int
    algorithm: str
    model_slope: float
    model_ratio: float
    time_spearman: Optional[float]


def crossover_summary(rows: Sequence[CrossoverRow]) -> List[CrossoverSummary]:
    """Per (a, M, algorithm): least-squares slope of the model in lambda2, max/min model ratio and rank correlation of time with lambda2."""
    groups: Dict[Tuple[int, int, str], List[CrossoverRow]] = {}
    for row in rows:
        groups.setdefault((row.a, row.M, row.algorithm), []).append(row)

    out = []
    for (a, M, name), group in groups.items():
        lam2 = np.array([r.lambda2 for r in group], dtype=float)
        model = np.array([r.flops_model for r in group], dtype=float)
        slope = float(np.polyfit(lam2, model, 1)[0]) if len(group) > 1 else 0.0
        rho = None
        times = [r.time_ns_median for r in group]
        if len(group) > 2 and all(t is not None for t in times):
            rho = float(spearmanr(lam2, np.array(times, dtype=float)).statistic)
        out.append(CrossoverSummary(a, M, name, slope, float(model.max() / model.min()), rho))
    return out
