"""
Signal and coefficient files.

Binary signal:       b'NSLG', u32 L, then L interleaved little-endian float64 (re, im).
Binary coefficients: b'NSLC', u32 M, u32 N, then M*N pairs with m varying fastest.
CSV signal:          one 're,im' line per sample.
CSV coefficients:    header 'm,n,re,im', one line per coefficient.
"""

import csv
import io
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from exceptions import FileFormatError

logger = logging.getLogger(__name__)

SIGNAL_MAGIC = b"NSLG"
COEF_MAGIC = b"NSLC"
_SIGNAL_HEADER = struct.Struct("<4sI")
_COEF_HEADER = struct.Struct("<4sII")
_PAIR = np.dtype("<f8")

PathLike = Union[str, Path]


def _fmt(x: float) -> str:
    return "%.17g" % x


def _is_csv(path: Path, fmt: str) -> bool:
    if fmt == "auto":
        return path.suffix.lower() == ".csv"
    if fmt not in ("csv", "binary"):
        raise ValueError(f"Unknown file format: {fmt}")
    return fmt == "csv"


def _interleave(values: np.ndarray) -> bytes:
    pairs = np.empty(2 * values.size, dtype=_PAIR)
    pairs[0::2] = values.real
    pairs[1::2] = values.imag
    return pairs.tobytes()


def _deinterleave(payload: bytes, count: int, path: Path) -> np.ndarray:
    if len(payload) != 16 * count:
        raise FileFormatError(f"{path}: payload has {len(payload)} bytes, header declares {count} samples")
    pairs = np.frombuffer(payload, dtype=_PAIR)
    return pairs[0::2] + 1j * pairs[1::2]


# --- signals ------------------------------------------------------------------------

def write_signal(path: PathLike, f: np.ndarray, fmt: str = "auto"):
    path = Path(path)
    f = np.asarray(f, dtype=complex).ravel()
    if _is_csv(path, fmt):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for z in f:
                writer.writerow([_fmt(z.real), _fmt(z.imag)])
    else:
        with open(path, "wb") as fh:
            fh.write(_SIGNAL_HEADER.pack(SIGNAL_MAGIC, f.size))
            fh.write(_interleave(f))
    logger.debug(f"Wrote {f.size} samples to {path}")


def read_signal(path: PathLike) -> np.ndarray:
    """Read a signal file; the format is detected from the magic bytes."""
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == SIGNAL_MAGIC:
        if len(data) < _SIGNAL_HEADER.size:
            raise FileFormatError(f"{path}: truncated header")
        _, L = _SIGNAL_HEADER.unpack_from(data)
        return _deinterleave(data[_SIGNAL_HEADER.size:], L, path)
    if data[:4] == COEF_MAGIC:
        raise FileFormatError(f"{path}: is a coefficient file, expected a signal")
    try:
        rows = list(csv.reader(io.StringIO(data.decode("utf-8"))))
        values = [complex(float(re), float(im)) for re, im in (r for r in rows if r)]
    except (UnicodeDecodeError, ValueError) as e:
        raise FileFormatError(f"{path}: not a signal file ({e})") from e
    if not values:
        raise FileFormatError(f"{path}: empty signal")
    return np.array(values, dtype=complex)


# --- coefficients ---------------------------------------------------------------------

def write_coefficients(path: PathLike, c: np.ndarray, fmt: str = "auto"):
    path = Path(path)
    c = np.asarray(c, dtype=complex)
    if c.ndim != 2:
        raise FileFormatError(f"coefficients must be 2-D, got shape {c.shape}")
    M, N = c.shape
    if _is_csv(path, fmt):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["m", "n", "re", "im"])
            for n in range(N):
                for m in range(M):
                    writer.writerow([m, n, _fmt(c[m, n].real), _fmt(c[m, n].imag)])
    else:
        with open(path, "wb") as fh:
            fh.write(_COEF_HEADER.pack(COEF_MAGIC, M, N))
            fh.write(_interleave(c.ravel(order="F")))
    logger.debug(f"Wrote {M}x{N} coefficients to {path}")


def read_coefficients(path: PathLike) -> np.ndarray:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == COEF_MAGIC:
        if len(data) < _COEF_HEADER.size:
            raise FileFormatError(f"{path}: truncated header")
        _, M, N = _COEF_HEADER.unpack_from(data)
        flat = _deinterleave(data[_COEF_HEADER.size:], M * N, path)
        return flat.reshape((M, N), order="F")
    if data[:4] == SIGNAL_MAGIC:
        raise FileFormatError(f"{path}: is a signal file, expected coefficients")
    try:
        reader = csv.reader(io.StringIO(data.decode("utf-8")))
        header = next(reader, None)
        if header != ["m", "n", "re", "im"]:
            raise FileFormatError(f"{path}: expected header m,n,re,im, got {header}")
        entries = [(int(m), int(n), float(re), float(im)) for m, n, re, im in (r for r in reader if r)]
    except (UnicodeDecodeError, ValueError) as e:
        if isinstance(e, FileFormatError):
            raise
        raise FileFormatError(f"{path}: not a coefficient file ({e})") from e
    if not entries:
        raise FileFormatError(f"{path}: no coefficients")
    M = max(e[0] for e in entries) + 1
    N = max(e[1] for e in entries) + 1
    if len(entries) != M * N:
        raise FileFormatError(f"{path}: {len(entries)} entries do not fill a {M}x{N} grid")
    c = np.zeros((M, N), dtype=complex)
    seen = np.zeros((M, N), dtype=bool)
    for m, n, re, im in entries:
        if m < 0 or n < 0:
            raise FileFormatError(f"{path}: negative index ({m}, {n})")
        if seen[m, n]:
            raise FileFormatError(f"{path}: duplicate entry ({m}, {n})")
        seen[m, n] = True
        c[m, n] = complex(re, im)
    return c
