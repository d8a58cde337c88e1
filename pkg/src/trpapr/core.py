"""Complex-signal primitives: unitary DFT/IDFT, constellations, PAPR, p-norms.

Everything downstream (tone embedding, the solvers, the sensing metrics)
is built on the functions in this module.  Transforms are unitary (1/sqrt(N)
both ways), so energy is preserved and round trips are exact to machine
precision.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class Domain(enum.Enum):
    TIME = "time"
    FREQ = "freq"


@dataclass(frozen=True)
class ComplexSignal:
    """A 1-D complex sample vector with an explicit time/frequency tag."""

    samples: np.ndarray
    domain: Domain

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError(f"expected a 1-D sample vector, got shape {arr.shape}")
        if arr.size < 1:
            raise ValueError("a signal must contain at least one sample")
        if not isinstance(self.domain, Domain):
            raise ValueError(f"domain must be a Domain enum, got {self.domain!r}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def n(self) -> int:
        return self.samples.size


def as_samples(x) -> np.ndarray:
    """Accept a ComplexSignal or any array-like; return a 1-D complex array."""
    if isinstance(x, ComplexSignal):
        return x.samples
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    return arr


def _require_domain(x: ComplexSignal, domain: Domain, op: str) -> None:
    if not isinstance(x, ComplexSignal):
        raise ValueError(f"{op} requires a ComplexSignal with a domain tag")
    if x.domain is not domain:
        raise ValueError(f"{op} expects a {domain.value}-domain signal, got {x.domain.value}")


# ---------------------------------------------------------------------------
# unitary transforms

def unitary_idft(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unitary inverse DFT on raw arrays; rows transform independently."""
    values = np.asarray(values, dtype=np.complex128)
    return np.fft.ifft(values, axis=axis) * np.sqrt(values.shape[axis])


def unitary_dft(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unitary forward DFT on raw arrays; exact inverse of unitary_idft."""
    values = np.asarray(values, dtype=np.complex128)
    return np.fft.fft(values, axis=axis) / np.sqrt(values.shape[axis])


def idft(x: ComplexSignal) -> ComplexSignal:
    """Frequency -> time, time sample n = (1/sqrt(N)) sum_k x[k] e^{+j2pi nk/N}."""
    _require_domain(x, Domain.FREQ, "idft")
    return ComplexSignal(unitary_idft(x.samples), Domain.TIME)


def dft(x: ComplexSignal) -> ComplexSignal:
    """Time -> frequency; dft(idft(x)) == x to machine precision."""
    _require_domain(x, Domain.TIME, "dft")
    return ComplexSignal(unitary_dft(x.samples), Domain.FREQ)


def pad_spectrum(spec_rows: np.ndarray, factor: int) -> np.ndarray:
    """Zero-pad length-N spectra mid-band to length factor*N (rows on last axis).

    Bins [0, N/2) keep their index, bins [N/2, N) move to the top of the
    padded grid, which is the usual baseband oversampling layout.
    """
    if factor < 1 or int(factor) != factor:
        raise ValueError(f"oversampling factor must be a positive integer, got {factor}")
    spec_rows = np.asarray(spec_rows, dtype=np.complex128)
    if factor == 1:
        return spec_rows
    n = spec_rows.shape[-1]
    half = n // 2
    padded = np.zeros(spec_rows.shape[:-1] + (n * factor,), dtype=np.complex128)
    padded[..., :half] = spec_rows[..., :half]
    padded[..., -(n - half):] = spec_rows[..., half:]
    return padded


def oversampled_idft(x: ComplexSignal, factor: int) -> ComplexSignal:
    """Unitary IDFT of the mid-band zero-padded spectrum (length factor*N)."""
    _require_domain(x, Domain.FREQ, "oversampled_idft")
    return ComplexSignal(unitary_idft(pad_spectrum(x.samples, factor)), Domain.TIME)


# ---------------------------------------------------------------------------
# metrics

def papr_db(x) -> float:
    """Peak-to-average power ratio 10*log10(max|x|^2 / mean|x|^2) in dB.

    Accepts a time-domain ComplexSignal or a plain vector of time samples.
    """
    if isinstance(x, ComplexSignal):
        _require_domain(x, Domain.TIME, "papr_db")
    samples = as_samples(x)
    power = np.abs(samples) ** 2
    peak = power.max()
    if peak == 0.0:
        raise ValueError("PAPR is undefined for an all-zero signal")
    return float(10.0 * np.log10(peak / power.mean()))


def papr_db_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise PAPR in dB for a (..., N) stack of time-domain samples."""
    power = np.abs(np.asarray(rows)) ** 2
    peak = power.max(axis=-1)
    if np.any(peak == 0.0):
        raise ValueError("PAPR is undefined for an all-zero signal")
    return 10.0 * np.log10(peak / power.mean(axis=-1))


def pnorm(x, p: float) -> float:
    """l_p norm with max-scaling so that p up to several hundred stays finite.

    Uses m * (sum (|x_i|/m)^p)^(1/p) with m = max|x_i|; satisfies
    max|x_i| <= pnorm(x, p) <= n^(1/p) * max|x_i|.
    """
    samples = as_samples(x)
    if samples.size == 0:
        raise ValueError("pnorm of an empty vector is undefined")
    if not np.isfinite(p) or p < 2.0:
        raise ValueError(f"p must be finite and >= 2, got {p}")
    mag = np.abs(samples)
    m = mag.max()
    if m == 0.0:
        return 0.0
    return float(m * ((mag / m) ** p).sum() ** (1.0 / p))


def pnorm_parts(rows: np.ndarray, p: float):
    """Shared max-scaled pieces for row-wise p-norm work.

    Returns (m, w, s) with keepdims shapes: m = row max |x|, w = |x|/m,
    s = (sum w^p)^(1/p).  The row p-norm is m*s; rows that are identically
    zero get m = 0 and w = 0 so callers can mask them.
    """
    mag = np.abs(rows)
    m = mag.max(axis=-1, keepdims=True)
    safe_m = np.where(m > 0.0, m, 1.0)
    w = mag / safe_m
    s = (w ** p).sum(axis=-1, keepdims=True) ** (1.0 / p)
    return m, w, s


# ---------------------------------------------------------------------------
# constellations

@dataclass(frozen=True)
class Constellation:
    """A unit-average-power symbol alphabet ("psk" or "qam", order a power of 2)."""

    kind: str
    order: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in ("psk", "qam"):
            raise ValueError(f"constellation kind must be 'psk' or 'qam', got {self.kind!r}")
        m = self.order
        if m < 2 or (m & (m - 1)) != 0:
            raise ValueError(f"constellation order must be a power of 2 >= 2, got {m}")
        pts = np.asarray(self.points, dtype=np.complex128).copy()
        if pts.size != m:
            raise ValueError(f"expected {m} points, got {pts.size}")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @classmethod
    def psk(cls, order: int) -> "Constellation":
        k = np.arange(order)
        return cls("psk", order, np.exp(2j * np.pi * k / order))

    @classmethod
    def qam(cls, order: int) -> "Constellation":
        """Square QAM, Gray-free index layout, normalized to unit average power."""
        side = int(round(np.sqrt(order)))
        if side * side != order:
            raise ValueError(f"QAM order must be a perfect square, got {order}")
        levels = 2 * np.arange(side) - (side - 1)
        grid = levels[None, :] + 1j * levels[:, None]
        pts = grid.ravel().astype(np.complex128)
        pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
        return cls("qam", order, pts)

    @classmethod
    def make(cls, kind: str, order: int) -> "Constellation":
        if kind == "psk":
            return cls.psk(order)
        if kind == "qam":
            return cls.qam(order)
        raise ValueError(f"unknown constellation kind {kind!r}")


def map_symbols(indices, constellation: Constellation) -> ComplexSignal:
    """Map integer symbol indices in [0, M) onto constellation points (Freq domain)."""
    idx = np.asarray(indices)
    if idx.size == 0:
        raise ValueError("cannot map an empty index sequence")
    if idx.dtype.kind not in "iu":
        raise ValueError("symbol indices must be integers")
    if idx.min() < 0 or idx.max() >= constellation.order:
        raise ValueError(f"symbol index out of range [0, {constellation.order})")
    return ComplexSignal(constellation.points[idx], Domain.FREQ)
