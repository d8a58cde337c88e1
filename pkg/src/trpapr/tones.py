"""Subcarrier partition bookkeeping and the partial-IDFT of the reserved tones.

A TonePlan splits the N subcarriers into a data set and a reserved set.
Reserved tones are injected into the time domain through `partial_idft`,
which is computed as embed-then-FFT rather than by materializing the
N x N_r synthesis matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ComplexSignal, Domain, as_samples, pad_spectrum, unitary_idft


@dataclass(frozen=True)
class TonePlan:
    """Partition of {0..N-1} into data indices and strictly increasing reserved indices."""

    n: int
    reserved: np.ndarray
    data: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"subcarrier count must be >= 1, got {self.n}")
        res = np.asarray(self.reserved, dtype=np.int64).ravel()
        if res.size > 0:
            if res.min() < 0 or res.max() >= self.n:
                raise ValueError("reserved index out of range")
            if np.unique(res).size != res.size:
                raise ValueError("reserved indices must be unique")
        res = np.sort(res)
        res.flags.writeable = False
        dat = np.setdiff1d(np.arange(self.n, dtype=np.int64), res)
        dat.flags.writeable = False
        object.__setattr__(self, "reserved", res)
        object.__setattr__(self, "data", dat)

    @property
    def n_reserved(self) -> int:
        return self.reserved.size

    @property
    def n_data(self) -> int:
        return self.data.size

    @classmethod
    def equispaced(cls, n: int, n_reserved: int) -> "TonePlan":
        """Reserved comb {0, n/n_reserved, 2n/n_reserved, ...}; requires n_reserved | n."""
        if n_reserved < 1 or n % n_reserved != 0:
            raise ValueError("n_reserved must be a positive divisor of n")
        return cls(n, np.arange(0, n, n // n_reserved))

    @classmethod
    def random(cls, n: int, n_reserved: int, seed) -> "TonePlan":
        """Sorted uniform random subset of n_reserved tones, seeded."""
        if not 0 <= n_reserved <= n:
            raise ValueError("n_reserved must lie in [0, n]")
        rng = np.random.default_rng(seed)
        return cls(n, np.sort(rng.choice(n, size=n_reserved, replace=False)))

    @classmethod
    def from_file(cls, path, n: int) -> "TonePlan":
        """Read one 0-based reserved index per line; '#' starts a comment."""
        indices = []
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                indices.append(int(line))
        return cls(n, np.asarray(indices, dtype=np.int64))

    def to_file(self, path) -> None:
        lines = [f"# {self.n_reserved} reserved tones of {self.n} subcarriers"]
        lines += [str(int(k)) for k in self.reserved]
        Path(path).write_text("\n".join(lines) + "\n")


def build_tone_plan(n: int, reserved_indices) -> TonePlan:
    return TonePlan(n, np.asarray(list(reserved_indices), dtype=np.int64))


def _check_len(vec: np.ndarray, expected: int, what: str) -> None:
    if vec.size != expected:
        raise ValueError(f"{what} must have length {expected}, got {vec.size}")


# ---------------------------------------------------------------------------
# raw-array fast path (rows on the last axis); the solvers iterate on these

def embed_rows(d_rows, r_rows, plan: TonePlan) -> np.ndarray:
    """Scatter data/reserved rows into full (..., N) spectra; either side may be None."""
    parts = [p for p in (d_rows, r_rows) if p is not None]
    if not parts:
        raise ValueError("embed_rows needs at least one of d_rows, r_rows")
    lead = np.broadcast_shapes(*(np.asarray(p).shape[:-1] for p in parts))
    out = np.zeros(lead + (plan.n,), dtype=np.complex128)
    if d_rows is not None:
        d_rows = np.asarray(d_rows, dtype=np.complex128)
        if d_rows.shape[-1] != plan.n_data:
            raise ValueError(f"data rows must have last axis {plan.n_data}, got {d_rows.shape[-1]}")
        out[..., plan.data] = d_rows
    if r_rows is not None:
        r_rows = np.asarray(r_rows, dtype=np.complex128)
        if r_rows.shape[-1] != plan.n_reserved:
            raise ValueError(f"reserved rows must have last axis {plan.n_reserved}, got {r_rows.shape[-1]}")
        out[..., plan.reserved] = r_rows
    return out


def padded_reserved_bins(plan: TonePlan, oversampling: int) -> np.ndarray:
    """Positions of the reserved tones inside the zero-padded length L*N spectrum."""
    half = plan.n // 2
    return np.where(plan.reserved < half, plan.reserved,
                    plan.reserved + (oversampling - 1) * plan.n)


def rt_time_rows(r_rows: np.ndarray, plan: TonePlan, oversampling: int = 1) -> np.ndarray:
    """Time-domain contribution of reserved rows, optionally on the oversampled grid."""
    r_rows = np.asarray(r_rows, dtype=np.complex128)
    out_len = plan.n * oversampling
    spec = np.zeros(r_rows.shape[:-1] + (out_len,), dtype=np.complex128)
    spec[..., padded_reserved_bins(plan, oversampling)] = r_rows
    return unitary_idft(spec)


def gather_reserved_rows(time_rows: np.ndarray, plan: TonePlan, oversampling: int = 1) -> np.ndarray:
    """Adjoint of rt_time_rows: forward unitary DFT gathered at the reserved bins."""
    time_rows = np.asarray(time_rows, dtype=np.complex128)
    spec = np.fft.fft(time_rows, axis=-1) / np.sqrt(time_rows.shape[-1])
    return spec[..., padded_reserved_bins(plan, oversampling)]


def data_time_rows(d_rows: np.ndarray, plan: TonePlan, oversampling: int = 1) -> np.ndarray:
    """Time-domain data signal for stacked data rows (oversampled when requested)."""
    spec = embed_rows(d_rows, None, plan)
    return unitary_idft(pad_spectrum(spec, oversampling))


# ---------------------------------------------------------------------------
# public single-signal operations

def embed(d, r, plan: TonePlan) -> ComplexSignal:
    """Place data values on the data tones and reserved values on the reserved tones."""
    d_vec = as_samples(d) if d is not None else None
    r_vec = as_samples(r) if r is not None else None
    if d_vec is not None:
        _check_len(d_vec, plan.n_data, "data vector")
    if r_vec is not None:
        _check_len(r_vec, plan.n_reserved, "reserved vector")
    return ComplexSignal(embed_rows(d_vec, r_vec, plan), Domain.FREQ)


def extract_data(x, plan: TonePlan) -> ComplexSignal:
    vec = as_samples(x)
    _check_len(vec, plan.n, "spectrum")
    return ComplexSignal(vec[plan.data], Domain.FREQ)


def extract_rt(x, plan: TonePlan) -> ComplexSignal:
    vec = as_samples(x)
    _check_len(vec, plan.n, "spectrum")
    return ComplexSignal(vec[plan.reserved], Domain.FREQ)


def partial_idft(r, plan: TonePlan) -> ComplexSignal:
    """idft(embed(0, r, plan)) without building the zero-filled data half explicitly."""
    r_vec = as_samples(r)
    _check_len(r_vec, plan.n_reserved, "reserved vector")
    return ComplexSignal(rt_time_rows(r_vec, plan), Domain.TIME)
