"""Projected gradient descent on the product of unit circles.

Minimizes the p-norm surrogate of the peak of the composite time signal
d + F_R^H r, keeping every reserved tone on the complex unit circle via a
radial projection after each gradient step.  The update runs a fixed number
of iterations; an optional relative-improvement tolerance can stop early.

The per-entry complex gradient g is normalized so that finite differences
on the real and imaginary parts of r match Re(g) and Im(g); the descent
direction is -g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import ComplexSignal, Domain, as_samples, pnorm_parts
from .tones import TonePlan, data_time_rows, gather_reserved_rows, rt_time_rows

PROJECTION_EPS = 1e-15


@dataclass(frozen=True, eq=False)
class SolverConfig:
    """Hyperparameters for one solve: norm exponent, step, iterations, init."""

    p: float = 50.0
    alpha: float = 1.0
    iterations: int = 2000
    seed: int | Sequence[int] = 0
    init: np.ndarray | None = None   # pre-projection start; overrides the random-phase init
    record_trace: bool = False
    trace_stride: int = 10
    tol: float | None = None         # optional relative-improvement early stop
    oversampling: int = 1            # evaluate peak/objective on the L*N grid

    def __post_init__(self):
        if not np.isfinite(self.p) or self.p < 2.0:
            raise ValueError(f"p must be finite and >= 2, got {self.p}")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.iterations < 0:
            raise ValueError(f"iteration count must be >= 0, got {self.iterations}")
        if self.oversampling < 1:
            raise ValueError(f"oversampling must be >= 1, got {self.oversampling}")


class TracePoint(NamedTuple):
    iteration: int
    objective: float
    papr_db: float


@dataclass
class SolverResult:
    r_opt: ComplexSignal
    papr_db_final: float
    objective_final: float
    trace: list[TracePoint]
    grad_norms: np.ndarray
    iterations_run: int


@dataclass
class BatchResult:
    r_opt: np.ndarray          # (B, N_r), unit modulus
    papr_db: np.ndarray        # (B,)
    objective: np.ndarray      # (B,)
    iterations_run: np.ndarray  # (B,)
    max_grad_norm: np.ndarray  # (B,)


def project_unit_circle(r) -> np.ndarray:
    """Radial projection r_i / |r_i|; entries with |r_i| <= 1e-15 become 1+0j."""
    arr = np.asarray(r, dtype=np.complex128)
    mag = np.abs(arr)
    out = np.where(mag > PROJECTION_EPS, arr / np.where(mag > PROJECTION_EPS, mag, 1.0), 1.0 + 0.0j)
    return out


def _composite_rows(r_rows, d_time_rows_, plan, oversampling):
    return d_time_rows_ + rt_time_rows(r_rows, plan, oversampling)


def _grad_pieces(x_rows: np.ndarray, p: float, plan: TonePlan, oversampling: int):
    """Gradient rows plus the (m, w, s) pieces shared with the objective."""
    m, w, s = pnorm_parts(x_rows, p)
    if np.any(m == 0.0):
        raise ValueError("gradient undefined: composite signal is identically zero")
    u = w ** (p - 2.0) * (x_rows / m) / s ** (p - 1.0)
    g = gather_reserved_rows(u, plan, oversampling)
    return g, m[..., 0], s[..., 0], w


def objective(r, d_time, plan: TonePlan, p: float, oversampling: int = 1) -> float:
    """p-norm of d_time + partial_idft(r); requires unimodular r (tol 1e-9)."""
    r_vec = as_samples(r)
    if np.abs(np.abs(r_vec) - 1.0).max() > 1e-9:
        raise ValueError("objective requires unit-modulus reserved tones")
    d_rows = np.asarray(as_samples(d_time), dtype=np.complex128)
    x = d_rows + rt_time_rows(r_vec, plan, oversampling)
    m, _, s = pnorm_parts(x[None, :], p)
    return float((m * s)[0, 0])


def euclidean_gradient(r, d_time, plan: TonePlan, p: float, oversampling: int = 1) -> np.ndarray:
    """Complex gradient of the p-norm objective with respect to r.

    g[i] = (F_R u)[i] with u = |x|^{p-2} x / ||x||_p^{p-1}; finite differences
    on Re/Im of r reproduce Re(g)/Im(g).
    """
    r_vec = as_samples(r)
    d_rows = np.asarray(as_samples(d_time), dtype=np.complex128)
    x = d_rows + rt_time_rows(r_vec, plan, oversampling)
    g, _, _, _ = _grad_pieces(x[None, :], p, plan, oversampling)
    return g[0]


def _papr_from_w(w: np.ndarray) -> np.ndarray:
    # max|x|^2 / mean|x|^2 = n / sum w^2 since |x| = m*w
    n = w.shape[-1]
    return 10.0 * np.log10(n / (w ** 2).sum(axis=-1))


def _descend(r0_rows: np.ndarray, d_time_rows_: np.ndarray, plan: TonePlan,
             cfg: SolverConfig, keep_trace: bool):
    """Shared batch loop. Per-row early stop freezes rows independently."""
    r = project_unit_circle(r0_rows)
    batch = r.shape[0]
    k_max = cfg.iterations
    trace_obj: list[np.ndarray] = []
    trace_papr: list[np.ndarray] = []
    trace_iter: list[int] = []
    grad_norms = np.zeros((batch, k_max))
    iterations_run = np.zeros(batch, dtype=np.int64)
    active = np.ones(batch, dtype=bool)
    prev_obj = np.full(batch, np.inf)

    def record(k, obj, papr):
        if keep_trace and (cfg.record_trace or k % cfg.trace_stride == 0 or k == k_max):
            trace_iter.append(k)
            trace_obj.append(obj.copy())
            trace_papr.append(papr.copy())

    for k in range(k_max):
        x = _composite_rows(r, d_time_rows_, plan, cfg.oversampling)
        g, m, s, w = _grad_pieces(x, cfg.p, plan, cfg.oversampling)
        obj = m * s
        record(k, obj, _papr_from_w(w))
        if cfg.tol is not None:
            stalled = active & np.isfinite(prev_obj) & (np.abs(prev_obj - obj) <= cfg.tol * prev_obj)
            active &= ~stalled
            prev_obj = obj
            if not active.any():
                break
        gn = np.linalg.norm(g, axis=-1)
        grad_norms[active, k] = gn[active]
        iterations_run[active] += 1
        step = np.where(active, cfg.alpha, 0.0)[:, None]
        r = project_unit_circle(r - step * g)

    x = _composite_rows(r, d_time_rows_, plan, cfg.oversampling)
    m, w, s = pnorm_parts(x, cfg.p)
    obj = (m * s)[..., 0]
    papr = _papr_from_w(w)
    if keep_trace:
        last = int(iterations_run.max())
        if not trace_iter or trace_iter[-1] != last:
            trace_iter.append(last)
            trace_obj.append(obj.copy())
            trace_papr.append(papr.copy())
    trace = (trace_iter, trace_obj, trace_papr)
    return r, obj, papr, grad_norms, iterations_run, trace


def _random_phase_rows(shape, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random(shape))


def solve(d, plan: TonePlan, cfg: SolverConfig) -> SolverResult:
    """Run the projected descent for one data vector and return the full result."""
    d_vec = np.asarray(as_samples(d), dtype=np.complex128)
    if d_vec.size != plan.n_data:
        raise ValueError(f"data vector must have length {plan.n_data}, got {d_vec.size}")
    d_time = data_time_rows(d_vec[None, :], plan, cfg.oversampling)
    if cfg.init is not None:
        r0 = np.asarray(cfg.init, dtype=np.complex128)[None, :]
        if r0.shape[-1] != plan.n_reserved:
            raise ValueError(f"init vector must have length {plan.n_reserved}")
    else:
        r0 = _random_phase_rows((1, plan.n_reserved), cfg.seed)
    r, obj, papr, grad_norms, iters, (t_it, t_obj, t_papr) = _descend(
        r0, d_time, plan, cfg, keep_trace=True)
    trace = [TracePoint(k, float(o[0]), float(pp[0]))
             for k, o, pp in zip(t_it, t_obj, t_papr)]
    n_run = int(iters[0])
    return SolverResult(
        r_opt=ComplexSignal(r[0], Domain.FREQ),
        papr_db_final=float(papr[0]),
        objective_final=float(obj[0]),
        trace=trace,
        grad_norms=grad_norms[0, :n_run].copy(),
        iterations_run=n_run,
    )


def solve_batch(d_rows: np.ndarray, plan: TonePlan, cfg: SolverConfig,
                r0_rows: np.ndarray | None = None) -> BatchResult:
    """Vectorized solve over stacked data rows (B, N_d).

    Row results are bit-identical to per-row `solve` calls; r0_rows overrides
    the seeded random-phase initialization.
    """
    d_rows = np.asarray(d_rows, dtype=np.complex128)
    if d_rows.ndim != 2 or d_rows.shape[1] != plan.n_data:
        raise ValueError(f"expected data rows of shape (B, {plan.n_data})")
    d_time = data_time_rows(d_rows, plan, cfg.oversampling)
    if r0_rows is None:
        r0_rows = _random_phase_rows((d_rows.shape[0], plan.n_reserved), cfg.seed)
    else:
        r0_rows = np.asarray(r0_rows, dtype=np.complex128)
    r, obj, papr, grad_norms, iters, _ = _descend(r0_rows, d_time, plan, cfg, keep_trace=False)
    return BatchResult(
        r_opt=r,
        papr_db=papr,
        objective=obj,
        iterations_run=iters,
        max_grad_norm=grad_norms.max(axis=-1) if grad_norms.shape[-1] else np.zeros(r.shape[0]),
    )


def lipschitz_step_bound(grad_norms) -> float:
    """Advisory step size 1/max(recorded gradient norms); never applied automatically."""
    arr = np.asarray(grad_norms, dtype=float)
    if arr.size == 0:
        raise ValueError("lipschitz_step_bound needs at least one recorded gradient norm")
    peak = arr.max()
    if peak <= 0.0:
        raise ValueError("gradient norms must be positive")
    return float(1.0 / peak)
