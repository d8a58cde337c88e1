"""Convex tone-reservation baseline: peak minimization under a power ball.

The reserved-tone vector is free inside the Euclidean ball ||r||^2 <= p_max,
so the problem is convex.  It is solved with a smoothed first-order scheme:
accelerated projected gradient descent (FISTA with gradient-based adaptive
restart) on the p-norm surrogate, continued over an increasing schedule of
p values with warm starts.  Step sizes come from the analytic curvature
bound of the p-norm, safety/((p-1)/peak), so no line search is needed.
The returned iterate is the one with the smallest true peak seen anywhere
along the way.

`certify` audits a candidate on small instances against an independent
projected-subgradient method on the exact (nonsmooth) infinity norm, run
from multiple starts with adaptive Polyak target steps.  The certificate
objective is the peak magnitude ||d + F_R^H r||_inf.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import as_samples, papr_db_rows, pnorm_parts
from .tones import TonePlan, data_time_rows, gather_reserved_rows, rt_time_rows


@dataclass(frozen=True)
class QcqpConfig:
    p_max: float
    tol: float = 1e-4                  # relative best-peak improvement that counts as converged
    max_iters: int = 600               # iterations per smoothing stage
    schedule: tuple = (8.0, 32.0, 128.0, 512.0)
    safety: float = 1.5                # Lipschitz safety factor in the step size
    oversampling: int = 1

    def __post_init__(self):
        if self.p_max <= 0.0:
            raise ValueError(f"p_max must be > 0, got {self.p_max}")
        if not 0.0 < self.tol < 1.0:
            raise ValueError(f"tol must lie in (0, 1), got {self.tol}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if len(self.schedule) < 1 or any(p < 2.0 for p in self.schedule):
            raise ValueError("smoothing schedule needs p values >= 2")
        if list(self.schedule) != sorted(self.schedule):
            raise ValueError("smoothing schedule must be increasing")


@dataclass
class QcqpResult:
    r_opt: np.ndarray
    papr_db: float
    objective_inf: float     # peak magnitude at r_opt
    converged: bool
    iterations_run: int


@dataclass
class QcqpBatchResult:
    r_opt: np.ndarray        # (B, N_r)
    papr_db: np.ndarray      # (B,)
    objective_inf: np.ndarray
    converged: np.ndarray    # (B,) bool
    iterations_run: int


@dataclass
class Certificate:
    candidate_objective: float
    oracle_objective: float
    relative_gap: float      # (candidate - oracle) / oracle
    n_starts: int
    iterations: int


def _project_ball(r_rows: np.ndarray, radius: float) -> np.ndarray:
    nrm = np.linalg.norm(r_rows, axis=-1, keepdims=True)
    return r_rows * np.minimum(1.0, radius / np.maximum(nrm, 1e-300))


def _peak_rows(r_rows, d_time, plan, oversampling):
    x = d_time + rt_time_rows(r_rows, plan, oversampling)
    return np.abs(x).max(axis=-1)


def _solve_rows(d_rows: np.ndarray, plan: TonePlan, cfg: QcqpConfig):
    d_time = data_time_rows(d_rows, plan, cfg.oversampling)
    batch = d_rows.shape[0]
    radius = np.sqrt(cfg.p_max)
    r = np.zeros((batch, plan.n_reserved), dtype=np.complex128)
    r_prev = r.copy()
    best_r = r.copy()
    best_inf = np.abs(d_time).max(axis=-1)
    mark_inf = None  # best peak at the midpoint of the final stage, for the converged flag
    total_iters = 0

    for stage, p in enumerate(cfg.schedule):
        final_stage = stage == len(cfg.schedule) - 1
        tk = np.ones(batch)
        r_prev = r.copy()
        for t in range(cfg.max_iters):
            tk_next = (1.0 + np.sqrt(1.0 + 4.0 * tk ** 2)) / 2.0
            y = r + ((tk - 1.0) / tk_next)[:, None] * (r - r_prev)
            x = d_time + rt_time_rows(y, plan, cfg.oversampling)
            m, w, s = pnorm_parts(x, p)
            nonzero = m[:, 0] > 0.0
            u = np.zeros_like(x)
            if nonzero.any():
                u[nonzero] = (w[nonzero] ** (p - 2.0) * (x[nonzero] / m[nonzero])
                              / s[nonzero] ** (p - 1.0))
            g = gather_reserved_rows(u, plan, cfg.oversampling)
            step = np.where(nonzero, m[:, 0] / (cfg.safety * (p - 1.0)), 0.0)[:, None]
            r_new = _project_ball(y - step * g, radius)
            restart = np.real(np.sum(np.conj(g) * (r_new - r), axis=-1)) > 0.0
            tk = np.where(restart, 1.0, tk_next)
            r_prev = r
            r = r_new
            total_iters += 1
            peak = _peak_rows(r, d_time, plan, cfg.oversampling)
            better = peak < best_inf
            best_inf = np.where(better, peak, best_inf)
            best_r[better] = r[better]
            if final_stage and t == cfg.max_iters // 2:
                mark_inf = best_inf.copy()

    if mark_inf is None:
        mark_inf = best_inf
    converged = (mark_inf - best_inf) <= cfg.tol * np.maximum(best_inf, 1e-300)

    x = d_time + rt_time_rows(best_r, plan, cfg.oversampling)
    nonzero = np.abs(x).max(axis=-1) > 0.0
    papr = np.full(batch, np.nan)
    if nonzero.any():
        papr[nonzero] = papr_db_rows(x[nonzero])
    return best_r, papr, best_inf, converged, total_iters


def solve_qcqp(d, plan: TonePlan, cfg: QcqpConfig) -> QcqpResult:
    """Solve the ball-constrained peak-minimization for one data vector."""
    d_vec = np.asarray(as_samples(d), dtype=np.complex128)
    if d_vec.size != plan.n_data:
        raise ValueError(f"data vector must have length {plan.n_data}, got {d_vec.size}")
    r, papr, inf_val, conv, iters = _solve_rows(d_vec[None, :], plan, cfg)
    return QcqpResult(
        r_opt=r[0],
        papr_db=float(papr[0]),
        objective_inf=float(inf_val[0]),
        converged=bool(conv[0]),
        iterations_run=iters,
    )


def solve_qcqp_batch(d_rows: np.ndarray, plan: TonePlan, cfg: QcqpConfig) -> QcqpBatchResult:
    """Vectorized solve over stacked data rows; bit-identical to per-row solves."""
    d_rows = np.asarray(d_rows, dtype=np.complex128)
    if d_rows.ndim != 2 or d_rows.shape[1] != plan.n_data:
        raise ValueError(f"expected data rows of shape (B, {plan.n_data})")
    r, papr, inf_val, conv, iters = _solve_rows(d_rows, plan, cfg)
    return QcqpBatchResult(r, papr, inf_val, conv, iters)


# ---------------------------------------------------------------------------
# optimality audit

def minimax_subgradient(d, plan: TonePlan, p_max: float, n_starts: int = 6,
                        iterations: int = 3000, seed=0, oversampling: int = 1):
    """Multi-start projected subgradient on the exact peak ||d + F_R^H r||_inf.

    Polyak-type steps with an adaptive target: the target sits delta below the
    best peak seen, and delta halves every 500 iterations.  Returns
    (best_peak, best_r).
    """
    d_vec = np.asarray(as_samples(d), dtype=np.complex128)
    d_time = data_time_rows(d_vec[None, :], plan, oversampling)
    radius = np.sqrt(p_max)
    rng = np.random.default_rng(seed)
    subgrad_norm2 = plan.n_reserved / (plan.n * oversampling)
    best = np.inf
    best_r = np.zeros(plan.n_reserved, dtype=np.complex128)

    for start in range(n_starts):
        if start == 0:
            r = np.zeros((1, plan.n_reserved), dtype=np.complex128)
        else:
            r = rng.standard_normal((1, plan.n_reserved)) + 1j * rng.standard_normal((1, plan.n_reserved))
            r *= radius * rng.random() / np.linalg.norm(r)
        f_rec = np.inf
        delta = None
        for t in range(iterations):
            x = d_time + rt_time_rows(r, plan, oversampling)
            mags = np.abs(x[0])
            n_star = int(np.argmax(mags))
            f = float(mags[n_star])
            if f < f_rec:
                f_rec = f
                if f < best:
                    best = f
                    best_r = r[0].copy()
            if f == 0.0:
                break
            if delta is None:
                delta = 0.1 * f
            spike = np.zeros((1, x.shape[-1]), dtype=np.complex128)
            spike[0, n_star] = x[0, n_star] / mags[n_star]
            g = gather_reserved_rows(spike, plan, oversampling)
            alpha = (f - (f_rec - delta)) / subgrad_norm2
            r = _project_ball(r - alpha * g, radius)
            if (t + 1) % 500 == 0:
                delta = max(delta * 0.5, 1e-8 * f_rec)
    return float(best), best_r


def certify(r_candidate, d, plan: TonePlan, cfg: QcqpConfig, n_starts: int = 6,
            iterations: int = 3000, seed=0) -> Certificate:
    """Report the candidate's peak against the independent subgradient oracle."""
    d_vec = np.asarray(as_samples(d), dtype=np.complex128)
    d_time = data_time_rows(d_vec[None, :], plan, cfg.oversampling)
    r_vec = np.asarray(as_samples(r_candidate), dtype=np.complex128)
    cand = float(_peak_rows(r_vec[None, :], d_time, plan, cfg.oversampling)[0])
    oracle, _ = minimax_subgradient(d_vec, plan, cfg.p_max, n_starts=n_starts,
                                    iterations=iterations, seed=seed,
                                    oversampling=cfg.oversampling)
    if oracle == 0.0:
        gap = 0.0 if cand == 0.0 else np.inf
    else:
        gap = (cand - oracle) / oracle
    return Certificate(cand, oracle, float(gap), n_starts, iterations)
