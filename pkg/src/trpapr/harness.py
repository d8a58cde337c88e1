"""Seeded Monte Carlo experiment drivers and CSV/JSON emission.

Every random draw comes from a stream keyed by (master_seed, stream id,
item index), so results do not depend on chunking or worker count; symbols
are processed in fixed-size chunks and reduced in index order.  Wall-clock
measurements run serially.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import pgd, qcqp, sensing
from .config import ExperimentConfig
from .core import Constellation, papr_db_rows, pad_spectrum, unitary_idft
from .tones import TonePlan, embed_rows

CHUNK = 128  # fixed symbol batch; independent of --threads

# stream ids for seed derivation
_DATA, _FULL, _INIT, _CONV, _AACF, _RMSE = range(6)

WAVEFORM_FAMILIES = ("proposed", "qcqp", "psk", "qam")


def _rng(cfg: ExperimentConfig, stream: int, *index: int) -> np.random.Generator:
    return np.random.default_rng([cfg.master_seed, stream, *index])


def _map_ordered(func, items, threads: int):
    if threads <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(func, items))


def _chunk_ranges(total: int):
    return [(lo, min(lo + CHUNK, total)) for lo in range(0, total, CHUNK)]


def _symbol_rows(cfg: ExperimentConfig, const: Constellation, length: int,
                 stream: int, lo: int, hi: int) -> np.ndarray:
    rows = np.empty((hi - lo, length), dtype=np.complex128)
    for i in range(lo, hi):
        idx = _rng(cfg, stream, i).integers(0, const.order, size=length)
        rows[i - lo] = const.points[idx]
    return rows


def _init_rows(cfg: ExperimentConfig, n_reserved: int, lo: int, hi: int) -> np.ndarray:
    rows = np.empty((hi - lo, n_reserved), dtype=np.complex128)
    for i in range(lo, hi):
        rows[i - lo] = np.exp(2j * np.pi * _rng(cfg, _INIT, i).random(n_reserved))
    return rows


def _papr_of_spectra(spec_rows: np.ndarray, oversampling: int) -> np.ndarray:
    return papr_db_rows(unitary_idft(pad_spectrum(spec_rows, oversampling)))


# ---------------------------------------------------------------------------
# table 2: mean PAPR and per-symbol runtimes

@dataclass
class MethodRow:
    method: str
    mean_papr_db: float
    wall_time_s: float       # median per-symbol solve time
    error: str | None = None


def run_table2(cfg: ExperimentConfig) -> list[MethodRow]:
    """No-reduction, QCQP baseline, and the proposed solver at each p."""
    plan = cfg.build_plan()
    const = cfg.build_constellation()
    n_sym = cfg.num_symbols
    rows: list[MethodRow] = []

    full = _symbol_rows(cfg, const, cfg.n_subcarriers, _FULL, 0, n_sym)
    t_plain = []
    paprs = np.empty(n_sym)
    for i in range(n_sym):
        t0 = time.perf_counter()
        paprs[i] = _papr_of_spectra(full[i:i + 1], cfg.oversampling)[0]
        t_plain.append(time.perf_counter() - t0)
    rows.append(MethodRow("no_reduction", float(paprs.mean()), float(np.median(t_plain))))

    data = _symbol_rows(cfg, const, plan.n_data, _DATA, 0, n_sym)
    init = _init_rows(cfg, plan.n_reserved, 0, n_sym)

    qcfg = cfg.build_qcqp()
    try:
        times = []
        paprs = np.empty(n_sym)
        for i in range(n_sym):
            t0 = time.perf_counter()
            res = qcqp.solve_qcqp(data[i], plan, qcfg)
            times.append(time.perf_counter() - t0)
            paprs[i] = res.papr_db
        rows.append(MethodRow("qcqp", float(paprs.mean()), float(np.median(times))))
    except Exception as exc:  # keep going; the row records the failure
        rows.append(MethodRow("qcqp", float("nan"), float("nan"), error=str(exc)))

    for p in cfg.solver.p_values:
        scfg = cfg.solver.build(p, cfg.oversampling)
        try:
            times = []
            paprs = np.empty(n_sym)
            for i in range(n_sym):
                t0 = time.perf_counter()
                res = pgd.solve_batch(data[i:i + 1], plan, scfg, r0_rows=init[i:i + 1])
                times.append(time.perf_counter() - t0)
                paprs[i] = res.papr_db[0]
            rows.append(MethodRow(f"pgd_p{p:g}", float(paprs.mean()), float(np.median(times))))
        except Exception as exc:
            rows.append(MethodRow(f"pgd_p{p:g}", float("nan"), float("nan"), error=str(exc)))
    return rows


# ---------------------------------------------------------------------------
# CCDF

@dataclass
class CcdfCurves:
    thresholds_db: np.ndarray
    prob_no_red: np.ndarray
    prob_proposed: np.ndarray
    prob_qcqp: np.ndarray
    num_symbols: int


def run_ccdf(cfg: ExperimentConfig, threads: int = 1) -> CcdfCurves:
    """Empirical P(PAPR > threshold) per method over ccdf.num_symbols draws."""
    plan = cfg.build_plan()
    const = cfg.build_constellation()
    n_sym = cfg.ccdf.num_symbols
    scfg = cfg.solver.build(cfg.solver.p, cfg.oversampling)
    qcfg = cfg.build_qcqp()

    def work(span):
        lo, hi = span
        full = _symbol_rows(cfg, const, cfg.n_subcarriers, _FULL, lo, hi)
        data = _symbol_rows(cfg, const, plan.n_data, _DATA, lo, hi)
        init = _init_rows(cfg, plan.n_reserved, lo, hi)
        p_plain = _papr_of_spectra(full, cfg.oversampling)
        prop = pgd.solve_batch(data, plan, scfg, r0_rows=init)
        spec = embed_rows(data, prop.r_opt, plan)
        p_prop = _papr_of_spectra(spec, cfg.oversampling)
        base = qcqp.solve_qcqp_batch(data, plan, qcfg)
        spec = embed_rows(data, base.r_opt, plan)
        p_qcqp = _papr_of_spectra(spec, cfg.oversampling)
        return p_plain, p_prop, p_qcqp

    parts = _map_ordered(work, _chunk_ranges(n_sym), threads)
    p_plain = np.concatenate([p[0] for p in parts])
    p_prop = np.concatenate([p[1] for p in parts])
    p_qcqp = np.concatenate([p[2] for p in parts])

    grid = np.asarray(cfg.ccdf.thresholds_db, dtype=float)
    return CcdfCurves(
        thresholds_db=grid,
        prob_no_red=(p_plain[None, :] > grid[:, None]).mean(axis=1),
        prob_proposed=(p_prop[None, :] > grid[:, None]).mean(axis=1),
        prob_qcqp=(p_qcqp[None, :] > grid[:, None]).mean(axis=1),
        num_symbols=n_sym,
    )


# ---------------------------------------------------------------------------
# convergence traces

@dataclass
class ConvergenceTrace:
    p: float
    trace: list               # TracePoint list
    suggested_alpha: float
    alpha: float


def run_convergence(cfg: ExperimentConfig) -> list[ConvergenceTrace]:
    """One fully traced solve per p on a shared seeded symbol and init."""
    plan = cfg.build_plan()
    const = cfg.build_constellation()
    idx = _rng(cfg, _CONV, 0).integers(0, const.order, size=plan.n_data)
    d = const.points[idx]
    r0 = np.exp(2j * np.pi * _rng(cfg, _CONV, 1).random(plan.n_reserved))
    out = []
    for p in cfg.solver.p_values:
        scfg = cfg.solver.build(p, cfg.oversampling, init=r0, record_trace=True)
        res = pgd.solve(d, plan, scfg)
        out.append(ConvergenceTrace(
            p=p, trace=res.trace,
            suggested_alpha=pgd.lipschitz_step_bound(res.grad_norms),
            alpha=cfg.solver.alpha,
        ))
    return out


# ---------------------------------------------------------------------------
# sensing: waveform families, A-ACF, ranging RMSE

def _waveform_spectrum(cfg: ExperimentConfig, plan: TonePlan, const: Constellation,
                       family: str, rng: np.random.Generator) -> np.ndarray:
    """Full N-tone spectrum for one draw of the given waveform family."""
    if family in ("psk", "qam"):
        alph = const if const.kind == family else Constellation.make(family, const.order)
        idx = rng.integers(0, alph.order, size=cfg.n_subcarriers)
        return alph.points[idx]
    idx = rng.integers(0, const.order, size=plan.n_data)
    d = const.points[idx]
    if family == "proposed":
        r0 = np.exp(2j * np.pi * rng.random(plan.n_reserved))
        scfg = cfg.solver.build(cfg.solver.p, cfg.oversampling)
        res = pgd.solve_batch(d[None, :], plan, scfg, r0_rows=r0[None, :])
        return embed_rows(d[None, :], res.r_opt, plan)[0]
    if family == "qcqp":
        res = qcqp.solve_qcqp(d, plan, cfg.build_qcqp())
        return embed_rows(d, res.r_opt, plan)
    raise ValueError(f"unknown waveform family {family!r}")


def _waveform_time(cfg, plan, const, family, rng) -> np.ndarray:
    return unitary_idft(_waveform_spectrum(cfg, plan, const, family, rng))


@dataclass
class AacfSummary:
    family: str
    lags: np.ndarray
    abs_db: np.ndarray        # 20*log10(mean |r_k| / mean r_0)
    psl_db: float             # mean per-draw PSL
    draws: int


def run_aacf(cfg: ExperimentConfig, threads: int = 1) -> list[AacfSummary]:
    """Average aperiodic ACF magnitude and PSL per waveform family."""
    plan = cfg.build_plan()
    const = cfg.build_constellation()
    draws = cfg.sensing.trials
    n = cfg.n_subcarriers

    def work(i):
        out = {}
        for family in WAVEFORM_FAMILIES:
            x = _waveform_time(cfg, plan, const, family, _rng(cfg, _AACF, i))
            res = sensing.aacf(x)
            out[family] = (np.abs(res.values), res.psl_db)
        return out

    per_draw = _map_ordered(work, range(draws), threads)
    summaries = []
    for family in WAVEFORM_FAMILIES:
        mags = np.stack([d[family][0] for d in per_draw])
        psls = np.array([d[family][1] for d in per_draw])
        mean_mag = mags.mean(axis=0)
        summaries.append(AacfSummary(
            family=family,
            lags=np.arange(n),
            abs_db=20.0 * np.log10(mean_mag / mean_mag[0]),
            psl_db=float(psls.mean()),
            draws=draws,
        ))
    return summaries


@dataclass
class RmseCurve:
    family: str
    snr_db: np.ndarray
    rmse_m: np.ndarray
    trials: int


def run_ranging(cfg: ExperimentConfig, threads: int = 1) -> list[RmseCurve]:
    """Matched-filter ranging RMSE vs SNR for each waveform family."""
    plan = cfg.build_plan()
    const = cfg.build_constellation()
    scene = sensing.RadarScene(
        target_delays=tuple(cfg.sensing.target_delays),
        snr_db=0.0,
        carrier_freq_hz=cfg.sensing.carrier_freq_hz,
        subcarrier_spacing_hz=cfg.sensing.subcarrier_spacing_hz,
    )

    def work(family):
        factory = lambda rng: _waveform_time(cfg, plan, const, family, rng)
        curve = sensing.ranging_rmse(factory, scene, cfg.sensing.snr_grid_db,
                                     cfg.sensing.trials, [cfg.master_seed, _RMSE])
        return RmseCurve(
            family=family,
            snr_db=np.array([c[0] for c in curve]),
            rmse_m=np.array([c[1] for c in curve]),
            trials=cfg.sensing.trials,
        )

    return _map_ordered(work, WAVEFORM_FAMILIES, threads)


# ---------------------------------------------------------------------------
# CSV / JSON emission

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{value:.10g}"
    return str(value)


def write_csv(path, header: list[str], rows, comments: list[str] | None = None) -> None:
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(",".join(header))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json_mirror(csv_path, header: list[str], rows) -> None:
    records = [dict(zip(header, [v if isinstance(v, str) else float(v) for v in row]))
               for row in rows]
    Path(csv_path).with_suffix(".json").write_text(json.dumps(records, indent=1) + "\n")


def emit_table2(rows: list[MethodRow], out_dir: Path, as_json: bool) -> list[Path]:
    header = ["method", "mean_papr_db", "wall_time_s"]
    body = [(r.method, r.mean_papr_db, r.wall_time_s) for r in rows]
    path = out_dir / "table2.csv"
    write_csv(path, header, body)
    if as_json:
        write_json_mirror(path, header, body)
    for r in rows:
        if r.error:
            print(f"error: {r.method}: {r.error}", file=sys.stderr)
    return [path]


def emit_ccdf(curves: CcdfCurves, out_dir: Path, as_json: bool) -> list[Path]:
    header = ["threshold_db", "prob_no_red", "prob_proposed", "prob_qcqp"]
    body = list(zip(curves.thresholds_db, curves.prob_no_red,
                    curves.prob_proposed, curves.prob_qcqp))
    path = out_dir / "ccdf.csv"
    write_csv(path, header, body, comments=[f"num_symbols={curves.num_symbols}"])
    if as_json:
        write_json_mirror(path, header, body)
    return [path]


def emit_convergence(traces: list[ConvergenceTrace], out_dir: Path, as_json: bool) -> list[Path]:
    header = ["iter", "objective", "papr_db"]
    paths = []
    for tr in traces:
        body = [(pt.iteration, pt.objective, pt.papr_db) for pt in tr.trace]
        path = out_dir / f"convergence_p{tr.p:g}.csv"
        write_csv(path, header, body,
                  comments=[f"p={tr.p:g} alpha={_fmt(tr.alpha)} suggested_alpha={_fmt(tr.suggested_alpha)}"])
        if as_json:
            write_json_mirror(path, header, body)
        paths.append(path)
    return paths


def emit_ranging(curves: list[RmseCurve], out_dir: Path, as_json: bool) -> list[Path]:
    header = ["snr_db", "rmse_m", "trials"]
    paths = []
    for cv in curves:
        body = [(s, r, cv.trials) for s, r in zip(cv.snr_db, cv.rmse_m)]
        path = out_dir / f"rmse_{cv.family}.csv"
        write_csv(path, header, body)
        if as_json:
            write_json_mirror(path, header, body)
        paths.append(path)
    return paths


def emit_aacf(summaries: list[AacfSummary], out_dir: Path, as_json: bool) -> list[Path]:
    header = ["lag", "abs_db"]
    paths = []
    for sm in summaries:
        body = list(zip(sm.lags.tolist(), sm.abs_db))
        path = out_dir / f"aacf_{sm.family}.csv"
        write_csv(path, header, body, comments=[f"draws={sm.draws}"])
        if as_json:
            write_json_mirror(path, header, body)
        paths.append(path)
    psl_header = ["waveform", "psl_db", "draws"]
    psl_body = [(sm.family, sm.psl_db, sm.draws) for sm in summaries]
    psl_path = out_dir / "psl_summary.csv"
    write_csv(psl_path, psl_header, psl_body)
    if as_json:
        write_json_mirror(psl_path, psl_header, psl_body)
    paths.append(psl_path)
    return paths
