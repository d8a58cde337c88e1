"""Experiment configuration: nested dataclasses with YAML round-tripping."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .core import Constellation
from .pgd import SolverConfig
from .qcqp import QcqpConfig
from .tones import TonePlan


@dataclass(frozen=True)
class ConstellationSpec:
    kind: str = "psk"
    order: int = 16

    def build(self) -> Constellation:
        return Constellation.make(self.kind, self.order)


@dataclass(frozen=True)
class TonePlanSpec:
    """Reserved-tone placement: a seeded random subset, an equispaced comb, or a file."""

    kind: str = "random"      # random | equispaced | file
    seed: int = 99
    path: str | None = None

    def build(self, n: int, n_reserved: int) -> TonePlan:
        if self.kind == "random":
            return TonePlan.random(n, n_reserved, self.seed)
        if self.kind == "equispaced":
            return TonePlan.equispaced(n, n_reserved)
        if self.kind == "file":
            if not self.path:
                raise ValueError("tone plan kind 'file' needs a path")
            return TonePlan.from_file(self.path, n)
        raise ValueError(f"unknown tone plan kind {self.kind!r}")


@dataclass(frozen=True)
class SolverSettings:
    p: float = 50.0                                  # headline exponent (ccdf, sensing)
    p_values: tuple = (10.0, 50.0, 100.0, 150.0)     # sweep (table2, convergence)
    alpha: float = 1.0
    iterations: int = 2000

    def build(self, p: float, oversampling: int, **kwargs) -> SolverConfig:
        return SolverConfig(p=p, alpha=self.alpha, iterations=self.iterations,
                            oversampling=oversampling, **kwargs)


@dataclass(frozen=True)
class BaselineSettings:
    p_max: float | None = None                       # None -> n_reserved
    tol: float = 1e-4
    max_iters: int = 600
    schedule: tuple = (8.0, 32.0, 128.0, 512.0)
    safety: float = 1.5

    def build(self, n_reserved: int, oversampling: int) -> QcqpConfig:
        p_max = float(n_reserved) if self.p_max is None else self.p_max
        return QcqpConfig(p_max=p_max, tol=self.tol, max_iters=self.max_iters,
                          schedule=tuple(self.schedule), safety=self.safety,
                          oversampling=oversampling)


@dataclass(frozen=True)
class CcdfSettings:
    num_symbols: int = 2000
    thresholds_db: tuple = tuple(round(4.0 + 0.25 * i, 2) for i in range(33))

    def __post_init__(self):
        t = list(self.thresholds_db)
        if t != sorted(set(t)):
            raise ValueError("CCDF threshold grid must be strictly increasing")


@dataclass(frozen=True)
class SensingSettings:
    carrier_freq_hz: float = 26e9
    subcarrier_spacing_hz: float = 450e3
    snr_grid_db: tuple = (-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 100                                # RMSE trials per SNR; also A-ACF draws
    target_delays: tuple = (7,)


@dataclass(frozen=True)
class ExperimentConfig:
    n_subcarriers: int = 512
    n_reserved: int = 64
    constellation: ConstellationSpec = field(default_factory=ConstellationSpec)
    tone_plan: TonePlanSpec = field(default_factory=TonePlanSpec)
    solver: SolverSettings = field(default_factory=SolverSettings)
    baseline: BaselineSettings = field(default_factory=BaselineSettings)
    ccdf: CcdfSettings = field(default_factory=CcdfSettings)
    sensing: SensingSettings = field(default_factory=SensingSettings)
    num_symbols: int = 100                           # table2 / trend means
    oversampling: int = 4                            # PAPR evaluation grid factor
    master_seed: int = 12345
    out_dir: str = "out"

    def build_plan(self) -> TonePlan:
        return self.tone_plan.build(self.n_subcarriers, self.n_reserved)

    def build_constellation(self) -> Constellation:
        return self.constellation.build()

    def build_qcqp(self) -> QcqpConfig:
        return self.baseline.build(self.n_reserved, self.oversampling)


_SECTIONS = {
    "constellation": ConstellationSpec,
    "tone_plan": TonePlanSpec,
    "solver": SolverSettings,
    "baseline": BaselineSettings,
    "ccdf": CcdfSettings,
    "sensing": SensingSettings,
}


def _from_mapping(cls, data: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if f.name in _SECTIONS and isinstance(value, dict):
            value = _from_mapping(_SECTIONS[f.name], value)
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[f.name] = value
    return cls(**kwargs)


def config_from_dict(data: dict) -> ExperimentConfig:
    return _from_mapping(ExperimentConfig, data or {})


def config_to_dict(cfg: ExperimentConfig) -> dict:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, tuple):
            return [clean(v) for v in obj]
        return obj
    return clean(asdict(cfg))


def load_config(path) -> ExperimentConfig:
    data = yaml.safe_load(Path(path).read_text())
    return config_from_dict(data)


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
