"""Experiment configuration: JSON file plus command-line overrides."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any, Optional

SETTINGS = ("s1_1", "s1_2", "s2_1", "s2_2", "custom")

# defaults per setting; anything given in the file or on the command line wins
_PRESETS: dict[str, dict[str, Any]] = {
    "s1_1": dict(d1=50, d2=50, n=200, K=2, ranks=[2, 2], lam=[1.9, 2.1, 2.3, 2.5], T=10,
                 roster=["lr_lloyd+warm"], warm_error=0.45, trials=30),
    "s1_2": dict(d1=50, d2=50, n=200, K=3, pbar=[0.05, 0.08, 0.10, 0.15], T=10,
                 roster=["lr_lloyd+warm"], warm_error=0.3, trials=30),
    "s2_1": dict(d1=50, d2=50, n=200, K=2, ranks=[3, 3], ru=3, rv=3, lam=10.0, delta_param=[1.0, 5.0, 10.0],
                 roster=["vec_lloyd+spectral_m3", "lr_lloyd+ts_init", "vec_lloyd+kmeans_m3", "lr_lloyd+kmeans_m3"]),
    "s2_2": dict(d1=100, d2=100, n=200, K=2, ranks=[3, 3], lam=[2.7, 3.0, 3.3],
                 roster=["vec_lloyd+spectral_m3", "rlr_lloyd+rts_init", "vec_lloyd+kmeans_m3", "rlr_lloyd+kmeans_m3"]),
    "custom": dict(),
}


@dataclass
class ExperimentConfig:
    setting: str = "s2_1"
    d1: int = 50
    d2: int = 50
    n: int = 200
    K: int = 2
    ranks: Optional[list] = None
    ru: Optional[int] = None
    rv: Optional[int] = None
    lam: Any = 10.0  # scalar or list to sweep
    delta_param: Any = None  # s2_1 only; scalar or list
    pbar: Any = 0.15  # s1_2 only; scalar or list
    sigmas: Optional[list] = None  # custom: per-cluster singular values
    node_blocks: str = "independent"
    noise_sd: float = 1.0
    trials: int = 100
    master_seed: int = 0
    roster: list = field(default_factory=lambda: ["lr_lloyd+ts_init"])
    T: int = 20
    warm_error: float = 0.3
    restarts: int = 20
    out: Optional[str] = None
    out_json: Optional[str] = None

    def validate(self) -> "ExperimentConfig":
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting {self.setting!r}; choose from {SETTINGS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.roster:
            raise ValueError("roster must name at least one method")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.setting == "custom" and self.sigmas is None:
            raise ValueError("the custom setting needs per-cluster sigmas")
        if self.setting == "s2_1" and self.delta_param is None:
            raise ValueError("the s2_1 setting needs delta_param")
        if self.ranks is not None and len(self.ranks) != self.K:
            raise ValueError(f"need {self.K} ranks, got {len(self.ranks)}")
        return self

    def cluster_ranks(self) -> list[int]:
        if self.ranks is not None:
            return [int(r) for r in self.ranks]
        if self.sigmas is not None:
            return [len(s) for s in self.sigmas]
        return [self.K] * self.K if self.setting == "s1_2" else [1] * self.K

    def tucker_ranks(self) -> tuple[int, int]:
        """``(r_u, r_v)`` for tensor spectral initialization; defaults to the
        summed cluster ranks, capped by the dimensions."""
        total = sum(self.cluster_ranks())
        ru = self.ru if self.ru is not None else min(total, self.d1)
        rv = self.rv if self.rv is not None else min(total, self.d2)
        return int(ru), int(rv)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _fields() -> set[str]:
    return {f.name for f in dataclasses.fields(ExperimentConfig)}


def build_config(file_values: Optional[dict] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Preset for the setting, then file values, then non-``None`` overrides."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = (set(file_values) | set(overrides)) - _fields()
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    setting = overrides.get("setting", file_values.get("setting", "s2_1"))
    if setting not in SETTINGS:
        raise ValueError(f"unknown setting {setting!r}; choose from {SETTINGS}")
    merged: dict[str, Any] = {"setting": setting}
    merged.update(_PRESETS[setting])
    merged.update(file_values)
    merged.update(overrides)
    return ExperimentConfig(**merged).validate()


def load_config(path: Optional[str], overrides: Optional[dict] = None) -> ExperimentConfig:
    values = {}
    if path:
        with open(path) as f:
            values = json.load(f)
        if not isinstance(values, dict):
            raise ValueError(f"{path}: config must be a JSON object")
    return build_config(values, overrides)
