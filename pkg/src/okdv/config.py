"""Run configuration: JSON schema, validation, and initial conditions.

A run config is a JSON object:

    {
      "flow": {"kind": "kdv", "epsilon": 0.0, "v": [0,...,0],
               "dt": 1e-3, "t_end": 1.0, "stepper": "ifrk4"},
      "grid": {"n": 256, "length": 40.0},
      "initial_condition": {"type": "soliton", "c": 1.0, "x0": 10.0},
      "outputs": {"directory": "out", "snapshot_every": 100,
                  "n_charges": 6, "figures": true}
    }

Initial condition types: soliton(c, x0), gaussian(amplitude[8], width, x0),
random_smooth(seed, mode_cutoff, amplitude). The seed is mandatory for
random_smooth so identical configs reproduce identical outputs bit for bit.
Validation errors always name the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import CDElement
from .fields import AlgebraField, Grid, random_smooth_field, soliton_profile
from .flows import FlowSpec

__all__ = ["ConfigError", "RunConfig", "load_config"]

META_SCHEMA = "okdv.meta/1"


class ConfigError(ValueError):
    """Malformed configuration; the message names the field."""

    def __init__(self, fieldname: str, message: str):
        self.fieldname = fieldname
        super().__init__(f"config field {fieldname!r}: {message}")


def _require(obj: dict, name: str, context: str):
    if name not in obj:
        raise ConfigError(f"{context}.{name}", "missing")
    return obj[name]


def _number(obj: dict, name: str, context: str, default=None):
    if name not in obj:
        if default is None:
            raise ConfigError(f"{context}.{name}", "missing")
        return default
    val = obj[name]
    if not isinstance(val, (int, float)) or isinstance(val, bool) or not np.isfinite(val):
        raise ConfigError(f"{context}.{name}", "must be a finite number")
    return val


@dataclass
class RunConfig:
    flow_kind: str
    epsilon: float
    v: list[float]
    dt: float
    t_end: float
    stepper: str
    n: int
    length: float
    initial_condition: dict
    out_dir: str = "out"
    snapshot_every: int | None = None
    n_charges: int = 6
    figures: bool = True
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "must be a JSON object")
        # a meta.json written by a previous run round-trips as a config
        if data.get("schema") == META_SCHEMA:
            data = _require(data, "config", "<root>")
        flow = _require(data, "flow", "<root>")
        grid = _require(data, "grid", "<root>")
        ic = _require(data, "initial_condition", "<root>")
        outputs = data.get("outputs", {})

        kind = _require(flow, "kind", "flow")
        if kind not in ("kdv", "gardner", "miura"):
            raise ConfigError("flow.kind", f"unknown flow {kind!r}")
        epsilon = float(_number(flow, "epsilon", "flow", default=0.0))
        v = flow.get("v", [0.0] * 8)
        if not isinstance(v, list) or len(v) != 8 or not all(
            isinstance(x, (int, float)) and np.isfinite(x) for x in v
        ):
            raise ConfigError("flow.v", "must be a list of 8 finite numbers")
        if kind != "kdv" and any(v):
            raise ConfigError("flow.v", "must be zero unless the flow is kdv")
        dt = float(_number(flow, "dt", "flow"))
        if dt <= 0:
            raise ConfigError("flow.dt", "must be positive")
        t_end = float(_number(flow, "t_end", "flow"))
        if t_end < 0:
            raise ConfigError("flow.t_end", "must be >= 0")
        stepper = flow.get("stepper", "ifrk4")
        if stepper not in ("ifrk4", "rk4"):
            raise ConfigError("flow.stepper", f"unknown stepper {stepper!r}")

        n = _require(grid, "n", "grid")
        if not isinstance(n, int) or n < 8 or n & (n - 1):
            raise ConfigError("grid.n", "must be a power of two >= 8")
        length = float(_number(grid, "length", "grid"))
        if length <= 0:
            raise ConfigError("grid.length", "must be positive")

        ic_type = _require(ic, "type", "initial_condition")
        if ic_type not in ("soliton", "gaussian", "random_smooth"):
            raise ConfigError("initial_condition.type", f"unknown type {ic_type!r}")
        if ic_type == "random_smooth" and "seed" not in ic:
            raise ConfigError("initial_condition.seed", "missing (mandatory for reproducibility)")
        if ic_type == "gaussian":
            amp = _require(ic, "amplitude", "initial_condition")
            if not isinstance(amp, list) or len(amp) != 8:
                raise ConfigError(
                    "initial_condition.amplitude", "must be a list of 8 numbers"
                )

        snapshot_every = outputs.get("snapshot_every")
        if snapshot_every is not None and (
            not isinstance(snapshot_every, int) or snapshot_every < 1
        ):
            raise ConfigError("outputs.snapshot_every", "must be a positive integer")
        n_charges = outputs.get("n_charges", 6)
        if not isinstance(n_charges, int) or n_charges < 1:
            raise ConfigError("outputs.n_charges", "must be a positive integer")

        return cls(
            flow_kind=kind,
            epsilon=epsilon,
            v=[float(x) for x in v],
            dt=dt,
            t_end=t_end,
            stepper=stepper,
            n=n,
            length=length,
            initial_condition=dict(ic),
            out_dir=str(outputs.get("directory", "out")),
            snapshot_every=snapshot_every,
            n_charges=n_charges,
            figures=bool(outputs.get("figures", True)),
            raw=data,
        )

    def grid(self) -> Grid:
        return Grid(self.n, self.length)

    def flow_spec(self) -> FlowSpec:
        v = CDElement(np.array(self.v)) if any(self.v) else None
        return FlowSpec(
            kind=self.flow_kind,
            grid=self.grid(),
            dt=self.dt,
            t_end=self.t_end,
            epsilon=self.epsilon,
            v=v,
            stepper=self.stepper,
        )

    def build_initial_condition(self) -> AlgebraField:
        grid = self.grid()
        ic = self.initial_condition
        kind = ic["type"]
        if kind == "soliton":
            return soliton_profile(grid, c=ic.get("c", 1.0), x0=ic.get("x0", 0.0))
        if kind == "gaussian":
            width = ic.get("width", 1.0)
            if width <= 0:
                raise ConfigError("initial_condition.width", "must be positive")
            x0 = ic.get("x0", 0.0)
            d = np.mod(grid.nodes - x0 + grid.length / 2, grid.length) - grid.length / 2
            bump = np.exp(-(d**2) / (2.0 * width**2))
            values = np.outer(bump, np.array(ic["amplitude"], dtype=float))
            return AlgebraField(grid, values)
        return random_smooth_field(
            grid,
            seed=int(ic["seed"]),
            mode_cutoff=int(ic.get("mode_cutoff", 6)),
            amplitude=float(ic.get("amplitude", 0.5)),
        )

    def config_dict(self) -> dict:
        """Canonical JSON-ready echo of this configuration."""
        return {
            "flow": {
                "kind": self.flow_kind,
                "epsilon": self.epsilon,
                "v": self.v,
                "dt": self.dt,
                "t_end": self.t_end,
                "stepper": self.stepper,
            },
            "grid": {"n": self.n, "length": self.length},
            "initial_condition": self.initial_condition,
            "outputs": {
                "directory": self.out_dir,
                "snapshot_every": self.snapshot_every,
                "n_charges": self.n_charges,
                "figures": self.figures,
            },
        }


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
    return RunConfig.from_dict(data)
