"""Run configuration: the key=value file format and defaults.

A config file is plain text, one ``key = value`` pair per line; ``#``
starts a comment and blank lines are ignored.  Keys match RunConfig
field names exactly; unknown keys are an error so typos fail fast.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .targetgen import MODELS


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; (config, seed) fixes the output stream."""

    s: int = 5            # initial random targets
    n: int = 20           # alphabet size
    k: int = 50           # target length
    b: int = 5            # targets added (and, past T_s, removed) per step
    T_s: int = 30         # steady-state target count
    iterations: int = 500
    runs: int = 3
    model: str = "MRS"
    beta: float = 1.0
    tau: float = 0.85
    eval_every: int = 100
    rng_seed: int = 0
    window: int = 10      # core-stability lag
    stall_limit: int = 10_000
    cost_mode: str = "parse"          # or "commit"
    selection_denominator: str = "weighted"  # or "printed"
    validate_every_step: bool = False
    dot_iterations: tuple[int, ...] = ()
    snapshot_iterations: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ConfigError("alphabet size n must be >= 2")
        if self.k < 2:
            raise ConfigError("target length k must be >= 2")
        if self.s < 1 or self.b < 1:
            raise ConfigError("s and b must be positive")
        if self.T_s < self.s:
            raise ConfigError("steady-state size T_s must be >= s")
        if self.iterations < 1 or self.runs < 1:
            raise ConfigError("iterations and runs must be positive")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0")
        if not 0 < self.tau <= 1:
            raise ConfigError("tau must be in (0, 1]")
        if self.eval_every < 1:
            raise ConfigError("eval_every must be positive")
        if self.cost_mode not in ("parse", "commit"):
            raise ConfigError(f"unknown cost_mode {self.cost_mode!r}")
        if self.selection_denominator not in ("weighted", "printed"):
            raise ConfigError(
                f"unknown selection_denominator {self.selection_denominator!r}"
            )


_BOOL = {"true": True, "false": False, "1": True, "0": False,
         "yes": True, "no": False}


def _parse_value(name: str, kind: type, raw: str):
    raw = raw.strip()
    try:
        if kind is bool:
            return _BOOL[raw.lower()]
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        # iteration lists: comma-separated ints, empty allowed
        if not raw:
            return ()
        return tuple(int(p) for p in raw.split(","))
    except (ValueError, KeyError):
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def parse_config(text: str, **overrides) -> RunConfig:
    by_name = {f.name: f for f in fields(RunConfig)}
    kinds = {"s": int, "n": int, "k": int, "b": int, "T_s": int,
             "iterations": int, "runs": int, "model": str, "beta": float,
             "tau": float, "eval_every": int, "rng_seed": int,
             "window": int, "stall_limit": int, "cost_mode": str,
             "selection_denominator": str, "validate_every_step": bool,
             "dot_iterations": tuple, "snapshot_iterations": tuple}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in by_name:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, kinds[key], raw)
    for key, val in overrides.items():
        if key not in by_name:
            raise ConfigError(f"unknown override {key!r}")
        values[key] = val
    return RunConfig(**values)


def load_config(path: str | Path, **overrides) -> RunConfig:
    return parse_config(Path(path).read_text(), **overrides)


def config_to_text(cfg: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
