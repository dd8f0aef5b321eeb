"""Flat ``key = value`` run configuration.

Lines starting with ``#`` and blank lines are ignored. Lists are comma
separated. Unknown keys are rejected so typos do not silently fall back to
defaults. Documented keys:

  command        solve-poisson | solve-nonlinear | diagnose | gen-example | cross-check
  q, k, n        sheets, symmetry order, dimension
  rho            periods of the y-directions (comma list, n-2 entries)
  n_rhat, n_theta_hat, n_y     grid sizes (n_y is a comma list)
  boundary       zero | harmonic | manufactured | random | file
  boundary_m     angular mode of the harmonic boundary data (default k)
  boundary_z     y-wavenumbers for the boundary modulation (comma list)
  y_mod          modulation depth 1 + y_mod cos(2 pi z.y/rho) (test data)
  boundary_file, g_file, flux_file, field_file    field files (read_field format)
  nonlinearity   mse | mss:<m> | zero | registered name
  eps            scale of the boundary data
  tol, residual_tol, max_iters, relaxation       Picard controls
  y0, radii, p_max, R                            diagnostics parameters
  crosscheck_tol allowed relative L-infinity gap for cross-check
  y_scheme       fd | spectral (reference solver in cross-check)
  threads        worker threads (overridden by --threads / BRANCHSOLVE_THREADS)
  seed           seed for every random choice in the run
  out            output directory (overridden by --out)
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from math import gcd

from ..errors import BranchSolveError
from ..mv_core.field import Grid

COMMANDS = ("solve-poisson", "solve-nonlinear", "diagnose", "gen-example", "cross-check")
BOUNDARIES = ("zero", "harmonic", "manufactured", "random", "file")


class ConfigError(BranchSolveError, ValueError):
    """Config values violate a structural requirement."""


class ConfigSyntaxError(BranchSolveError, OSError):
    """Config file missing or not parseable."""


def _floats(s):
    return tuple(float(v) for v in s.split(",") if v.strip())


def _ints(s):
    return tuple(int(v) for v in s.split(",") if v.strip())


@dataclass(frozen=True)
class RunConfig:
    command: str = "solve-poisson"
    q: int = 2
    k: int = 3
    n: int = 3
    rho: tuple = (1.0,)
    n_rhat: int = 65
    n_theta_hat: int = 48
    n_y: tuple = (16,)
    boundary: str = "harmonic"
    boundary_m: int | None = None
    boundary_z: tuple | None = None
    y_mod: float = 0.0
    boundary_file: str | None = None
    g_file: str | None = None
    flux_file: str | None = None
    field_file: str | None = None
    nonlinearity: str = "mse"
    eps: float = 1.0
    tol: float = 1e-10
    residual_tol: float = 1e-8
    max_iters: int = 30
    relaxation: float = 1.0
    y0: tuple | None = None
    radii: tuple = (0.1, 0.2, 0.4)
    p_max: int = 6
    R: float = 0.25
    crosscheck_tol: float = 0.02
    y_scheme: str = "fd"
    threads: int = 1
    seed: int = 0
    out: str = "."
    base_dir: str = field(default=".", compare=False)

    def grid(self) -> Grid:
        return Grid(q=self.q, k=self.k, n=self.n, n_rhat=self.n_rhat, n_theta_hat=self.n_theta_hat,
                    n_y=self.n_y, periods=self.rho)

    def path(self, p: str | None) -> str | None:
        """Resolve a path relative to the config file's directory."""
        if p is None or os.path.isabs(p):
            return p
        return os.path.join(self.base_dir, p)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.q < 1 or self.k <= self.q or gcd(self.k, self.q) != 1:
            raise ConfigError(f"need gcd(k, q) = 1 and k > q, got q={self.q}, k={self.k}")
        if self.n_theta_hat % (self.k * self.q):
            raise ConfigError(f"n_theta_hat={self.n_theta_hat} must be a multiple of k*q={self.k * self.q}")
        if len(self.n_y) != self.n - 2 or len(self.rho) != self.n - 2:
            raise ConfigError("n_y and rho need n-2 entries")
        for name in ("tol", "residual_tol", "crosscheck_tol", "R"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_iters < 1 or self.threads < 1:
            raise ConfigError("max_iters and threads must be >= 1")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"unknown boundary {self.boundary!r}")
        if self.boundary == "file" and not self.boundary_file:
            raise ConfigError("boundary = file needs boundary_file")
        if self.y_scheme not in ("fd", "spectral"):
            raise ConfigError("y_scheme must be fd or spectral")
        return self




def _convert(name, raw):
    f = {f.name: f for f in fields(RunConfig)}[name]
    t = f.type
    if name in ("rho", "radii", "y0"):
        return _floats(raw)
    if name in ("n_y", "boundary_z"):
        return _ints(raw)
    if "int" in t:
        return int(raw)
    if "float" in t:
        return float(raw)
    return raw


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    known = {f.name for f in fields(RunConfig)} - {"base_dir"}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        key, sep, val = s.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise ConfigSyntaxError(f"line {lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigSyntaxError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            raise ConfigSyntaxError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return RunConfig(base_dir=base_dir, **values)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigSyntaxError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, os.path.dirname(os.path.abspath(path)))


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
