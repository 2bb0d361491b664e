"""JSON problem definitions for the command line.

Every tolerance and grid size the CLI uses lives in `SolverSettings`, so a
dumped config pins a run completely.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from .errors import ConfigError
from .ode_core import CATALOG_KINDS, ForcingTerm, OscillatorProblem, SaturatingNonlinearity, Tolerances
from .bvp import DirichletProblem

SCHEMA_VERSION = 1
MODES = ("periodic", "dirichlet")


@dataclass(frozen=True)
class SolverSettings:
    rel_tol: float = 1e-8  # return map, drift, invariant disc
    abs_tol: float = 1e-10
    newton_rel_tol: float = 1e-10  # fixed-point search and verification
    newton_abs_tol: float = 1e-12
    fixed_point_tol: float = 1e-9
    seed_radii: int = 5
    seed_angles: int = 8
    seed_radius: float | None = None  # null: c3 of the invariant disc
    phi_samples: int = 32
    drift_radius: float = 50.0
    drift_grid: tuple[int, int] = (32, 32)
    drift_iterations: int = 20
    modes: int = 16
    xi_lo: float = -20.0
    xi_hi: float = 20.0
    xi_step: float = 0.05

    def tolerances(self) -> Tolerances:
        return Tolerances(self.rel_tol, self.abs_tol, self.fixed_point_tol)

    def newton_tolerances(self) -> Tolerances:
        return Tolerances(self.newton_rel_tol, self.newton_abs_tol, self.fixed_point_tol)


@dataclass(frozen=True)
class ProblemConfig:
    mode: str
    nonlinearity: str = "sigmoid"
    # periodic mode
    n: int = 1
    forcing: ForcingTerm = ForcingTerm()
    # dirichlet mode: e(t) = amplitude sin t + sum shape[k] sin kt
    amplitude: float = 0.0
    shape: tuple[tuple[int, float], ...] = ((2, 1.0),)
    solver: SolverSettings = field(default_factory=SolverSettings)
    schema_version: int = SCHEMA_VERSION

    def oscillator(self) -> OscillatorProblem:
        return OscillatorProblem(self.n, SaturatingNonlinearity.from_kind(self.nonlinearity), self.forcing)

    def dirichlet(self) -> DirichletProblem:
        return DirichletProblem(SaturatingNonlinearity.from_kind(self.nonlinearity), self.amplitude,
                                self.shape, self.solver.modes)

    def dirichlet_forcing(self) -> ForcingTerm:
        sin = {1: self.amplitude}
        sin.update(dict(self.shape))
        return ForcingTerm.from_modes(sin=sin)


_COMMON = {"schema_version", "mode", "nonlinearity", "solver"}
_MODE_KEYS = {"periodic": _COMMON | {"n", "forcing"}, "dirichlet": _COMMON | {"amplitude", "shape"}}
_FORCING_KEYS = {"constant", "cos", "sin"}

SCHEMA_HELP = f"""\
config schema (JSON object, unknown keys are rejected):
  schema_version  {SCHEMA_VERSION}
  mode            one of {MODES}
  nonlinearity    one of {CATALOG_KINDS} (default "sigmoid")
  periodic mode:
    n             resonance order, integer >= 1
    forcing       {{"constant": a0, "cos": [a1, a2, ...], "sin": [b1, b2, ...]}}
  dirichlet mode:
    amplitude     A in e(t) = A sin t + sum_k shape[k] sin kt
    shape         {{"k": coefficient}} for k >= 2 (default {{"2": 1.0}})
  solver          optional overrides: {", ".join(f.name for f in fields(SolverSettings))}
"""


def _num(v, name, kind=float):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(f"{name} must be an integer, got {v!r}")
        return int(v)
    return float(v)


def _solver_from(d) -> SolverSettings:
    if not isinstance(d, dict):
        raise ConfigError("solver must be an object")
    known = {f.name: f for f in fields(SolverSettings)}
    unknown = set(d) - set(known)
    if unknown:
        raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
    out = {}
    for k, v in d.items():
        if k == "seed_radius" and v is None:
            out[k] = None
        elif k == "drift_grid":
            if not (isinstance(v, (list, tuple)) and len(v) == 2):
                raise ConfigError("drift_grid must be a pair of integers")
            out[k] = (_num(v[0], k, int), _num(v[1], k, int))
        elif k in {"seed_radii", "seed_angles", "phi_samples", "drift_iterations", "modes"}:
            out[k] = _num(v, k, int)
        else:
            out[k] = _num(v, k)
    s = SolverSettings(**out)
    for k in ("rel_tol", "abs_tol", "newton_rel_tol", "newton_abs_tol", "fixed_point_tol", "xi_step"):
        if getattr(s, k) <= 0:
            raise ConfigError(f"{k} must be positive")
    if s.modes < 2:
        raise ConfigError("modes must be >= 2")
    if s.xi_lo >= s.xi_hi:
        raise ConfigError("xi_lo must be below xi_hi")
    return s


def config_from_dict(d: dict) -> ProblemConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    mode = d.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    unknown = set(d) - _MODE_KEYS[mode]
    if unknown:
        raise ConfigError(f"unknown keys for {mode} mode: {sorted(unknown)}")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    kind = d.get("nonlinearity", "sigmoid")
    if kind not in CATALOG_KINDS:
        raise ConfigError(f"nonlinearity must be one of {CATALOG_KINDS}, got {kind!r}")
    solver = _solver_from(d.get("solver", {}))
    kw = dict(mode=mode, nonlinearity=kind, solver=solver)
    if mode == "periodic":
        if "n" not in d:
            raise ConfigError("periodic mode requires n")
        n = _num(d["n"], "n", int)
        if n < 1:
            raise ConfigError("n must be >= 1")
        fd = d.get("forcing", {})
        if not isinstance(fd, dict) or set(fd) - _FORCING_KEYS:
            raise ConfigError(f"forcing must be an object with keys {sorted(_FORCING_KEYS)}")
        cos = [_num(v, "forcing.cos") for v in fd.get("cos", [])]
        sin = [_num(v, "forcing.sin") for v in fd.get("sin", [])]
        kw.update(n=n, forcing=ForcingTerm(tuple(cos), tuple(sin), _num(fd.get("constant", 0.0), "forcing.constant")))
    else:
        sd = d.get("shape", {"2": 1.0})
        if not isinstance(sd, dict):
            raise ConfigError("shape must be an object mapping mode numbers to coefficients")
        try:
            shape = tuple(sorted((int(k), _num(v, f"shape[{k}]")) for k, v in sd.items()))
        except ValueError as exc:
            raise ConfigError(f"bad shape key: {exc}") from None
        if any(not 2 <= k <= solver.modes for k, _ in shape):
            raise ConfigError(f"shape modes must lie in 2..{solver.modes}")
        kw.update(amplitude=_num(d.get("amplitude", 0.0), "amplitude"), shape=shape)
    return ProblemConfig(**kw)


def config_to_dict(cfg: ProblemConfig) -> dict:
    d = {"schema_version": cfg.schema_version, "mode": cfg.mode, "nonlinearity": cfg.nonlinearity}
    if cfg.mode == "periodic":
        d["n"] = cfg.n
        d["forcing"] = {"constant": cfg.forcing.constant, "cos": list(cfg.forcing.cosine_coeffs),
                        "sin": list(cfg.forcing.sine_coeffs)}
    else:
        d["amplitude"] = cfg.amplitude
        d["shape"] = {str(k): v for k, v in cfg.shape}
    s = asdict(cfg.solver)
    s["drift_grid"] = list(s["drift_grid"])
    d["solver"] = s
    return d


def load_config(path) -> ProblemConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(data)


def dump_config(cfg: ProblemConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2)


def with_solver(cfg: ProblemConfig, **overrides) -> ProblemConfig:
    return replace(cfg, solver=_solver_from({**config_to_dict(cfg)["solver"], **overrides}))
