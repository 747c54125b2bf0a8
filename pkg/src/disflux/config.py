"""Problem configuration: TOML parsing, validation, object assembly.

A config file is a TOML document with sections [model], [state_box], [grid],
[time], [initial], [tolerances], [run]; see README for the schema.  Parsing
collects every violation before failing so a bad file reports all problems
at once.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError
from .fluxmodel import FluxModel, build_flux_model
from .kernels import BUILTIN_KERNELS, StateBox


@dataclass
class InitialData:
    kind: str = "constant"
    value: float = 0.0
    left: float = 0.0
    right: float = 0.0
    position: float = 0.0
    baseline: float = 0.0
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.value)
        if self.kind in ("step", "riemann"):
            return np.where(x < self.position, self.left, self.right)
        if self.kind == "bump":
            s = np.clip((x - self.center) / self.width, -1.0, 1.0)
            return self.baseline + self.amplitude * (1.0 - s ** 2) ** 2
        raise ConfigError(f"unknown initial data kind {self.kind!r}")


@dataclass
class ProblemConfig:
    kernel_name: str = "lwr"
    domain: tuple = (-1.0, 1.0)
    interfaces: tuple = ()
    k_values: tuple = (1.0,)
    u_min: float = 0.0
    u_max: float = 1.0
    m_override: float | None = None
    n_cells: int = 200
    n_v: int = 128
    t_final: float = 0.5
    n_snapshots: int = 0          # 0 -> one snapshot per time step
    initial: InitialData = field(default_factory=InitialData)
    initial_b: InitialData | None = None
    tol_rh: float = 1e-9
    c_slack: float = 0.0          # 0 -> default 4*M
    tol_neg: float = 0.0          # 0 -> default 4*(dx+dv)*(1+M)
    seed: int = 0
    cfl: float = 0.45
    source_text: str = ""

    def build_model(self) -> FluxModel:
        kernel = BUILTIN_KERNELS[self.kernel_name]()
        box = StateBox(self.u_min, self.u_max)
        return build_flux_model(kernel, self.domain, self.interfaces,
                                self.k_values, box, m_override=self.m_override)

    def initial_values(self, x: np.ndarray) -> np.ndarray:
        return self.initial(x)

    def config_hash(self) -> str:
        return hashlib.sha256(self.source_text.encode()).hexdigest()[:16]


_INITIAL_FIELDS = ("kind", "value", "left", "right", "position",
                   "baseline", "amplitude", "center", "width")


def _initial_from_table(tab: dict, where: str, violations: list) -> InitialData:
    init = InitialData()
    for key, val in tab.items():
        if key not in _INITIAL_FIELDS:
            violations.append(f"{where}.{key}: unknown field")
            continue
        setattr(init, key, str(val) if key == "kind" else float(val))
    if init.kind not in ("constant", "step", "riemann", "bump"):
        violations.append(f"{where}.kind: unknown initial data kind {init.kind!r}")
    return init


def parse_config(path) -> ProblemConfig:
    """Read and validate a TOML problem config; raises ConfigError."""
    text = Path(path).read_text()
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc

    violations: list = []
    cfg = ProblemConfig(source_text=text)

    model = doc.get("model", {})
    cfg.kernel_name = str(model.get("kernel", cfg.kernel_name))
    if cfg.kernel_name not in BUILTIN_KERNELS:
        violations.append(f"model.kernel: unknown kernel {cfg.kernel_name!r}")
    dom = model.get("domain", list(cfg.domain))
    if len(dom) != 2 or not dom[0] < dom[1]:
        violations.append("model.domain: need [x_lo, x_hi] with x_lo < x_hi")
    else:
        cfg.domain = (float(dom[0]), float(dom[1]))
    cfg.interfaces = tuple(float(p) for p in model.get("interfaces", []))
    cfg.k_values = tuple(float(k) for k in model.get("k_values", [1.0]))
    if len(cfg.k_values) != len(cfg.interfaces) + 1:
        violations.append("model.k_values: need len(interfaces) + 1 coefficients")
    if any(b <= a for a, b in zip(cfg.interfaces, cfg.interfaces[1:])):
        violations.append("model.interfaces: must be strictly increasing")
    if cfg.interfaces and (cfg.interfaces[0] <= cfg.domain[0]
                           or cfg.interfaces[-1] >= cfg.domain[1]):
        violations.append("model.interfaces: must lie inside model.domain")
    if "m_bound" in model and float(model["m_bound"]) > 0:
        cfg.m_override = float(model["m_bound"])

    box = doc.get("state_box", {})
    cfg.u_min = float(box.get("u_min", cfg.u_min))
    cfg.u_max = float(box.get("u_max", cfg.u_max))
    if not cfg.u_min < cfg.u_max:
        violations.append("state_box: u_min must be < u_max")

    grid = doc.get("grid", {})
    cfg.n_cells = int(grid.get("n_cells", cfg.n_cells))
    cfg.n_v = int(grid.get("n_v", 128))
    if cfg.n_cells < 4:
        violations.append("grid.n_cells: must be >= 4")
    if cfg.n_v < 16:
        violations.append("grid.n_v: must be >= 16")

    time = doc.get("time", {})
    cfg.t_final = float(time.get("t_final", cfg.t_final))
    cfg.n_snapshots = int(time.get("n_snapshots", cfg.n_snapshots))
    if cfg.t_final <= 0:
        violations.append("time.t_final: must be positive")

    if "initial" in doc:
        cfg.initial = _initial_from_table(doc["initial"], "initial", violations)
    if "initial_b" in doc:
        cfg.initial_b = _initial_from_table(doc["initial_b"], "initial_b", violations)

    tols = doc.get("tolerances", {})
    cfg.tol_rh = float(tols.get("tol_rh", cfg.tol_rh))
    cfg.c_slack = float(tols.get("c_slack", cfg.c_slack))
    cfg.tol_neg = float(tols.get("tol_neg", cfg.tol_neg))
    for name in ("tol_rh", "c_slack", "tol_neg"):
        if getattr(cfg, name) < 0:
            violations.append(f"tolerances.{name}: must be nonnegative")

    runtab = doc.get("run", {})
    cfg.seed = int(runtab.get("seed", 0))
    cfg.cfl = float(runtab.get("cfl", 0.45))
    if not 0 < cfg.cfl <= 0.5:
        violations.append("run.cfl: must be in (0, 0.5]")

    if not violations:
        lo, hi = cfg.u_min, cfg.u_max
        probe = cfg.initial(np.linspace(cfg.domain[0], cfg.domain[1], 257))
        if probe.min() < lo - 1e-12 or probe.max() > hi + 1e-12:
            violations.append("initial: data leaves the state box")

    if violations:
        raise ConfigError(
            "invalid config:\n  " + "\n  ".join(violations), violations=violations)
    return cfg
