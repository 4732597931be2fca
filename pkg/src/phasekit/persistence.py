"""Experiment configuration (TOML) and deterministic result files.

Config layout, every key optional unless noted::

    output_dir = "out"

    [grid]                 # required
    x0 = -10.0
    dx = 0.009765625
    n = 2048
    hbar = 1.0

    [state]                # required
    kind = "ho_eigenstate" # plane_wave | gaussian | ho_eigenstate
    level = 0              # ho_eigenstate: level, mass, omega
    convention = "plain"   # plain | conjugate

    [hamiltonian]
    potential = "harmonic" # zero | harmonic | quartic | square_well
    mass = 1.0
    omega = 1.0            # harmonic
    strength = 1.0         # quartic
    depth = 1.0            # square_well
    half_width = 1.0       # square_well

    [outputs]
    state = true
    density = false
    marginals = true
    moments = [[1, 1], [2, 0]]
    moment_paths = ["internal", "separable", "phase_space"]
    kernel = [0.0, 0.5]
    spectrum = 6
    plot = false

    [outputs.constants]
    d = 1e-10
    h_factors = [1.0, 0.5, 0.25]
    c_factors = [1.0, 4.0]

    [tolerances]           # overrides keyed by check name
    "phase_space.kernel_equivalence" = 1e-10

Unknown keys anywhere are rejected.  Numbers are written with 17 significant
digits so every double survives a write/read cycle unchanged.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .grid import Grid1D, GridError
from .states import TAIL_MASS_LIMIT, StateError, StateSpec, required_halfwidth, tail_mass
from .schrodinger import (
    HamiltonianSpec,
    harmonic_potential,
    quartic_potential,
    square_well_potential,
    zero_potential,
)

__all__ = [
    "ConfigError",
    "ConfigNotFoundError",
    "ConfigParseError",
    "ConfigValidationError",
    "OutputError",
    "HamiltonianConfig",
    "ConstantsRequest",
    "OutputRequest",
    "ExperimentConfig",
    "CheckResult",
    "OutputRecord",
    "ResultManifest",
    "ResultWriter",
    "load_config",
    "parse_config",
    "apply_overrides",
    "format_number",
    "write_results",
    "emit_plot_data",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "PHASEKIT_OUTPUT_DIR"
MOMENT_PATHS = ("internal", "separable", "phase_space")


class ConfigError(Exception):
    """Base class for configuration problems; ``key`` is the dotted path at fault."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class ConfigNotFoundError(ConfigError):
    pass


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


class OutputError(OSError):
    pass


POTENTIALS = {
    "zero": (zero_potential, ()),
    "harmonic": (harmonic_potential, ("omega",)),
    "quartic": (quartic_potential, ("strength",)),
    "square_well": (square_well_potential, ("depth", "half_width")),
}


@dataclass(frozen=True)
class HamiltonianConfig:
    potential: str = "harmonic"
    mass: float = 1.0
    params: dict = field(default_factory=dict)

    def spec(self, grid: Grid1D, hbar: float = 1.0) -> HamiltonianSpec:
        func, names = POTENTIALS[self.potential]
        kwargs = {k: self.params[k] for k in names if k in self.params}
        if self.potential == "harmonic":
            kwargs["mass"] = self.mass
        return HamiltonianSpec(func(grid.x, **kwargs), self.mass, hbar)


@dataclass(frozen=True)
class ConstantsRequest:
    d: float = 1e-10
    h_factors: tuple = (1.0, 0.5, 0.25)
    c_factors: tuple = (1.0, 4.0)


@dataclass(frozen=True)
class OutputRequest:
    state: bool = True
    density: bool = False
    marginals: bool = False
    moments: tuple = ()
    moment_paths: tuple = MOMENT_PATHS
    kernel: tuple = ()
    spectrum: int = 0
    plot: bool = False
    constants: ConstantsRequest | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    grid: Grid1D
    state: StateSpec
    hbar: float = 1.0
    convention: str = "plain"
    hamiltonian: HamiltonianConfig | None = None
    outputs: OutputRequest = OutputRequest()
    output_dir: Path = Path("out")
    tolerances: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing

_SCHEMA = {
    "output_dir": str,
    "grid": {"x0": float, "dx": float, "n": int, "hbar": float},
    "state": {
        "kind": str, "k_index": int, "center": float, "momentum": float, "width": float,
        "level": int, "mass": float, "omega": float, "convention": str,
    },
    "hamiltonian": {
        "potential": str, "mass": float, "omega": float, "strength": float,
        "depth": float, "half_width": float,
    },
    "outputs": {
        "state": bool, "density": bool, "marginals": bool, "moments": list, "moment_paths": list,
        "kernel": list, "spectrum": int, "plot": bool,
        "constants": {"d": float, "h_factors": list, "c_factors": list},
    },
    "tolerances": dict,
}


def _typecheck(value, kind, key):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigValidationError(f"expected a number, got {value!r}", key)
        if not math.isfinite(value):
            raise ConfigValidationError(f"expected a finite number, got {value!r}", key)
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigValidationError(f"expected an integer, got {value!r}", key)
        return value
    if not isinstance(value, kind):
        raise ConfigValidationError(f"expected {kind.__name__}, got {value!r}", key)
    return value


def _walk(raw: dict, schema: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in raw.items():
        dotted = f"{prefix}{key}"
        if key not in schema:
            raise ConfigValidationError("unknown key", dotted)
        kind = schema[key]
        if isinstance(kind, dict):
            if not isinstance(value, dict):
                raise ConfigValidationError("expected a table", dotted)
            out[key] = _walk(value, kind, dotted + ".")
        else:
            out[key] = _typecheck(value, kind, dotted)
    return out


def _pairs(value, key):
    pairs = []
    for i, item in enumerate(value):
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in item)):
            raise ConfigValidationError("expected [n, m] integer pairs", f"{key}[{i}]")
        n, m = item
        if not (0 <= n <= 8 and 0 <= m <= 8 and n + m >= 1):
            raise ConfigValidationError("need 0 <= n, m <= 8 and n + m >= 1", f"{key}[{i}]")
        pairs.append((n, m))
    return tuple(pairs)


def _numbers(value, key, positive=False):
    out = []
    for i, v in enumerate(value):
        v = _typecheck(v, float, f"{key}[{i}]")
        if positive and not v > 0:
            raise ConfigValidationError("must be positive", f"{key}[{i}]")
        out.append(v)
    return tuple(out)


def parse_config(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Validate a decoded config tree; raise :class:`ConfigValidationError` naming the bad key."""
    tree = _walk(raw, _SCHEMA)
    for section in ("grid", "state"):
        if section not in tree:
            raise ConfigValidationError("missing required table", section)

    g = tree["grid"]
    for key in ("x0", "dx", "n"):
        if key not in g:
            raise ConfigValidationError("missing required key", f"grid.{key}")
    if not g["dx"] > 0:
        raise ConfigValidationError(f"must be positive, got {g['dx']!r}", "grid.dx")
    hbar = g.get("hbar", 1.0)
    if not hbar > 0:
        raise ConfigValidationError(f"must be positive, got {hbar!r}", "grid.hbar")
    try:
        grid = Grid1D(g["x0"], g["dx"], g["n"])
    except GridError as exc:
        raise ConfigValidationError(str(exc), "grid.n") from exc

    s = dict(tree["state"])
    convention = s.pop("convention", "plain")
    if convention not in ("plain", "conjugate"):
        raise ConfigValidationError(f"must be 'plain' or 'conjugate', got {convention!r}", "state.convention")
    if "kind" not in s:
        raise ConfigValidationError("missing required key", "state.kind")
    try:
        state = StateSpec(**s)
    except StateError as exc:
        raise ConfigValidationError(str(exc), "state") from exc
    if state.kind == "plane_wave" and not -(grid.n // 2) <= state.k_index < grid.n // 2:
        raise ConfigValidationError(f"k_index {state.k_index} is outside the momentum grid", "state.k_index")
    tail = tail_mass(state, grid, hbar)
    if tail >= TAIL_MASS_LIMIT:
        half = required_halfwidth(state, hbar)
        centre = state.center if state.kind == "gaussian" else 0.0
        raise ConfigValidationError(
            f"state tail mass {tail:.3e} outside the grid; required span is at least "
            f"[{centre - half:.6g}, {centre + half:.6g}]", "grid")

    hamiltonian = None
    if "hamiltonian" in tree:
        h = dict(tree["hamiltonian"])
        potential = h.pop("potential", "harmonic")
        if potential not in POTENTIALS:
            raise ConfigValidationError(f"must be one of {sorted(POTENTIALS)}, got {potential!r}",
                                        "hamiltonian.potential")
        mass = h.pop("mass", 1.0)
        if not mass > 0:
            raise ConfigValidationError(f"must be positive, got {mass!r}", "hamiltonian.mass")
        allowed = POTENTIALS[potential][1]
        for key in h:
            if key not in allowed:
                raise ConfigValidationError(f"not a parameter of the {potential} potential", f"hamiltonian.{key}")
        if "omega" in h and not h["omega"] > 0:
            raise ConfigValidationError("must be positive", "hamiltonian.omega")
        if "half_width" in h and not h["half_width"] > 0:
            raise ConfigValidationError("must be positive", "hamiltonian.half_width")
        hamiltonian = HamiltonianConfig(potential, mass, h)

    o = dict(tree.get("outputs", {}))
    kwargs = {}
    for key in ("state", "density", "marginals", "plot"):
        if key in o:
            kwargs[key] = o[key]
    if "moments" in o:
        kwargs["moments"] = _pairs(o["moments"], "outputs.moments")
    if "moment_paths" in o:
        paths = tuple(o["moment_paths"])
        bad = [p for p in paths if p not in MOMENT_PATHS]
        if bad or not paths:
            raise ConfigValidationError(f"paths must be drawn from {MOMENT_PATHS}", "outputs.moment_paths")
        kwargs["moment_paths"] = paths
    if "kernel" in o:
        kwargs["kernel"] = _numbers(o["kernel"], "outputs.kernel")
    if "spectrum" in o:
        k = o["spectrum"]
        if k < 0:
            raise ConfigValidationError("must be non-negative", "outputs.spectrum")
        if k > grid.n:
            raise ConfigValidationError(f"k={k} exceeds the number of grid points n={grid.n}", "outputs.spectrum")
        if k and hamiltonian is None:
            raise ConfigValidationError("a spectrum needs a [hamiltonian] table", "outputs.spectrum")
        kwargs["spectrum"] = k
    if "constants" in o:
        c = o["constants"]
        d = c.get("d", 1e-10)
        if not d > 0:
            raise ConfigValidationError("must be positive", "outputs.constants.d")
        h_factors = _numbers(c.get("h_factors", [1.0, 0.5, 0.25]), "outputs.constants.h_factors", True)
        if any(b >= a for a, b in zip(h_factors, h_factors[1:])):
            raise ConfigValidationError("must be strictly descending", "outputs.constants.h_factors")
        c_factors = _numbers(c.get("c_factors", [1.0, 4.0]), "outputs.constants.c_factors", True)
        if any(b <= a for a, b in zip(c_factors, c_factors[1:])):
            raise ConfigValidationError("must be strictly ascending", "outputs.constants.c_factors")
        kwargs["constants"] = ConstantsRequest(d, h_factors, c_factors)
    outputs = OutputRequest(**kwargs)

    tolerances = {}
    from .verification import DEFAULT_TOLERANCES  # deferred: verification imports this module

    for key, value in tree.get("tolerances", {}).items():
        dotted = f"tolerances.{key}"
        if key not in DEFAULT_TOLERANCES:
            raise ConfigValidationError("unknown check name", dotted)
        value = _typecheck(value, float, dotted)
        if not value >= 0:
            raise ConfigValidationError("must be non-negative", dotted)
        tolerances[key] = value

    out_dir = Path(tree.get("output_dir", "out"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    return ExperimentConfig(grid, state, hbar, convention, hamiltonian, outputs, out_dir, tolerances)


def _parse_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _key_path(key: str) -> list[str]:
    # TOML dotted-key grammar, so quoted parts like tolerances."a.b" stay whole
    try:
        node = tomllib.loads(f"{key} = 0")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigValidationError(f"cannot parse override key {key!r}") from exc
    parts = []
    while isinstance(node, dict):
        (name, node), = node.items()
        parts.append(name)
    return parts


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``dotted.key=value`` overrides; values use TOML literal syntax, bare words become strings."""
    tree = json.loads(json.dumps(raw))
    for item in overrides:
        if "=" not in item:
            raise ConfigValidationError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        parts = _key_path(key.strip())
        node = tree
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigValidationError("cannot descend into a non-table value", key)
        node[parts[-1]] = _parse_value(text.strip())
    return tree


def read_config_tree(path) -> dict:
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as exc:
        raise ConfigNotFoundError(f"config file not found: {path}") from exc
    except OSError as exc:
        raise ConfigNotFoundError(f"cannot read config file {path}: {exc}") from exc
    try:
        return tomllib.loads(data.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigParseError(f"cannot parse {path}: {exc}") from exc


def load_config(path, overrides=()) -> ExperimentConfig:
    """Read, override and validate a TOML config; relative output dirs resolve against the CWD."""
    return parse_config(apply_overrides(read_config_tree(path), overrides))


# ---------------------------------------------------------------- writing

def format_number(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.0:
            value = 0.0  # drop the sign of -0.0 so identical runs stay identical text
        return format(value, ".17g")
    return str(value)


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(format_number(obj)) if math.isfinite(obj) else str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class OutputRecord:
    name: str
    path: str
    sha256: str


@dataclass
class ResultManifest:
    command: str
    outputs: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "status": "pass" if self.passed else "fail",
            "outputs": [asdict(o) for o in self.outputs],
            "checks": [asdict(c) for c in self.checks],
        }


class ResultWriter:
    """Writes result files into one directory and records them in a manifest."""

    def __init__(self, directory, command: str):
        self.directory = Path(directory)
        self.manifest = ResultManifest(command)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"cannot create output directory {self.directory}: {exc}") from exc

    def _write(self, name: str, text: str) -> Path:
        if any(o.name == name for o in self.manifest.outputs):
            raise ValueError(f"output {name!r} written twice")
        path = self.directory / name
        data = text.encode("utf-8")
        try:
            path.write_bytes(data)
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        self.manifest.outputs.append(OutputRecord(name, name, hashlib.sha256(data).hexdigest()))
        return path

    def write_csv(self, name: str, header, rows) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_number(v) for v in row])
        return self._write(name, buf.getvalue())

    def write_json(self, name: str, payload) -> Path:
        return self._write(name, json.dumps(_json_ready(payload), indent=2, sort_keys=True) + "\n")

    def write_text(self, name: str, text: str) -> Path:
        return self._write(name, text)

    def add_check(self, check: CheckResult):
        self.manifest.checks.append(check)

    def finish(self) -> ResultManifest:
        text = json.dumps(_json_ready(self.manifest.to_dict()), indent=2, sort_keys=True) + "\n"
        path = self.directory / "manifest.json"
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        return self.manifest


def write_results(directory, command: str, tables: dict, checks=()) -> ResultManifest:
    """Write ``{filename: (header, rows)}`` tables plus a manifest; returns the manifest."""
    writer = ResultWriter(directory, command)
    for name, (header, rows) in tables.items():
        writer.write_csv(name, header, rows)
    for check in checks:
        writer.add_check(check)
    return writer.finish()


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def emit_plot_data(result, kind: str) -> str:
    """gnuplot-ready text.

    ``heatmap``: ``result`` is a :class:`~phasekit.phase_space.PhaseSpaceDensity`
    or an ``(x, p, F)`` triple; emits ``x p F`` lines with a blank line after
    every x row (gnuplot grid format).
    ``line``: ``result`` is an :class:`~phasekit.schrodinger.EigenSolution`
    or an ``(xs, ys)`` pair; emits two whitespace-separated columns.
    """
    if kind == "heatmap":
        if hasattr(result, "pgrid"):
            x, p, F = result.grid.x, result.pgrid.p, result.values
        else:
            x, p, F = (np.asarray(a) for a in result)
        if F.size == 0:
            raise ValueError("nothing to plot: empty result")
        lines = []
        for i, xi in enumerate(x):
            for k, pk in enumerate(p):
                lines.append(f"{format_number(xi)} {format_number(pk)} {format_number(F[i, k])}")
            lines.append("")
        return "\n".join(lines) + "\n"
    if kind == "line":
        if hasattr(result, "energies"):
            xs, ys = np.arange(len(result.energies)), result.energies
        else:
            xs, ys = (np.asarray(a) for a in result)
        if len(xs) == 0:
            raise ValueError("nothing to plot: empty result")
        return "".join(f"{format_number(a)} {format_number(b)}\n" for a, b in zip(xs, ys))
    raise ValueError(f"unknown plot kind {kind!r}; expected 'heatmap' or 'line'")


def resolve_output_dir(config: ExperimentConfig, flag: str | None = None) -> Path:
    """Flag beats the environment variable, which beats the config file."""
    if flag:
        return Path(flag)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    return config.output_dir
