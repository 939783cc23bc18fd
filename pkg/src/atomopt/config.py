"""Flat ``key = value`` run configuration.

One key per line, ``#`` starts a comment. Numbers may be written as
products of literals and ``pi`` (``2*pi*947e3``). Booleans are
``true``/``false``. Later sources override earlier ones: bundled defaults,
then the config file, then command-line flags.
"""

import math
from dataclasses import asdict, dataclass
from importlib import resources

from . import model
from .errors import ConfigError
from .sweep import MEASURE_GROUPS, SweepConfig

FLOAT_KEYS = (
    "omega_m", "gamma_m", "kappa", "gamma_a", "gamma_coupling", "g_coupling",
    "nbar", "temperature", "gamma_min", "gamma_max", "g_min", "g_max",
    "omega_c", "omega_l", "omega_a", "mass", "length", "power", "n_atoms", "gamma0",
)
INT_KEYS = ("gamma_steps", "g_steps", "workers")
BOOL_KEYS = ("angular_units",)
STR_KEYS = ("measures", "output", "format")
KNOWN_KEYS = FLOAT_KEYS + INT_KEYS + BOOL_KEYS + STR_KEYS
MODES = ("point", "sweep", "verify", "stability-map")
FORMATS = ("csv", "json")


def parse_number(text):
    value = 1.0
    for factor in text.replace(" ", "").split("*"):
        if factor.lower() == "pi":
            value *= math.pi
        else:
            try:
                value *= float(factor)
            except ValueError:
                raise ConfigError(f"not a number: {text!r}") from None
    return value


def coerce(key, text):
    if key not in KNOWN_KEYS:
        raise ConfigError(f"unknown key {key!r}")
    text = text.strip()
    if key in FLOAT_KEYS:
        return parse_number(text)
    if key in INT_KEYS:
        v = parse_number(text)
        if v != int(v):
            raise ConfigError(f"{key} must be an integer, got {text!r}")
        return int(v)
    if key in BOOL_KEYS:
        low = text.lower()
        if low not in ("true", "false"):
            raise ConfigError(f"{key} must be true or false, got {text!r}")
        return low == "true"
    return text


def parse_text(text, source="<text>"):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            values[key] = coerce(key, val)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def default_text():
    return resources.files("atomopt").joinpath("data/default.conf").read_text()


def load(path=None, overrides=None, defaults=True):
    values = parse_text(default_text(), "default.conf") if defaults else {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_text(fh.read(), str(path)))
    values.update(overrides or {})
    return values


@dataclass
class RunConfig:
    mode: str
    params: model.SystemParams
    sweep: SweepConfig | None
    output_path: str | None
    output_format: str
    physical: model.PhysicalParams | None = None
    means: model.SteadyMeans | None = None
    workers: int = 1

    def describe(self):
        out = {
            "mode": self.mode,
            "params": asdict(self.params),
            "output_format": self.output_format,
        }
        if self.physical is not None:
            out["physical"] = asdict(self.physical)
        if self.sweep is not None:
            out["sweep"] = {
                "gamma_range": list(self.sweep.gamma_range),
                "g_range": list(self.sweep.g_range),
                "angular_units": self.sweep.angular_units,
                "measures_enabled": sorted(self.sweep.measures_enabled),
            }
        return out


def _require(values, key):
    if key not in values:
        raise ConfigError(f"missing required key {key!r}")
    return values[key]


def build(mode, values):
    """Validate a merged key/value mapping into a RunConfig."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    fmt = values.get("format", "json" if mode in ("point", "verify") else "csv").lower()
    if fmt not in FORMATS:
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    angular = values.get("angular_units", True)
    scale = 1.0 if angular else 2.0 * math.pi
    omega_m = _require(values, "omega_m")

    physical = means = None
    try:
        if "nbar" in values:
            nbar = values["nbar"]
        elif "temperature" in values:
            nbar = model.thermal_occupation(omega_m, values["temperature"])
        else:
            nbar = 0.0
        if "power" in values:
            physical = model.PhysicalParams(
                omega_m=omega_m,
                gamma_m=_require(values, "gamma_m"),
                omega_c=_require(values, "omega_c"),
                omega_l=_require(values, "omega_l"),
                mass=_require(values, "mass"),
                length=_require(values, "length"),
                power=values["power"],
                kappa=_require(values, "kappa"),
                gamma_a=_require(values, "gamma_a"),
                temperature=values.get("temperature", 0.0),
                omega_a=values.get("omega_a", 0.0),
                n_atoms=values.get("n_atoms", 1.0),
                gamma0=values.get("gamma0", 0.0),
            )
            params, means = model.derive_system_params(physical)
            if "nbar" in values:
                params = model.SystemParams(
                    params.omega_m, params.gamma_m, params.kappa, params.gamma_a,
                    params.atom_coupling, params.om_coupling, nbar,
                )
        else:
            params = model.SystemParams(
                omega_m=omega_m,
                gamma_m=_require(values, "gamma_m"),
                kappa=_require(values, "kappa"),
                gamma_a=_require(values, "gamma_a"),
                atom_coupling=values.get("gamma_coupling", 0.0) * scale,
                om_coupling=values.get("g_coupling", 0.0) * scale,
                nbar=nbar,
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    sweep = None
    if mode in ("sweep", "stability-map"):
        groups = values.get("measures", "all").strip().lower()
        if groups == "all":
            enabled = MEASURE_GROUPS
        elif groups == "none":
            enabled = frozenset()
        else:
            enabled = frozenset(g.strip() for g in groups.split(",") if g.strip())
        sweep = SweepConfig(
            base=params,
            gamma_range=(_require(values, "gamma_min"), _require(values, "gamma_max"),
                         _require(values, "gamma_steps")),
            g_range=(_require(values, "g_min"), _require(values, "g_max"),
                     _require(values, "g_steps")),
            angular_units=angular,
            measures_enabled=enabled,
        )
    workers = values.get("workers", 1)
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    return RunConfig(
        mode=mode,
        params=params,
        sweep=sweep,
        output_path=values.get("output"),
        output_format=fmt,
        physical=physical,
        means=means,
        workers=workers,
    )
