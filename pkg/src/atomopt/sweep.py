"""Rectangular sweeps over the atom coupling and the optomechanical coupling."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import measures, model
from .errors import ConfigError, EmptyInput
from .linalg import spectral_abscissa

MEASURE_GROUPS = frozenset({"entanglement", "steering"})
POSITIVE_TOL = 1e-12


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition. ``base`` supplies everything except the two couplings.

    With ``angular_units`` the range bounds are taken as rad/s; otherwise they
    are read as Hz and scaled by 2 pi.
    """

    base: model.SystemParams
    gamma_range: tuple = (50e3, 54e3, 41)
    g_range: tuple = (20e3, 20.5e3, 11)
    angular_units: bool = True
    measures_enabled: frozenset = MEASURE_GROUPS

    def __post_init__(self):
        for name in ("gamma_range", "g_range"):
            lo, hi, steps = getattr(self, name)
            if int(steps) != steps or steps < 2:
                raise ConfigError(f"{name}: steps must be an integer >= 2, got {steps}")
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0 or not lo < hi:
                raise ConfigError(f"{name}: need 0 <= min < max, got ({lo}, {hi})")
        unknown = set(self.measures_enabled) - MEASURE_GROUPS
        if unknown:
            raise ConfigError(f"unknown measure groups {sorted(unknown)}")
        object.__setattr__(self, "measures_enabled", frozenset(self.measures_enabled))

    @property
    def unit_scale(self):
        return 1.0 if self.angular_units else 2.0 * math.pi

    def gamma_values(self):
        lo, hi, steps = self.gamma_range
        return np.linspace(lo, hi, int(steps)) * self.unit_scale

    def g_values(self):
        lo, hi, steps = self.g_range
        return np.linspace(lo, hi, int(steps)) * self.unit_scale

    def cells(self):
        """(gamma, g) pairs, row-major with the atom coupling outermost."""
        gs = self.g_values()
        return [(float(a), float(b)) for a in self.gamma_values() for b in gs]


@dataclass
class SweepRecord:
    gamma: float
    g: float
    stable: bool
    max_real_eig: float = math.nan
    physical: bool | None = None
    report: measures.MeasureReport | None = None
    error: str | None = None


def partial_report(cm, groups):
    """MeasureReport with disabled groups filled with NaN."""
    if groups == MEASURE_GROUPS:
        return measures.measure_report(cm)
    full = measures.measure_report(cm)
    if "entanglement" not in groups:
        for name in ("neg_1v1", "neg_1v2", "contangle_residuals"):
            d = getattr(full, name)
            for key in d:
                d[key] = math.nan
    if "steering" not in groups:
        for name in ("steering_1to1", "steering_1to2", "steering_2to1",
                     "steering_residual_out", "steering_residual_in"):
            d = getattr(full, name)
            for key in d:
                d[key] = math.nan
    return full


def evaluate_cell(base, gamma, g, groups=MEASURE_GROUPS):
    """Stability, physicality and measures at one grid point; never raises."""
    rec = SweepRecord(gamma=gamma, g=g, stable=False)
    try:
        p = base.with_couplings(gamma, g)
        drift = model.build_drift(p)
        rec.max_real_eig = spectral_abscissa(drift)
        rec.stable = model.is_stable(drift)
        if not rec.stable:
            return rec
        cm = model.steady_covariance(p)
        rec.physical = model.physicality_check(cm)
        if groups:
            rec.report = partial_report(cm, groups)
    except Exception as exc:  # recorded per cell by contract
        rec.report = None
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def _evaluate_row(args):
    base, gamma, gs, groups = args
    return [evaluate_cell(base, gamma, g, groups) for g in gs]


def run_sweep(config, workers=1):
    """Evaluate every grid cell; output order is the grid order regardless of workers."""
    gs = [float(v) for v in config.g_values()]
    rows = [(config.base, float(a), gs, config.measures_enabled) for a in config.gamma_values()]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_row, rows))
    else:
        chunks = [_evaluate_row(r) for r in rows]
    return [rec for chunk in chunks for rec in chunk]


def stability_map(config):
    """(gamma, g, stable, max_real_eig) over the grid, eigenvalues only."""
    out = []
    for gamma, g in config.cells():
        drift = model.build_drift(config.base.with_couplings(gamma, g))
        out.append((gamma, g, model.is_stable(drift), spectral_abscissa(drift)))
    return out


def summarize(records):
    """Extremes per measure over stable cells plus steering-class flags."""
    if not records:
        raise EmptyInput("no records to summarize")
    stable = [r for r in records if r.stable and r.report is not None]
    summary = {
        "counts": {
            "total": len(records),
            "stable": sum(1 for r in records if r.stable),
            "unstable": sum(1 for r in records if not r.stable),
            "unphysical": sum(1 for r in records if r.stable and r.physical is False),
            "failed": sum(1 for r in records if r.error is not None),
        },
        "measures": {},
    }
    rows = [(r, r.report.columns()) for r in stable]
    for col in measures.MEASURE_COLUMNS:
        vals = [(row[col], r) for r, row in rows if not math.isnan(row[col])]
        if not vals:
            continue
        lo = min(vals, key=lambda t: t[0])
        hi = max(vals, key=lambda t: t[0])
        summary["measures"][col] = {
            "min": lo[0],
            "max": hi[0],
            "argmin": [lo[1].gamma, lo[1].g],
            "argmax": [hi[1].gamma, hi[1].g],
        }

    one_way = set()
    two_way = set()
    for r, _ in rows:
        rep = r.report
        for m in measures.MODES:
            rest = measures.complement_label(m)
            out = rep.steering_1to2[m.name]
            inn = rep.steering_2to1[m.name]
            if out > POSITIVE_TOL and inn == 0.0:
                one_way.add(f"{m.name}->{rest}")
            if inn > POSITIVE_TOL and out == 0.0:
                one_way.add(f"{rest}->{m.name}")
            if (rep.steering_residual_out[m.name] > POSITIVE_TOL
                    and rep.steering_residual_in[m.name] > POSITIVE_TOL):
                two_way.add(m.name)
    summary["one_way_steering_present"] = "M->CA" in one_way
    summary["one_way_directions"] = sorted(one_way)
    summary["two_way_steering_present"] = bool(two_way)
    summary["two_way_modes"] = sorted(two_way)
    return summary
