"""Command-line front end: ``atomopt {point,sweep,verify,stability-map}``.

Exit codes: 0 success, 1 usage/config/I-O, 2 unstable or unphysical input.
"""

import argparse
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import _backend, config, linalg, measures, model, sweep
from .errors import AtomOptError, ConfigError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PHYSICS = 2

CSV_HEADER = ("gamma", "g", "stable", "physical") + measures.MEASURE_COLUMNS
STABILITY_HEADER = ("gamma", "g", "stable", "max_real_eig")
DEVIATION_FLAG = 1e-4
RESIDUAL_FACTOR = 1e-10


class PhysicsError(Exception):
    """Unstable or unphysical parameters; maps to exit code 2."""


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def _json_clean(obj):
    # NaN/inf are not JSON; write them as null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_clean(obj.item())
    return obj


def dumps(doc):
    return json.dumps(_json_clean(doc), indent=2, allow_nan=False) + "\n"


def write_output(path, text):
    """Write everything at once; files go through a temp file and a rename."""
    if path in (None, "", "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".atomopt-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def record_to_dict(rec):
    return {
        "gamma": rec.gamma,
        "g": rec.g,
        "stable": rec.stable,
        "max_real_eig": rec.max_real_eig,
        "physical": rec.physical,
        "report": rec.report.to_dict() if rec.report is not None else None,
        "error": rec.error,
    }


def records_to_csv(records):
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for rec in records:
        row = [fmt(rec.gamma), fmt(rec.g), fmt(rec.stable), fmt(rec.physical)]
        if rec.report is not None:
            cols = rec.report.columns()
            row += [fmt(cols[c]) for c in measures.MEASURE_COLUMNS]
        else:
            row += [""] * len(measures.MEASURE_COLUMNS)
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _require_stable(params):
    drift = model.build_drift(params)
    if not model.is_stable(drift):
        raise PhysicsError(
            f"unstable parameters: max Re(eig) = {linalg.spectral_abscissa(drift):.6g}"
        )
    return drift


def cmd_point(cfg):
    _require_stable(cfg.params)
    cm = model.steady_covariance(cfg.params)
    physical = model.physicality_check(cm)
    if not physical:
        raise PhysicsError("steady state violates the uncertainty relation")
    doc = {
        "config": cfg.describe(),
        "cm": [float(v) for v in cm.sigma.ravel()],
        "stable": True,
        "physical": physical,
        "report": measures.measure_report(cm).to_dict(),
    }
    if cfg.means is not None:
        m = cfg.means
        doc["means"] = {
            "q": m.q_mean, "p": m.p_mean,
            "c": [m.c_mean.real, m.c_mean.imag], "a": [m.a_mean.real, m.a_mean.imag],
        }
    if cfg.output_format == "csv":
        rec = sweep.SweepRecord(cfg.params.atom_coupling, cfg.params.om_coupling, True,
                                linalg.spectral_abscissa(model.build_drift(cfg.params)),
                                physical, measures.MeasureReport.from_dict(doc["report"]))
        write_output(cfg.output_path, records_to_csv([rec]))
    else:
        write_output(cfg.output_path, dumps(doc))
    return EXIT_OK


def cmd_sweep(cfg):
    records = sweep.run_sweep(cfg.sweep, workers=cfg.workers)
    if cfg.output_format == "csv":
        text = records_to_csv(records)
    else:
        text = dumps({
            "config": cfg.describe(),
            "records": [record_to_dict(r) for r in records],
            "summary": sweep.summarize(records),
        })
    write_output(cfg.output_path, text)
    for rec in records:
        if rec.error is not None:
            print(f"warning: cell ({rec.gamma:g}, {rec.g:g}) failed: {rec.error}", file=sys.stderr)
    return EXIT_OK


def verify_report(params):
    """Numerical CM against the transcribed closed form, entry by entry."""
    drift = _require_stable(params)
    noise = model.build_noise(params)
    cm = model.steady_covariance(params)
    sigma = cm.sigma
    residual = linalg.lyapunov_residual(drift, sigma, noise)
    bound = RESIDUAL_FACTOR * max(1.0, float(np.abs(noise).max()))
    closed = model.closed_form_entries(params)
    table = []
    per_label = {}
    for (i, j), (label, sign) in sorted(model.CLOSED_FORM_LAYOUT.items()):
        if j < i:
            continue
        num = float(sigma[i, j])
        cf = sign * closed[label]
        dev = abs(num - cf)
        rel = dev / abs(num) if num != 0.0 else (0.0 if dev == 0.0 else math.inf)
        table.append({
            "row": i + 1, "col": j + 1, "label": label, "sign": sign,
            "numerical": num, "closed_form": cf, "abs_dev": dev, "rel_dev": rel,
        })
        per_label[label] = max(per_label.get(label, 0.0), rel)
    disagreeing = sorted(l for l, r in per_label.items() if not r <= DEVIATION_FLAG)
    clean = [l for l in disagreeing if l not in model.SUSPECT_LABELS]
    if clean:
        note = (
            "entries outside the suspect set disagree beyond the flag threshold; "
            "the numerical solution is the reference and the closed form is reported only"
        )
    elif disagreeing:
        note = "only suspect entries disagree"
    else:
        note = "all entries agree within the flag threshold"
    return {
        "params": {k: getattr(params, k) for k in params.__dataclass_fields__},
        "lyapunov_residual": residual,
        "residual_bound": bound,
        "residual_ok": residual <= bound,
        "entries": table,
        "max_rel_dev_by_label": {str(k): v for k, v in sorted(per_label.items())},
        "flag_threshold": DEVIATION_FLAG,
        "suspect_labels": list(model.SUSPECT_LABELS),
        "disagreeing_labels": disagreeing,
        "zero_pattern_violation": model.zero_pattern_violation(cm),
        "note": note,
    }


def cmd_verify(cfg):
    rep = verify_report(cfg.params)
    if cfg.output_format == "csv":
        buf = io.StringIO()
        keys = ("row", "col", "label", "sign", "numerical", "closed_form", "abs_dev", "rel_dev")
        buf.write(",".join(keys) + "\n")
        for e in rep["entries"]:
            buf.write(",".join(str(e[k]) if k in ("row", "col", "label", "sign") else fmt(e[k])
                               for k in keys) + "\n")
        buf.write(f"# lyapunov_residual={fmt(rep['lyapunov_residual'])}"
                  f" bound={fmt(rep['residual_bound'])}\n")
        write_output(cfg.output_path, buf.getvalue())
    else:
        write_output(cfg.output_path, dumps(rep))
    return EXIT_OK


def cmd_stability_map(cfg):
    rows = sweep.stability_map(cfg.sweep)
    if cfg.output_format == "json":
        text = dumps({
            "config": cfg.describe(),
            "records": [dict(zip(STABILITY_HEADER, r)) for r in rows],
            "summary": {"total": len(rows), "stable": sum(1 for r in rows if r[2])},
        })
    else:
        lines = [",".join(STABILITY_HEADER)]
        lines += [",".join(fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    write_output(cfg.output_path, text)
    return EXIT_OK


COMMANDS = {
    "point": cmd_point,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "stability-map": cmd_stability_map,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="atomopt", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", choices=sorted(_backend.BACKENDS),
                        help="kernel implementation (default: fastest available)")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in COMMANDS:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--no-defaults", action="store_true",
                       help="do not start from the bundled default config")
        p.add_argument("-o", "--output", help="output path, '-' for stdout")
        p.add_argument("--format", choices=config.FORMATS)
        p.add_argument("--workers", type=int)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        for key in config.FLOAT_KEYS + config.INT_KEYS:
            if key != "workers":
                p.add_argument("--" + key.replace("_", "-"), dest=key, metavar="X")
        p.add_argument("--angular-units", dest="angular_units", metavar="BOOL")
        p.add_argument("--measures", help="all, none, or a comma list of entanglement,steering")
    return parser


def _overrides(ns):
    out = {}
    for item in ns.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = config.coerce(key.strip(), val)
    for key in config.KNOWN_KEYS:
        val = getattr(ns, key, None)
        if val is None:
            continue
        out[key] = config.coerce(key, str(val))
    return out


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        if ns.backend:
            _backend.use(ns.backend)
        values = config.load(ns.config, _overrides(ns), defaults=not ns.no_defaults)
        cfg = config.build(ns.mode, values)
        return COMMANDS[ns.mode](cfg)
    except PhysicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AtomOptError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
