"""Command-line front end.

Subcommands: point, stability-map, sweep-detuning, sweep-coupling,
sweep-thermal, onset. Each may read a YAML config whose keys are the
SweepConfig fields::

    mode: sweep-detuning
    fixed: {g_eff: 0.6, kappa: 0.5, gamma_m: 1.0e-5}
    axis: {name: delta, min: 0.05, max: 1.2, steps: 231}
    eta_list: [0.0, 0.2, 0.4, 0.6]
    output_path: out/fig3a.csv

``axis`` may also be a list ``[name, min, max, steps]``. ``axis2`` is the
coupling axis of a stability map. ``point`` additionally accepts ``system``,
a mapping of SystemSpec fields (SI units), which is reduced through the
classical steady state instead of taking delta and G directly. Unset
ReducedParams fields come from the reference operating point (kappa = 0.5,
gamma_m = 1e-5, n_th at 0.6 K for omega_m/2pi = 10 MHz, delta = 0.5, G = 0.6).
Flags override the file.

Exit codes: 0 success, 1 usage or config error, 2 requested point unstable,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

import yaml

from . import sweeps
from .lyapunov import ConvergenceError
from .measures import UnphysicalStateError
from .params import SystemSpec
from .steadystate import reduced_from_drive

log = logging.getLogger("optoqubit")

EXIT_OK, EXIT_USAGE, EXIT_UNSTABLE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _key_value(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), float(value)


def _common(p):
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--fixed", type=_key_value, action="append", default=[], metavar="FIELD=VALUE")
    p.add_argument("--eta", type=float, nargs="+", dest="eta_list", metavar="ETA")
    p.add_argument("-o", "--output", dest="output_path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="optoqubit", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("point", help="all measures at one parameter set")
    _common(p)
    p.add_argument("--log2", action="store_true", help="display entropic quantities in bits")

    grids = {
        "stability-map": "stable/unstable verdicts over a (delta, G) grid",
        "sweep-detuning": "measures against the effective detuning",
        "sweep-coupling": "measures against the effective coupling",
        "sweep-thermal": "measures against the thermal phonon number",
    }
    for mode, text in grids.items():
        p = sub.add_parser(mode, help=text)
        _common(p)
        p.add_argument("--axis", nargs=4, metavar=("FIELD", "MIN", "MAX", "STEPS"))
        if mode == "stability-map":
            p.add_argument("--axis2", nargs=4, metavar=("FIELD", "MIN", "MAX", "STEPS"))
        p.add_argument("--workers", type=int, help=f"worker processes (default ${sweeps.WORKERS_ENV} or CPU count)")

    p = sub.add_parser("onset", help="bisect for an entanglement or stability boundary")
    _common(p)
    p.add_argument("--axis", required=True, help="field to bisect")
    p.add_argument("--bracket", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p.add_argument("--predicate", choices=sorted(sweeps.PREDICATES), default="entangled")
    p.add_argument("--tol", type=float)
    return parser


def _axis(value):
    if value is None:
        return None
    if isinstance(value, dict):
        return sweeps.Axis(str(value["name"]), float(value["min"]), float(value["max"]), int(value["steps"]))
    name, lo, hi, steps = value
    return sweeps.Axis(str(name), float(lo), float(hi), int(steps))


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: config must be a key/value mapping")
    return doc


def make_config(args) -> tuple[sweeps.SweepConfig, dict]:
    doc = load_config(args.config) if args.config else {}
    mode = args.command if args.command != "onset" else "point"
    if "mode" in doc and doc["mode"] != mode and args.command != "onset":
        raise UsageError(f"config mode {doc['mode']!r} does not match subcommand {mode!r}")
    fixed = {k: float(v) for k, v in (doc.get("fixed") or {}).items()}
    fixed.update(dict(args.fixed))
    axis = _axis(getattr(args, "axis", None) if args.command != "onset" else None) or _axis(doc.get("axis"))
    axis2 = _axis(getattr(args, "axis2", None)) or _axis(doc.get("axis2"))
    eta_list = args.eta_list or doc.get("eta_list")
    cfg = sweeps.SweepConfig(
        mode=mode,
        fixed=fixed,
        axis=axis if args.command != "onset" else None,
        axis2=axis2,
        output_path=args.output_path or doc.get("output_path"),
        **({"eta_list": [float(e) for e in eta_list]} if eta_list else {}),
    )
    return cfg, doc


def _single(cfg, args, doc):
    # single-point commands take eta from --fixed, else the first of --eta / eta_list, else 0
    p = cfg.template()
    if "eta" not in cfg.fixed and (args.eta_list or doc.get("eta_list")):
        p = p.replace(eta=float((args.eta_list or doc["eta_list"])[0]))
    return p


def _point(cfg, doc, args) -> int:
    if "system" in doc:
        spec = SystemSpec(**{k: float(v) for k, v in doc["system"].items()})
        p, points = reduced_from_drive(spec, doc.get("branch"))
        for fp in points:
            log.info("fixed point %d: delta=%.6g q_s=%.6g G=%.6g%s", fp.branch_index, fp.delta_eff, fp.q_s, fp.g_eff,
                     " (degenerate)" if fp.degenerate else "")
        p = p.replace(**cfg.fixed) if cfg.fixed else p
    else:
        p = _single(cfg, args, doc)
    row = sweeps.run_point(p)
    if cfg.output_path:
        sweeps.emit_csv([row], cfg.output_path)
    print(" ".join(f"{k}={v:.9g}" for k, v in p.as_dict().items()))
    if not row.stable:
        print("stable=0")
        return EXIT_UNSTABLE
    scale = 1 / math.log(2) if args.log2 else 1.0
    unit = "bits" if args.log2 else "nats"
    print(f"stable=1 E_N={row.e_n * scale:.9g} I_M={row.i_m * scale:.9g} D_G={row.d_g * scale:.9g} "
          f"nu_tilde_minus={row.nu_tilde_minus:.9g} cond_flag={int(row.condition_flag)} ({unit})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg, doc = make_config(args)
        if args.command == "point":
            return _point(cfg, doc, args)
        if args.command == "onset":
            value = sweeps.find_onset(args.axis, _single(cfg, args, doc), tuple(args.bracket), args.predicate, args.tol)
            print(f"{value:.9g}")
            return EXIT_OK
        if not cfg.output_path:
            raise UsageError("an output path is required (--output or output_path)")
        if args.command == "stability-map":
            maps = sweeps.run_stability_map(cfg)
            for eta, m in zip(cfg.eta_list, maps):
                log.info("eta=%g: uniform stable limit G=%.4g, RH disagreements=%d", eta, m.uniform_limit(), m.disagreements)
                if m.disagreements:
                    log.warning("eta=%g: %d Routh-Hurwitz disagreements", eta, m.disagreements)
            sweeps.emit_map_csv(maps, cfg.eta_list, cfg.output_path)
            return EXIT_OK
        rows = sweeps.SWEEPS[args.command](cfg, getattr(args, "workers", None))
        sweeps.emit_csv(rows, cfg.output_path)
        return EXIT_OK
    except (sweeps.PipelineError, ConvergenceError, UnphysicalStateError, ArithmeticError) as exc:
        print(f"optoqubit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, KeyError, TypeError, yaml.YAMLError, OSError) as exc:
        print(f"optoqubit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
