"""Command-line front end: ``lineargrowth <subcommand> [flags]``.

Exit status is 0 on success, 1 when a solve fails to converge or a
certificate misses its threshold (the report is still written), and 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import logging
import math
import sys

import numpy as np

from .densities import DataTerm, make_mu_elliptic
from .diagnostics import diagnostics_report, staircase_metric
from .energy import EnergyParams
from .errors import ConfigError, DomainError, ImageIOError, NumericError, ShapeError
from .grid import Mask
from .imageio import load_image, load_mask, save_image
from .solver import SolverConfig, continuation_solve
from .synth import PATTERNS, synth

log = logging.getLogger("lineargrowth")

DEFAULT_GAP_THRESHOLD = 5e-3
DEFAULT_FLAT_TOL = 1e-3


class UsageError(Exception):
    pass


def _floats(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _data_spec(text):
    if text == "quad":
        return ("quadratic", 2.0)
    if text == "linear":
        return ("linear_growth", 2.0)
    if text.startswith("power:"):
        try:
            return ("power", float(text[6:]))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError("--data must be quad, linear or power:<p>")


def _common(p, solve=True):
    p.add_argument("-v", "--verbose", action="store_true", help="log progress per stage")
    src = p.add_argument_group("input")
    src.add_argument("--in", dest="input", help="input image (.pgm or .png)")
    src.add_argument("--synth", choices=PATTERNS, help="generate the input instead of reading it")
    src.add_argument("--size", type=int, default=32)
    src.add_argument("--noise", type=float, default=0.05, help="noise sigma for --synth")
    src.add_argument("--seed", type=int, default=0)
    if not solve:
        return
    src.add_argument("--mask", help="mask image; byte 0 marks missing pixels")
    src.add_argument("--spacing", type=float, default=1.0)
    m = p.add_argument_group("model")
    m.add_argument("--alpha", type=float, default=1.0)
    m.add_argument("--beta", type=float, default=10.0)
    m.add_argument("--mu", type=float, default=1.2, help="ellipticity exponent of F (acts on grad v)")
    m.add_argument("--nu", type=float, default=1.2, help="ellipticity exponent of G (acts on grad u - v)")
    m.add_argument("--data", type=_data_spec, default=("quadratic", 2.0))
    m.add_argument("--weight", type=float, default=1.0)
    s = p.add_argument_group("solver")
    s.add_argument("--delta-schedule", type=_floats, default=None)
    s.add_argument("--tol", type=float, default=1e-6, help="sup-norm gradient tolerance")
    s.add_argument("--max-iters", type=int, default=20000)
    s.add_argument("--method", choices=("gd", "lbfgs"), default="gd")
    o = p.add_argument_group("output")
    o.add_argument("--report", help="report path (JSON, or CSV for sweep/diag)")
    o.add_argument("--timings", action="store_true", help="include wall times in the report")


def build_parser():
    parser = argparse.ArgumentParser(prog="lineargrowth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("denoise", "restore an image observed everywhere"),
        ("inpaint", "restore an image with missing pixels (needs --mask)"),
        ("certify", "solve and check the normalized duality gap"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--out", help="restored image (.pgm or .png)")
        if name == "certify":
            p.add_argument("--gap-threshold", type=float, default=DEFAULT_GAP_THRESHOLD)

    p = sub.add_parser("sweep", help="solve over a parameter grid, one CSV row per point")
    _common(p)
    for flag in ("mus", "nus", "alphas", "betas"):
        p.add_argument(f"--{flag}", type=_floats, default=None, help="comma-separated values")
    p.add_argument("--flat-tol", type=float, default=DEFAULT_FLAT_TOL)

    p = sub.add_parser("diag", help="regularity diagnostics per delta stage as CSV")
    _common(p)
    p.add_argument("--flat-tol", type=float, default=DEFAULT_FLAT_TOL)
    p.add_argument("--poincare-trials", type=int, default=20)

    p = sub.add_parser("synth", help="write a synthetic test image")
    _common(p, solve=False)
    p.add_argument("--out", required=True, help="noisy image path")
    p.add_argument("--clean-out", help="noise-free image path")
    return parser


# -- configuration ------------------------------------------------------------


def _params(args):
    for name in ("mu", "nu"):
        if not getattr(args, name) > 1:
            raise UsageError(f"--{name} must be > 1")
    if args.mu >= 1.5 or args.nu >= 2.0:
        log.warning("mu=%g, nu=%g lies outside the range 1 < mu < 3/2, 1 < nu < 2 "
                    "covered by the regularity theory", args.mu, args.nu)
    kind, p = args.data
    return EnergyParams(
        alpha=args.alpha,
        beta=args.beta,
        F=make_mu_elliptic(args.mu),
        G=make_mu_elliptic(args.nu),
        data=DataTerm(kind, args.weight, p),
    )


def _solver(args):
    kw = dict(grad_tol=args.tol, max_iters=args.max_iters, method=args.method)
    if args.delta_schedule is not None:
        kw["delta_schedule"] = tuple(args.delta_schedule)
    return SolverConfig(**kw)


def _sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load(args, want_mask):
    """Return ``(f, mask, source)`` where ``source`` echoes the input."""
    if (args.input is None) == (args.synth is None):
        raise UsageError("give exactly one of --in and --synth")
    if args.synth is not None:
        f, _ = synth(args.synth, args.size, args.noise, args.seed)
        source = {"synth": args.synth, "size": args.size, "noise": args.noise, "seed": args.seed}
    else:
        f = load_image(args.input)
        source = {"path": args.input, "sha256": _sha256(args.input)}
    mask_path = getattr(args, "mask", None)
    if want_mask is False and mask_path:
        raise UsageError("denoise takes no --mask; use inpaint")
    if want_mask is True and not mask_path:
        raise UsageError("inpaint needs --mask")
    spacing = getattr(args, "spacing", 1.0)
    if mask_path:
        mask = load_mask(mask_path, f, spacing)
        source["mask"] = {"path": mask_path, "sha256": _sha256(mask_path)}
    else:
        mask = Mask.full(f, spacing)
    return f, mask, source


def _config_echo(args, params, cfg, source):
    echo = {
        "command": args.command,
        "input": source,
        "spacing": getattr(args, "spacing", 1.0),
        "params": params.to_dict(),
        "solver": cfg.to_dict(),
    }
    for key in ("gap_threshold", "flat_tol", "poincare_trials"):
        if hasattr(args, key):
            echo[key] = getattr(args, key)
    return echo


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    return x


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ImageIOError(f"{path}: cannot write report ({exc})") from exc


def dump_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def dump_csv(rows):
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _jsonable(v) for k, v in row.items()})
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------


def _cmd_solve(args):
    want = {"denoise": False, "inpaint": True}.get(args.command)
    f, mask, source = _load(args, want)
    params = _params(args)
    cfg = _solver(args)
    echo = _config_echo(args, params, cfg, source)
    try:
        u, v, rep = continuation_solve(mask, params, cfg)
    except NumericError as exc:
        if args.report:
            _write_text(args.report, dump_json({"config": echo, "termination": "numeric_error", "error": str(exc)}))
        raise
    cert = rep.certificate
    doc = {
        "config": echo,
        "stages": [s.to_dict(timings=args.timings) for s in rep.stages],
        "certificate": cert.to_dict(),
        "termination": rep.termination,
    }
    code = 0 if rep.termination == "converged" else 1
    if args.command == "certify":
        ok = math.isfinite(cert.normalized_gap) and cert.normalized_gap <= args.gap_threshold
        doc["certified"] = ok
        if not ok:
            log.error("normalized gap %.3g exceeds threshold %.3g", cert.normalized_gap, args.gap_threshold)
            code = 1
    if args.out:
        save_image(u, args.out)
    if args.report:
        _write_text(args.report, dump_json(doc))
    log.info("normalized gap %.3g (%s)", cert.normalized_gap, rep.termination)
    return code


def _cmd_sweep(args):
    f, mask, source = _load(args, None)
    base = _params(args)
    cfg = _solver(args)
    grid = itertools.product(
        args.mus or [args.mu], args.nus or [args.nu], args.alphas or [args.alpha], args.betas or [args.beta]
    )
    rows = []
    code = 0
    for mu, nu, alpha, beta in grid:
        params = EnergyParams(alpha, beta, make_mu_elliptic(mu), make_mu_elliptic(nu), base.data)
        u, v, rep = continuation_solve(mask, params, cfg)
        cert = rep.certificate
        last = rep.stages[-1]
        rows.append({
            "mu": mu, "nu": nu, "alpha": alpha, "beta": beta,
            "delta": last.delta, "iterations": sum(s.iterations for s in rep.stages),
            "energy": cert.primal, "dual": cert.dual, "normalized_gap": cert.normalized_gap,
            "staircase_fraction": staircase_metric(u, args.flat_tol, h=mask.spacing),
            "status": rep.termination,
        })
        if rep.termination != "converged":
            code = 1
    _write_text(args.report, dump_csv(rows))
    return code


def _cmd_diag(args):
    f, mask, source = _load(args, None)
    params = _params(args)
    cfg = _solver(args)
    rows = []

    def collect(u, v, stage_params, rec):
        rep = diagnostics_report(u, v, mask, stage_params, args.mu, args.nu, args.flat_tol,
                                 args.poincare_trials, args.seed)
        row = rep.row()
        row["normalized_gap"] = rec.certificate.normalized_gap
        row["status"] = rec.status
        rows.append(row)

    _, _, rep = continuation_solve(mask, params, cfg, on_stage=collect)
    _write_text(args.report, dump_csv(rows))
    return 0 if rep.termination == "converged" else 1


def _cmd_synth(args):
    if args.synth is None:
        raise UsageError("synth needs --synth <pattern>")
    noisy, clean = synth(args.synth, args.size, args.noise, args.seed)
    save_image(noisy, args.out)
    if args.clean_out:
        save_image(clean, args.clean_out)
    return 0


COMMANDS = {
    "denoise": _cmd_solve,
    "inpaint": _cmd_solve,
    "certify": _cmd_solve,
    "sweep": _cmd_sweep,
    "diag": _cmd_diag,
    "synth": _cmd_synth,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError, DomainError, ShapeError, ImageIOError) as exc:
        print(f"lineargrowth {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"lineargrowth {args.command}: solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
