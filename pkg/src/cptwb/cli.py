"""Command line front end (``cptwb``).

Subcommands
-----------
``info``         validate and classify a channel
``numax``        extremal output p-norm estimate (multistart fixed point)
``smin``         minimal output Rényi-p entropy (p = 0, 1 handled specially)
``multcheck``    multiplicativity check for a pair of channels at one p
``multscan``     grid scan + bisection of the violation threshold
``decompose``    split a qubit-output channel into two Choi-rank-≤d_in halves
``extremality``  extremality classification, optional perturbation to extreme
``complement``   emit the complementary channel as channel JSON

Channels come from ``--input FILE`` (channel JSON: ``{"d_in", "d_out",
"kraus": [...]}`` with matrices as nested ``[re, im]`` pairs), from
``--spec-file FILE`` (a serialized family spec), or from ``--family NAME``
plus the family's parameters (``--dim``, ``--x``, ``--alpha``,
``--epsilon``, ``--unitaries-file``, ``--seed``).

Exit codes: 0 success (a reported violation or non-convergence is data,
not an error), 2 invalid input, 3 numerical failure, 64 bad usage.
Output is deterministic: identical invocations produce identical bytes,
floats are rendered to 12 significant digits, and JSON keys keep a fixed
order.  ``CPTWB_THREADS`` parallelizes optimizer restarts without
changing any reported value.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from . import linalg as la
from . import channels as chan
from . import zoo
from . import optimize as opt
from . import decompose as dec

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64


class UsageError(Exception):
    """Bad flags or flag combinations (exit 64)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; route through UsageError for exit 64.
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _sig(x: float) -> str:
    return format(float(x), ".12g")


def _jsonable(obj):
    """Round floats to 12 significant digits and strip numpy types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(_sig(obj))
    return obj


def _vec_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]


def _render_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=False) + "\n"


def _is_scalar(x) -> bool:
    return x is None or isinstance(x, (bool, int, float, str))


def _fmt_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, float):
        return _sig(x)
    return str(x)


def _render_text(report: dict) -> str:
    lines: list[str] = []

    def walk(prefix: str, val):
        if isinstance(val, dict):
            for k, v in val.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(val, (list, tuple)):
            items = list(val)
            if items and all(isinstance(v, dict) for v in items):
                for i, v in enumerate(items):
                    walk(f"{prefix}[{i}]", v)
            elif all(_is_scalar(v) for v in items):
                lines.append(f"{prefix} = {', '.join(_fmt_scalar(v) for v in items)}")
            else:
                lines.append(f"{prefix} = {json.dumps(_jsonable(items))}")
        else:
            lines.append(f"{prefix} = {_fmt_scalar(val)}")

    walk("", report)
    return "\n".join(lines) + "\n"


CSV_COLUMNS = ("p", "nu_a", "nu_b", "nu_ab_lb", "gap", "violated")


def _render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                _fmt_scalar(row[c]) if isinstance(row[c], (bool, float)) else row[c]
                for c in CSV_COLUMNS
            ]
        )
    return buf.getvalue()


def _emit(args, report: dict, csv_rows: list[dict] | None = None):
    if args.format == "json":
        text = _render_json(report)
    elif args.format == "csv":
        if csv_rows is None:
            raise UsageError(
                "--format csv is only available for multcheck and multscan"
            )
        text = _render_csv(csv_rows)
    else:
        text = _render_text(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Channel sourcing
# ---------------------------------------------------------------------------

def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _add_channel_source(p: argparse.ArgumentParser, suffix: str = ""):
    sfx = f"-{suffix}" if suffix else ""
    tag = f" (channel {suffix.upper()})" if suffix else ""
    p.add_argument(f"--input{sfx}", metavar="FILE", help=f"channel JSON file{tag}")
    p.add_argument(
        f"--spec-file{sfx}", metavar="FILE", help=f"channel family spec JSON{tag}"
    )
    p.add_argument(
        f"--family{sfx}", choices=zoo.FAMILIES, help=f"built-in channel family{tag}"
    )
    p.add_argument(f"--dim{sfx}", type=int, help=f"family dimension{tag}")
    p.add_argument(f"--x{sfx}", type=float, help=f"identity mixing weight{tag}")
    p.add_argument(
        f"--alpha{sfx}",
        type=float,
        nargs=2,
        metavar=("A0", "A1"),
        help=f"qubit_generalized_extreme amplitudes{tag}",
    )
    p.add_argument(
        f"--epsilon{sfx}", type=float, help=f"near_depolarizing output radius{tag}"
    )
    p.add_argument(
        f"--unitaries-file{sfx}",
        metavar="FILE",
        help=f"JSON list of (d-1)x(d-1) unitaries for shift_subunitary{tag}",
    )


def _get(args, name: str, suffix: str):
    return getattr(args, f"{name}_{suffix}" if suffix else name)


_NEEDS_DIM = (
    "identity",
    "depolarizing",
    "werner_holevo",
    "depolarized_wh",
    "shift_subunitary",
    "near_depolarizing",
)


def _family_params(args, family: str, suffix: str) -> dict:
    dim = _get(args, "dim", suffix)
    x = _get(args, "x", suffix)
    alpha = _get(args, "alpha", suffix)
    epsilon = _get(args, "epsilon", suffix)
    ufile = _get(args, "unitaries_file", suffix)

    params: dict = {}
    if family in _NEEDS_DIM:
        if dim is None:
            raise UsageError(f"--family {family} needs --dim")
        params["d"] = dim
    if family == "depolarized_wh":
        if x is None:
            raise UsageError("--family depolarized_wh needs --x")
        params["x"] = x
    if family == "shift_subunitary":
        if ufile is not None:
            params["unitaries"] = _read_json(ufile)
        else:
            params["seed"] = args.seed
    if family == "qubit_generalized_extreme":
        if alpha is None:
            raise UsageError("--family qubit_generalized_extreme needs --alpha A0 A1")
        params["alpha"] = list(alpha)
        params["seed"] = args.seed
        if dim is not None:
            params["d_out"] = dim
    if family == "near_depolarizing":
        if epsilon is None:
            raise UsageError("--family near_depolarizing needs --epsilon")
        params["epsilon"] = epsilon
        params["seed"] = args.seed
        if x is not None:
            params["x"] = x
    return params


def _load_channel(args, suffix: str = "", required: bool = True):
    """Resolve one channel source; returns (channel, description) or None."""
    from_file = _get(args, "input", suffix)
    spec_file = _get(args, "spec_file", suffix)
    family = _get(args, "family", suffix)
    given = [s for s in (from_file, spec_file, family) if s is not None]
    if len(given) > 1:
        raise UsageError("give exactly one of --input / --spec-file / --family")
    if not given:
        if required:
            raise UsageError(
                "no channel given: use --input, --spec-file, or --family"
            )
        return None

    validate = not args.no_validate
    if from_file is not None:
        ch = chan.channel_from_json(_read_json(from_file), validate=validate)
        return ch, {"source": "file", "path": from_file}

    if spec_file is not None:
        spec = zoo.ChannelSpec.from_json(_read_json(spec_file))
    else:
        spec = zoo.ChannelSpec(family, **_family_params(args, family, suffix))
    try:
        ch = spec.build()
    except KeyError as exc:
        raise ValueError(f"channel spec is missing parameter {exc}") from exc
    if validate:
        rep = chan.validate_cpt(ch)
        if not rep.ok:
            raise chan.ChannelValidationError(
                "constructed channel failed validation: " + "; ".join(rep.messages)
            )
    desc = {"source": "family", "family": spec.family, "params": spec.params}
    return ch, desc


def _config(args) -> opt.OptimizerConfig:
    return opt.OptimizerConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
        tensor_restarts=getattr(args, "tensor_restarts", 200),
    )


def _head(command: str, args, desc: dict | None = None) -> dict:
    head = {"command": command, "version": __version__, "seed": args.seed}
    if desc is not None:
        head["channel"] = desc
    return head


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_info(args) -> int:
    loaded = _load_channel_novalidate(args)
    ch, desc = loaded
    rep = chan.validate_cpt(ch)
    report = _head("info", args, desc)
    report.update(
        {
            "d_in": ch.d_in,
            "d_out": ch.d_out,
            "n_kraus": len(ch),
            "validation": {
                "ok": rep.ok,
                "trace_preserving": rep.trace_preserving,
                "tp_residual": rep.tp_residual,
                "choi_psd": rep.choi_psd,
                "min_choi_eigval": rep.min_choi_eigval,
                "messages": list(rep.messages),
                "tolerance": 1e-10,
            },
        }
    )
    if rep.choi_psd:
        meta = chan.classify(ch)
        report["classification"] = {
            "choi_rank": meta.choi_rank,
            "is_extreme": meta.is_extreme,
            "is_generalized_extreme": meta.is_generalized_extreme,
        }
    else:
        report["classification"] = None
    if args.dump_kraus:
        report["kraus"] = chan.channel_to_json(ch)["kraus"]
    _emit(args, report)
    return EXIT_OK if (rep.ok or args.no_validate) else EXIT_INVALID


def _load_channel_novalidate(args):
    """info loads without the validation gate: its report *is* the gate."""
    saved = args.no_validate
    args.no_validate = True
    try:
        return _load_channel(args)
    finally:
        args.no_validate = saved


def cmd_numax(args) -> int:
    ch, desc = _load_channel(args)
    cfg = _config(args)
    rep = opt.estimate_nu_p(ch, args.p, cfg)
    report = _head("numax", args, desc)
    report.update(
        {
            "p": rep.p,
            "direction": rep.direction,
            "best_value": rep.best_value,
            "best_trace_power": rep.best_trace_power,
            "best_restart": rep.best_restart,
            "n_restarts": cfg.restarts,
            "n_structured_seeds": rep.n_structured_seeds,
            "all_converged": bool(all(rep.converged)),
            "max_iterations": int(max(rep.iterations)),
            "monotonicity_violations": rep.monotonicity_violations,
            "guard_fallbacks": rep.guard_fallbacks,
            "best_input": _vec_json(rep.best_input),
            "config": rep.config,
            "tolerances": {"value_tol": cfg.value_tol},
        }
    )
    _emit(args, report)
    return EXIT_OK


def cmd_smin(args) -> int:
    ch, desc = _load_channel(args)
    cfg = _config(args)
    rep = opt.estimate_smin_p(ch, args.p, cfg)
    report = _head("smin", args, desc)
    report.update(
        {
            "p": rep.p,
            "value": rep.value,
            "extrapolated": rep.extrapolated,
            "nu_value": rep.nu_value,
            "argmin": _vec_json(rep.argmin),
            "config": rep.config,
            "tolerances": {"value_tol": cfg.value_tol},
        }
    )
    _emit(args, report)
    return EXIT_OK


def _mult_row(r: opt.MultReport) -> dict:
    return {
        "p": r.p,
        "nu_a": r.nu_a,
        "nu_b": r.nu_b,
        "nu_ab_lb": r.nu_product_lb,
        "gap": r.gap,
        "violated": r.violated,
    }


def _load_pair(args):
    ch_a, desc_a = _load_channel(args)
    loaded_b = _load_channel(args, suffix="b", required=False)
    if loaded_b is None:
        return ch_a, desc_a, ch_a, {"source": "same_as_a"}
    ch_b, desc_b = loaded_b
    return ch_a, desc_a, ch_b, desc_b


def cmd_multcheck(args) -> int:
    ch_a, desc_a, ch_b, desc_b = _load_pair(args)
    cfg = _config(args)
    r = opt.mult_check(ch_a, ch_b, args.p, cfg)
    report = _head("multcheck", args)
    report.update(
        {
            "channel_a": desc_a,
            "channel_b": desc_b,
            "p": r.p,
            "nu_a": r.nu_a,
            "nu_b": r.nu_b,
            "nu_ab_lb": r.nu_product_lb,
            "product_of_singles": r.product_of_singles,
            "gap": r.gap,
            "violated": r.violated,
            "tensor_dim": r.tensor_dim,
            "certificate": _vec_json(r.certificate),
            "config": r.config,
            "tolerances": {
                "value_tol": cfg.value_tol,
                "violation_margin": opt.VIOLATION_MARGIN,
            },
        }
    )
    _emit(args, report, csv_rows=[_mult_row(r)])
    return EXIT_OK


def _parse_p_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--p-grid must be start:stop:step")
    try:
        start, stop, step = (float(t) for t in parts)
    except ValueError as exc:
        raise UsageError(f"bad --p-grid value: {exc}") from exc
    if step <= 0.0:
        raise UsageError("--p-grid step must be positive")
    if stop < start:
        raise UsageError("--p-grid stop must be >= start")
    vals = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-12:  # stop is included up to roundoff
            break
        vals.append(v)
        k += 1
    return vals


def cmd_multscan(args) -> int:
    ch_a, desc_a, ch_b, desc_b = _load_pair(args)
    cfg = _config(args)
    grid = _parse_p_grid(args.p_grid)
    scan = opt.mult_scan(ch_a, ch_b, grid, cfg, resolution=args.resolution)
    rows = [_mult_row(r) for r in scan.rows]
    report = _head("multscan", args)
    report.update(
        {
            "channel_a": desc_a,
            "channel_b": desc_b,
            "p_grid": args.p_grid,
            "resolution": args.resolution,
            "rows": rows,
            "threshold": scan.threshold,
            "bracket": list(scan.bracket) if scan.bracket else None,
            "config": {
                "restarts": cfg.restarts,
                "tensor_restarts": cfg.tensor_restarts,
                "max_iters": cfg.max_iters,
                "value_tol": cfg.value_tol,
                "seed": cfg.seed,
            },
            "tolerances": {
                "value_tol": cfg.value_tol,
                "violation_margin": opt.VIOLATION_MARGIN,
            },
        }
    )
    _emit(args, report, csv_rows=rows)
    return EXIT_OK


def cmd_decompose(args) -> int:
    ch, desc = _load_channel(args)
    choi = chan.kraus_to_choi(ch)
    h1, h2 = dec.szarek_split_choi(choi)
    mixture = (h1.matrix + h2.matrix) / 2.0
    residual = float(np.abs(mixture - choi.matrix).max())

    halves = []
    target = np.eye(ch.d_in) / ch.d_in
    for half in (h1, h2):
        rank = chan.choi_rank(half)
        marginal = la.partial_trace(half.matrix, (ch.d_in, ch.d_out), keep=0)
        w, _ = la.herm_eig(half.matrix)
        entry = {
            "choi_rank": rank,
            "generalized_extreme": rank <= ch.d_in,
            "tp_residual": float(np.abs(marginal - target).max()),
            "min_eigval": float(w[-1]),
            "choi": la.matrix_to_json(half.matrix),
        }
        if args.dump_kraus:
            entry["kraus"] = chan.channel_to_json(chan.choi_to_kraus(half))["kraus"]
        halves.append(entry)

    report = _head("decompose", args, desc)
    report.update(
        {
            "d_in": ch.d_in,
            "d_out": ch.d_out,
            "choi_rank": chan.choi_rank(ch),
            "mixture_residual": residual,
            "halves": halves,
            "tolerances": {"support_tol": 1e-8, "rank_tol": la.RANK_TOL},
        }
    )
    _emit(args, report)
    return EXIT_OK


def cmd_extremality(args) -> int:
    ch, desc = _load_channel(args)
    meta = chan.classify(ch)
    report = _head("extremality", args, desc)
    report.update(
        {
            "d_in": ch.d_in,
            "d_out": ch.d_out,
            "n_kraus": len(ch),
            "classification": {
                "choi_rank": meta.choi_rank,
                "is_extreme": meta.is_extreme,
                "is_generalized_extreme": meta.is_generalized_extreme,
            },
        }
    )
    if args.perturb is not None:
        res = chan.perturb_to_extreme(ch, epsilon0=args.perturb, seed=args.seed)
        pert = {
            "epsilon0": args.perturb,
            "epsilon_used": res.epsilon,
            "already_extreme": res.already_extreme,
            "halvings": res.halvings,
            "choi_distance": res.choi_distance,
            "is_extreme": chan.is_extreme(res.channel),
        }
        if args.dump_kraus:
            pert["channel"] = chan.channel_to_json(res.channel)
        report["perturbation"] = pert
    if args.dump_kraus:
        report["kraus"] = chan.channel_to_json(ch)["kraus"]
    _emit(args, report)
    return EXIT_OK


def cmd_complement(args) -> int:
    ch, desc = _load_channel(args)
    if len(ch) != chan.choi_rank(ch):
        ch_min = chan.choi_to_kraus(chan.kraus_to_choi(ch))
    else:
        ch_min = ch
    comp = chan.complement(ch_min)
    val = chan.validate_cpt(comp)
    report = _head("complement", args, desc)
    report.update(
        {
            "d_in": comp.d_in,
            "d_out": comp.d_out,
            "n_kraus": len(comp),
            "validation_ok": val.ok,
            "tp_residual": val.tp_residual,
            "channel_json": chan.channel_to_json(comp),
        }
    )
    _emit(args, report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument(
        "--no-validate", action="store_true", help="skip the CPT validation gate"
    )
    common.add_argument(
        "--format", choices=("json", "csv", "text"), default="text"
    )
    common.add_argument("--output", metavar="FILE", help="write the report to FILE")

    optflags = _Parser(add_help=False)
    optflags.add_argument("--restarts", type=int, default=50)
    optflags.add_argument("--max-iters", type=int, default=500)

    tensorflags = _Parser(add_help=False)
    tensorflags.add_argument("--tensor-restarts", type=int, default=200)

    parser = _Parser(
        prog="cptwb",
        description="numerical workbench for finite-dimensional quantum channels",
    )
    parser.add_argument("--version", action="version", version=f"cptwb {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND")

    p = sub.add_parser("info", parents=[common], help="validate and classify")
    _add_channel_source(p)
    p.add_argument("--dump-kraus", action="store_true")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser(
        "numax", parents=[common, optflags], help="extremal output p-norm"
    )
    _add_channel_source(p)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_numax)

    p = sub.add_parser(
        "smin", parents=[common, optflags], help="minimal output Renyi entropy"
    )
    _add_channel_source(p)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_smin)

    p = sub.add_parser(
        "multcheck",
        parents=[common, optflags, tensorflags],
        help="multiplicativity check at one p",
    )
    _add_channel_source(p)
    _add_channel_source(p, suffix="b")
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_multcheck)

    p = sub.add_parser(
        "multscan",
        parents=[common, optflags, tensorflags],
        help="threshold scan over Renyi orders",
    )
    _add_channel_source(p)
    _add_channel_source(p, suffix="b")
    p.add_argument("--p-grid", required=True, metavar="START:STOP:STEP")
    p.add_argument("--resolution", type=float, default=0.01)
    p.set_defaults(func=cmd_multscan)

    p = sub.add_parser(
        "decompose",
        parents=[common],
        help="split a qubit-output channel into rank-bounded halves",
    )
    _add_channel_source(p)
    p.add_argument("--dump-kraus", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser(
        "extremality", parents=[common], help="extremality classification"
    )
    _add_channel_source(p)
    p.add_argument(
        "--perturb",
        type=float,
        metavar="EPS0",
        help="perturb a generalized-extreme channel to a true extreme point",
    )
    p.add_argument("--dump-kraus", action="store_true")
    p.set_defaults(func=cmd_extremality)

    p = sub.add_parser(
        "complement", parents=[common], help="emit the complementary channel"
    )
    _add_channel_source(p)
    p.set_defaults(func=cmd_complement)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            raise UsageError("missing subcommand (see cptwb --help)")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    # LinAlgError subclasses ValueError, so the numerical branch goes first.
    except (RuntimeError, FloatingPointError, OverflowError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        # covers ChannelValidationError, shape/hermiticity/PSD failures,
        # malformed JSON, and unreadable files
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
