"""Command-line front end.

Subcommands: bound (full pipeline with verification), oracle (gap only),
examples (reference-constant reproduction), tightness (sharpness
constructions), sweep (spread and sample-size scaling).  Options come from
flags or a JSON config file; flags win.  Output is JSON, CSV, or a plain
table, always at 9 significant digits, and byte-identical for a fixed
config and seed.
"""

import argparse
import csv
import io
import json
import math
import sys

from . import bounds
from .catalog import REL_TOL, worked_example_rows
from .distributions import distribution_from_dict
from .envelope import inf_ratio_lower, sup_ratio_upper
from .errors import ConditionViolationError, InvalidParameterError, JensenGapError
from .functions import GAP_ABOVE, GAP_BELOW, linear_shift, function_from_dict, select_shift_slope
from .oracle import jensen_gap, verify
from .rng import resolve_seed
from .sweeps import fit_loglog_slope, mean_of_n_sweep, two_point_sweep
from .tightness import (
    decay_exponent,
    outlier_ratio_sequence,
    three_point_gap_ratio,
    three_point_gap_ratio_closed_form,
    two_point_equality,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2

EQUALITY_TOL = 1e-12
RATIO_TOL = 1e-9
SLOPE_TOL = 0.10


# ---------------------------------------------------------------------------
# Formatting

def fmt(x):
    """One value as text: floats at 9 significant digits, locale-free."""
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def _round9(obj):
    """Round floats to 9 significant digits recursively, for JSON output."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return fmt(obj)
        return float(format(obj, ".9g"))
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def render_json(payload):
    return json.dumps(_round9(payload), indent=2) + "\n"


def render_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow([fmt(v) for v in row.values()])
    return buf.getvalue()


def render_table(rows, footer=()):
    cells = [[str(k) for k in rows[0].keys()]]
    cells += [[fmt(v) for v in row.values()] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(cells[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip()
             for line in cells]
    lines[1:1] = ["  ".join("-" * w for w in widths)]
    lines.extend(footer)
    return "\n".join(lines) + "\n"


def emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def render(fmt_name, payload, rows, footer=()):
    if fmt_name == "json":
        return render_json(payload)
    if fmt_name == "csv":
        return render_csv(rows)
    return render_table(rows, footer)


# ---------------------------------------------------------------------------
# Option plumbing

def _load_json_arg(text, what):
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    if text is None:
        raise InvalidParameterError(f"--{what} is required for this command")
    if text.lstrip().startswith("{"):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def merged_options(args, defaults):
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    opts = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise InvalidParameterError("config file must hold a JSON object")
        unknown = sorted(set(cfg) - set(defaults))
        if unknown:
            raise InvalidParameterError(
                f"config keys not understood by this command: {unknown}"
            )
        opts.update(cfg)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if "seed" in defaults and opts["seed"] is None:
        # resolve the environment fallback here so reports echo the seed
        # that was actually used
        opts["seed"] = resolve_seed(None)
    return opts


def _shifted(f, shift):
    """Resolve --shift: 'auto' estimates the slope, 'none' skips, else float."""
    if shift == "none":
        return f
    if shift == "auto":
        slope = select_shift_slope(f)
    else:
        try:
            slope = float(shift)
        except ValueError:
            raise InvalidParameterError(
                f"--shift must be 'auto', 'none', or a number, got {shift!r}"
            ) from None
    if slope == 0.0:
        return f
    return linear_shift(f, slope)


def _lower_envelope(g, alpha, beta, sign):
    """Envelope for the signed lower bounds, trying both signs on 'auto'."""
    if sign != "auto":
        return inf_ratio_lower(g, alpha, beta, sign=sign), sign
    try:
        return inf_ratio_lower(g, alpha, beta, sign=GAP_ABOVE), GAP_ABOVE
    except ConditionViolationError:
        pass
    return inf_ratio_lower(g, alpha, beta, sign=GAP_BELOW), GAP_BELOW


def _parse_terms(text):
    pairs = json.loads(text)
    try:
        return [(float(e), float(a)) for e, a in pairs]
    except (TypeError, ValueError):
        raise InvalidParameterError(
            "--terms must be a JSON list of [exponent, weight] pairs"
        ) from None


# ---------------------------------------------------------------------------
# Subcommands

BOUND_DEFAULTS = {
    "function": None, "dist": None, "kind": None, "alpha": None, "n": None,
    "beta": None, "k": None, "q": None, "terms": None, "sign": "auto",
    "shift": "auto", "seed": None, "samples": None, "nodes": None,
    "format": "table", "out": None,
}

_BOUND_KINDS = (
    "upper", "lower", "holder", "holder_single", "variance",
    "general_upper", "general_lower",
)


def _need(opts, *names):
    missing = [m for m in names if opts[m] is None]
    if missing:
        raise InvalidParameterError(
            f"--kind {opts['kind']} needs " + ", ".join(f"--{m}" for m in missing)
        )


def cmd_bound(args):
    opts = merged_options(args, BOUND_DEFAULTS)
    if opts["kind"] not in _BOUND_KINDS:
        raise InvalidParameterError(
            f"--kind must be one of {', '.join(_BOUND_KINDS)}, got {opts['kind']!r}"
        )
    f = function_from_dict(_load_json_arg(opts["function"], "function"))
    dist = distribution_from_dict(_load_json_arg(opts["dist"], "dist"))
    kw = {"seed": opts["seed"]}
    if opts["samples"] is not None:
        kw["samples"] = int(opts["samples"])
    if opts["nodes"] is not None:
        kw["nodes"] = int(opts["nodes"])

    kind = opts["kind"]
    sign = opts["sign"]
    if kind == "variance":
        report = bounds.variance_interval(f, dist, **kw)
    else:
        g = _shifted(f, opts["shift"])
        if kind == "upper":
            _need(opts, "alpha", "n")
            M = sup_ratio_upper(g, opts["alpha"], opts["n"])
            report = bounds.upper_bound(M, dist, opts["alpha"], opts["n"], **kw)
        elif kind == "lower":
            _need(opts, "alpha", "beta")
            M, sign = _lower_envelope(g, opts["alpha"], opts["beta"], sign)
            report = bounds.lower_bound_cauchy_schwarz(
                M, dist, opts["alpha"], opts["beta"], **kw
            )
        elif kind == "holder":
            _need(opts, "alpha", "beta", "k")
            k = int(opts["k"])
            if opts["q"] is None:
                raise InvalidParameterError(
                    f"--kind holder needs --q; valid choices for k={k}: "
                    f"{bounds.valid_holder_q(k)}"
                )
            M, sign = _lower_envelope(g, opts["alpha"], opts["beta"], sign)
            report = bounds.lower_bound_holder(
                M, dist, opts["alpha"], opts["beta"], k, int(opts["q"]), **kw
            )
        elif kind == "holder_single":
            _need(opts, "alpha", "beta", "k")
            M, sign = _lower_envelope(g, opts["alpha"], opts["beta"], sign)
            report = bounds.lower_bound_holder_single(
                M, dist, opts["alpha"], opts["beta"], int(opts["k"]), **kw
            )
        else:
            _need(opts, "terms")
            terms = _parse_terms(opts["terms"])
            mode = "upper" if kind == "general_upper" else "lower"
            k = None if opts["k"] is None else int(opts["k"])
            if mode == "upper":
                report = bounds.general_bounds(g, dist, terms, mode, **kw)
            elif sign == "auto":
                try:
                    report = bounds.general_bounds(
                        g, dist, terms, mode, k=k, sign=GAP_ABOVE, **kw
                    )
                except ConditionViolationError:
                    report = bounds.general_bounds(
                        g, dist, terms, mode, k=k, sign=GAP_BELOW, **kw
                    )
            else:
                report = bounds.general_bounds(
                    g, dist, terms, mode, k=k, sign=sign, **kw
                )

    gap = jensen_gap(f, dist, **kw)
    verdict = verify(report, gap)
    payload = {
        "report": report.to_dict(),
        "gap": gap.to_dict(),
        "verify": verdict.to_dict(),
    }
    value = report.value
    row = {
        "kind": report.kind,
        "value": value[0] if isinstance(value, tuple) else value,
        "value_hi": value[1] if isinstance(value, tuple) else "",
        "mu": report.mu,
        "gap": gap.value,
        "gap_error": gap.abs_error,
        "verdict": verdict.verdict,
        "margin": verdict.margin,
    }
    footer = [f"verdict: {verdict.verdict} ({verdict.detail})"]
    emit(render(opts["format"], payload, [row], footer), opts["out"])
    return EXIT_VIOLATION if verdict.verdict == "fail" else EXIT_OK


ORACLE_DEFAULTS = {
    "function": None, "dist": None, "seed": None, "samples": None,
    "nodes": None, "format": "table", "out": None,
}


def cmd_oracle(args):
    opts = merged_options(args, ORACLE_DEFAULTS)
    f = function_from_dict(_load_json_arg(opts["function"], "function"))
    dist = distribution_from_dict(_load_json_arg(opts["dist"], "dist"))
    kw = {"seed": opts["seed"]}
    if opts["samples"] is not None:
        kw["samples"] = int(opts["samples"])
    if opts["nodes"] is not None:
        kw["nodes"] = int(opts["nodes"])
    gap = jensen_gap(f, dist, **kw)
    row = {
        "gap": gap.value,
        "abs_error": gap.abs_error,
        "method": gap.method,
        "count": gap.count,
        "mu": gap.mu,
    }
    footer = [f"gap = {fmt(gap.value)} +- {fmt(gap.abs_error)}"]
    emit(render(opts["format"], gap.to_dict(), [row], footer), opts["out"])
    return EXIT_OK


EXAMPLES_DEFAULTS = {"format": "table", "out": None}


def cmd_examples(args):
    opts = merged_options(args, EXAMPLES_DEFAULTS)
    rows = worked_example_rows()
    worst = max(r["rel_err"] for r in rows)
    ok = worst <= REL_TOL
    for r in rows:
        if "cap" in r and not r["computed"] < r["cap"]:
            ok = False
    payload = {"rows": rows, "max_rel_err": worst, "tolerance": REL_TOL,
               "all_within_tolerance": ok}
    table_rows = [
        {"name": r["name"], "computed": r["computed"],
         "reference": r["reference"], "rel_err": r["rel_err"],
         "location": r["location"]}
        for r in rows
    ]
    footer = [f"max relative error {fmt(worst)} against tolerance {fmt(REL_TOL)}"]
    emit(render(opts["format"], payload, table_rows, footer), opts["out"])
    return EXIT_OK if ok else EXIT_VIOLATION


TIGHTNESS_DEFAULTS = {
    "construction": None, "alpha": None, "n": None, "beta": None,
    "sigma": None, "p": None, "sigma_n": None, "k": None, "q": None,
    "j_max": None, "format": "table", "out": None,
}


def cmd_tightness(args):
    opts = merged_options(args, TIGHTNESS_DEFAULTS)
    kind = opts["construction"]
    if kind == "two_point":
        alpha = 2.0 if opts["alpha"] is None else float(opts["alpha"])
        n = 4.0 if opts["n"] is None else float(opts["n"])
        sigma = 0.5 if opts["sigma"] is None else float(opts["sigma"])
        result = two_point_equality(alpha, n, sigma)
        diff = abs(result["gap"] - result["bound_floor"])
        scale = max(abs(result["bound_floor"]), 1e-30)
        payload = {**result, "abs_diff": diff,
                   "equal": diff <= EQUALITY_TOL * scale}
        emit(render(opts["format"], payload, [payload]), opts["out"])
        return EXIT_OK if payload["equal"] else EXIT_VIOLATION
    if kind == "three_point":
        alpha = 2.0 if opts["alpha"] is None else float(opts["alpha"])
        beta = 1.0 if opts["beta"] is None else float(opts["beta"])
        n = 2.0 if opts["n"] is None else float(opts["n"])
        p = 0.01 if opts["p"] is None else float(opts["p"])
        sigma_n = 1.0 if opts["sigma_n"] is None else float(opts["sigma_n"])
        ratio = three_point_gap_ratio(alpha, beta, n, p, sigma_n)
        closed = three_point_gap_ratio_closed_form(alpha, beta, n, p, sigma_n)
        rel = abs(ratio - closed) / abs(closed)
        payload = {"ratio": ratio, "closed_form": closed, "rel_err": rel,
                   "match": rel <= RATIO_TOL}
        emit(render(opts["format"], payload, [payload]), opts["out"])
        return EXIT_OK if payload["match"] else EXIT_VIOLATION
    if kind == "outlier":
        beta = 1.0 if opts["beta"] is None else float(opts["beta"])
        alpha = 2.0 if opts["alpha"] is None else float(opts["alpha"])
        k = 1 if opts["k"] is None else int(opts["k"])
        q = 1.5 if opts["q"] is None else float(opts["q"])
        j_max = 1024 if opts["j_max"] is None else int(opts["j_max"])
        seq = outlier_ratio_sequence(beta, alpha, k, q, j_max=j_max)
        m = k * (alpha - beta)
        rows = []
        for j, ratio in seq:
            sigma_q = float(j) ** (1.0 - m / q)
            rows.append({"j": j, "sigma_q": sigma_q,
                         "gap": ratio * sigma_q ** alpha, "ratio": ratio})
        tail = [r for r in rows if r["j"] >= 2]
        slope = fit_loglog_slope([r["j"] for r in tail],
                                 [r["ratio"] for r in tail])
        predicted = decay_exponent(beta, alpha, k, q)
        rel_dev = abs(slope - predicted) / abs(predicted)
        payload = {"rows": rows, "fitted_slope": slope,
                   "predicted_slope": predicted, "rel_dev": rel_dev,
                   "within": rel_dev <= SLOPE_TOL}
        footer = [
            f"fitted slope {fmt(slope)} against predicted {fmt(predicted)} "
            f"(relative deviation {fmt(rel_dev)})"
        ]
        emit(render(opts["format"], payload, rows, footer), opts["out"])
        return EXIT_OK if payload["within"] else EXIT_VIOLATION
    raise InvalidParameterError(
        f"--construction must be two_point, three_point, or outlier, got {kind!r}"
    )


SWEEP_DEFAULTS = {
    "mode": None, "function": None, "dist": None, "grid": None,
    "alpha": 2.0, "n": 2.0, "seed": None, "samples": None,
    "format": "table", "out": None,
}


def cmd_sweep(args):
    opts = merged_options(args, SWEEP_DEFAULTS)
    mode = opts["mode"]
    if mode not in ("two_point", "mean_of_n"):
        raise InvalidParameterError(
            f"--mode must be two_point or mean_of_n, got {mode!r}"
        )
    if opts["function"] is None:
        f = function_from_dict({"kind": "cos", "mu": 0.0})
    else:
        f = function_from_dict(_load_json_arg(opts["function"], "function"))
    alpha, n = float(opts["alpha"]), float(opts["n"])

    if mode == "two_point":
        grid = opts["grid"] or "0.4,0.2,0.1,0.05"
        sigmas = [float(s) for s in str(grid).split(",") if s.strip()]
        result = two_point_sweep(f, sigmas, alpha=alpha, n=n, seed=opts["seed"])
    else:
        grid = opts["grid"] or "4,16,64,256"
        ns = [int(s) for s in str(grid).split(",") if s.strip()]
        if opts["dist"] is None:
            base = distribution_from_dict(
                {"variant": "uniform", "lo": -1.0, "hi": 1.0}
            )
        else:
            base = distribution_from_dict(_load_json_arg(opts["dist"], "dist"))
        samples = 100_000 if opts["samples"] is None else int(opts["samples"])
        result = mean_of_n_sweep(
            f, base, ns, alpha=alpha, n_growth=n,
            samples=samples, seed=opts["seed"],
        )

    rows = [dict(r, gap_slope=result["gap_slope"]) for r in result["rows"]]
    footer = [f"fitted log-log gap slope {fmt(result['gap_slope'])}"]
    emit(render(opts["format"], result, rows, footer), opts["out"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser

class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract reserves 2 for bound
    violations, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_io_flags(p):
    p.add_argument("--format", choices=("json", "csv", "table"), default=None,
                   help="output format (default table)")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="write output to PATH instead of stdout")
    p.add_argument("--config", default=None, metavar="FILE",
                   help="JSON file of option defaults; explicit flags win")


def _add_data_flags(p):
    p.add_argument("--function", default=None, metavar="FILE|JSON",
                   help="function descriptor, inline JSON or a file path")
    p.add_argument("--dist", default=None, metavar="FILE|JSON",
                   help="distribution descriptor, inline JSON or a file path")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (falls back to JGB_SEED, then 0)")
    p.add_argument("--samples", type=int, default=None,
                   help="Monte Carlo sample count")


def build_parser():
    parser = _Parser(prog="jensengap",
                     description="Moment bounds on the Jensen gap, verified "
                                 "against a direct gap estimate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="compute a bound, estimate the gap, "
                       "and verify the sandwich")
    _add_data_flags(p)
    p.add_argument("--kind", default=None, choices=_BOUND_KINDS)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--terms", default=None, metavar="JSON",
                   help="comparison terms for the general kinds: [[exponent, weight], ...]")
    p.add_argument("--sign", default=None,
                   choices=("auto", GAP_ABOVE, GAP_BELOW),
                   help="which side of f(mu) the gap sits on (lower bounds)")
    p.add_argument("--shift", default=None, metavar="auto|none|SLOPE",
                   help="linear slope removed before the envelope (default auto)")
    p.add_argument("--nodes", type=int, default=None,
                   help="quadrature node count")
    _add_io_flags(p)
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("oracle", help="estimate the gap directly")
    _add_data_flags(p)
    p.add_argument("--nodes", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("examples", help="reproduce the reference constants")
    _add_io_flags(p)
    p.set_defaults(handler=cmd_examples)

    p = sub.add_parser("tightness", help="run a sharpness construction")
    p.add_argument("--construction", default=None,
                   choices=("two_point", "three_point", "outlier"))
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None,
                   help="two_point spread")
    p.add_argument("--p", type=float, default=None,
                   help="three_point moving mass")
    p.add_argument("--sigma-n", dest="sigma_n", type=float, default=None,
                   help="three_point fixed top moment")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--j-max", dest="j_max", type=int, default=None,
                   help="largest outlier position (powers of 2 up to this)")
    _add_io_flags(p)
    p.set_defaults(handler=cmd_tightness)

    p = sub.add_parser("sweep", help="sweep spread or sample count")
    p.add_argument("--mode", default=None, choices=("two_point", "mean_of_n"))
    p.add_argument("--grid", default=None,
                   help="comma-separated sigma grid or N grid")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--n", type=float, default=None)
    _add_data_flags(p)
    _add_io_flags(p)
    p.set_defaults(handler=cmd_sweep)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except JensenGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
