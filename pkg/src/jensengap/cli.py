"""Command-line front end.

Subcommands: ``scan``, ``gruss``, ``lemma``, ``family``, ``straddle``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure or
violated contract, 4 Grüss inequality violated, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import gap, matrix
from .errors import JensenGapError, MaxDepthExceeded
from .functions import Exponential, Interval, PiecewiseLinear, Polynomial, Signum, Sine
from .partition import custom, straddle
from .quadrature import default_tol
from .svg import render_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_GRUSS = 4
EXIT_IO = 5

CONFIG_KEYS = {"function", "interval", "scheme", "matrices", "output"}
FUNCTION_KEYS = {
    "exp": {"alpha", "scale"},
    "sgn": {"center", "dimension"},
    "poly": {"coeffs"},
    "sin": {"frequency", "phase", "amplitude"},
    "pwl": {"breakpoints", "values"},
}
SCHEME_KEYS = {"kind", "n_max", "eps", "points", "mus"}
OUTPUT_KEYS = {"csv", "svg", "format"}
MATRIX_KEYS = {"M", "R", "N"}


class ConfigError(Exception):
    pass


class OutputError(Exception):
    pass


# -- config ------------------------------------------------------------------


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(cfg, CONFIG_KEYS, "config")
    for key, allowed in (("scheme", SCHEME_KEYS), ("output", OUTPUT_KEYS),
                         ("matrices", MATRIX_KEYS)):
        if key in cfg:
            if not isinstance(cfg[key], dict):
                raise ConfigError(f"'{key}' must be an object")
            _reject_unknown(cfg[key], allowed, key)
    return cfg


def _reject_unknown(obj, allowed, where):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise ConfigError(f"unknown keys in {where}: {', '.join(extra)}")


def function_from_config(spec: dict):
    """Build a catalog function from ``{"kind": ..., **params}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("function must be an object with a 'kind'")
    kind = spec["kind"]
    if kind not in FUNCTION_KEYS:
        raise ConfigError(f"unknown function kind {kind!r}")
    params = {k: v for k, v in spec.items() if k != "kind"}
    _reject_unknown(params, FUNCTION_KEYS[kind], f"function {kind}")
    try:
        if kind == "exp":
            return Exponential(params.get("alpha", 1.0), params.get("scale", 1.0))
        if kind == "sgn":
            return Signum(params.get("center", 0.5), int(params.get("dimension", 1)))
        if kind == "poly":
            return Polynomial(params["coeffs"])
        if kind == "sin":
            return Sine(params.get("frequency", 1.0), params.get("phase", 0.0),
                        params.get("amplitude", 1.0))
        return PiecewiseLinear(params["breakpoints"], params["values"])
    except KeyError as exc:
        raise ConfigError(f"function {kind} is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters for function {kind}: {exc}") from exc


def matrix_from_config(obj):
    """A matrix from ``{"rows", "cols", "data"}`` (row-major) or a nested list."""
    if isinstance(obj, dict):
        _reject_unknown(obj, {"rows", "cols", "data"}, "matrix")
        try:
            rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        except KeyError as exc:
            raise ConfigError(f"matrix is missing {exc}") from exc
        if len(data) != rows * cols:
            raise ConfigError(f"matrix data has {len(data)} entries, expected {rows * cols}")
        return np.asarray(data, dtype=float).reshape(rows, cols)
    try:
        return np.atleast_2d(np.asarray(obj, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad matrix: {exc}") from exc


def matrix_to_json(X) -> dict:
    X = np.atleast_2d(X)
    return {"rows": X.shape[0], "cols": X.shape[1], "data": [float(v) for v in X.ravel()]}


def _pick(flag, cfg_value, default):
    if flag is not None:
        return flag
    if cfg_value is not None:
        return cfg_value
    return default


def _function_arg(args, cfg, interval):
    if args.function is not None:
        kind = args.function
        if kind == "exp":
            return Exponential(_pick(args.alpha, None, 1.0))
        if kind == "sgn":
            return Signum(_pick(args.center, None, interval.midpoint))
        if kind == "sin":
            return Sine(_pick(args.frequency, None, 1.0))
        raise ConfigError(f"function {kind!r} needs parameters from --config")
    spec = cfg.get("function")
    if spec is None:
        return Exponential(_pick(args.alpha, None, 1.0))
    if isinstance(spec, list):
        spec = spec[0]
    return function_from_config(spec)


def _interval_arg(args, cfg, default=(0.0, 1.0)):
    raw = _pick(args.interval, cfg.get("interval"), default)
    try:
        a, b = raw
        return Interval(float(a), float(b))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad interval {raw!r}: {exc}") from exc


def _tol_arg(args):
    tol = args.tol if args.tol is not None else default_tol()
    if not tol > 0:
        raise ConfigError(f"tolerance must be positive, got {tol}")
    return tol


# -- output ------------------------------------------------------------------


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def table_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else format_value(v)
    return v


def to_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path, text: str):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def emit_svg(table_series, path, **kwargs):
    write_atomic(path, render_svg(table_series, **kwargs))


def _emit(text, path):
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _format_arg(args, cfg):
    fmt = _pick(args.format, cfg.get("output", {}).get("format"), "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    return fmt


def _out_arg(args, cfg, key="csv"):
    return _pick(args.out, cfg.get("output", {}).get(key), None)


def _svg_arg(args, cfg):
    return _pick(getattr(args, "svg", None), cfg.get("output", {}).get("svg"), None)


# -- commands ----------------------------------------------------------------


def cmd_scan(args, cfg) -> int:
    interval = _interval_arg(args, cfg)
    f = _function_arg(args, cfg, interval)
    scheme_cfg = cfg.get("scheme", {})
    scheme = _pick(args.scheme, scheme_cfg.get("kind"), "uniform")
    n_max = int(_pick(args.n_max, scheme_cfg.get("n_max"), 20))
    eps = _pick(args.eps, scheme_cfg.get("eps"), None)

    if scheme == "custom":
        points = scheme_cfg.get("points")
        if points is None:
            raise ConfigError("custom scheme needs 'points'")
        p = custom(points)
        r = gap.fragmented_report(f, p)
        rows = [gap.ScanRow(p.count, r.normalized_jensen_sum, r.exact_functional,
                            r.normalized, r.total_gap, r.e1, r.e2, None)]
    elif scheme in ("uniform", "geometric"):
        if scheme == "geometric" and eps is None:
            raise ConfigError("geometric scheme needs --eps")
        if n_max < 2:
            raise ConfigError("--n-max must be at least 2")
        rows = gap.convergence_scan(f, interval, scheme, n_max, eps)
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")

    table = [r.as_dict() for r in rows]
    if _format_arg(args, cfg) == "json":
        text = to_json(table)
    else:
        text = table_to_csv(gap.SCAN_COLUMNS, table)
    svg_path = _svg_arg(args, cfg)
    if svg_path:
        Ns = [r["N"] for r in table]
        emit_svg(
            {
                "normalized J_N/J": (Ns, [r["normalized"] for r in table]),
                "gap": (Ns, [r["gap"] for r in table]),
                "e1": (Ns, [r["e1"] for r in table]),
                "e2": (Ns, [r["e2"] for r in table]),
            },
            svg_path,
            title=f"{scheme} fragmentation of {type(f).__name__}",
            xlabel="fragments N",
            ylabel="value",
            logy=True,
        )
    _emit(text, _out_arg(args, cfg))
    return EXIT_OK


def cmd_gruss(args, cfg) -> int:
    interval = _interval_arg(args, cfg)
    spec = cfg.get("function")
    if args.function is None and isinstance(spec, list):
        if len(spec) != 2:
            raise ConfigError("a function pair must have exactly two entries")
        f, g = function_from_config(spec[0]), function_from_config(spec[1])
    else:
        f = g = _function_arg(args, cfg, interval)
    tol = _tol_arg(args)
    res = gap.gruss_check(f, g, interval, args.i, args.j, tol=tol)
    result = {"lhs": res.lhs, "rhs": res.rhs, "slack": res.slack}
    if _format_arg(args, cfg) == "json":
        text = to_json(result)
    else:
        text = "".join(f"{k}={format_value(v)}\n" for k, v in result.items())
    _emit(text, _out_arg(args, cfg))
    return EXIT_OK if res.holds(1e-9) else EXIT_GRUSS


def cmd_lemma(args, cfg) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    if args.max_dim < 1:
        raise ConfigError("--max-dim must be at least 1")
    scalar = matrix.LemmaTriple([[0.0]], [[1.0]], [[1.0]])
    res = matrix.lemma_suite(args.seed, args.trials, args.max_dim, args.slacks)
    result = {
        "scalar_n_star": float(matrix.n_star(scalar)[0, 0]),
        "scalar_m1": float(matrix.m1(scalar)[0, 0]),
        "trials": res.trials,
        "max_minimizer_error": res.max_minimizer_error,
        "min_residual_eig": res.min_residual_eig,
        "max_identity_error": res.max_identity_error,
        "passed": res.passed(),
    }
    if _format_arg(args, cfg) == "json":
        text = to_json(result)
    else:
        text = "".join(f"{k}={format_value(v)}\n" for k, v in result.items())
    _emit(text, _out_arg(args, cfg))
    return EXIT_OK if res.passed() else EXIT_NUMERIC


DEFAULT_MUS = [10.0 ** -k for k in range(13)] + [0.0]


def cmd_family(args, cfg) -> int:
    mats = cfg.get("matrices", {})
    M = matrix_from_config(mats["M"]) if "M" in mats else np.array([[1.0, -1.0]])
    R = matrix_from_config(mats["R"]) if "R" in mats else np.eye(M.shape[0])
    if R.shape != (M.shape[0], M.shape[0]):
        raise ConfigError(f"R must be {M.shape[0]}x{M.shape[0]} to match M, got "
                          f"{R.shape[0]}x{R.shape[1]}")
    N = matrix_from_config(mats["N"]) if "N" in mats else -(R @ M)
    mus = _pick(args.mus, cfg.get("scheme", {}).get("mus"), DEFAULT_MUS)
    mus = [float(m) for m in mus]
    if not mus or any(m < 0 for m in mus):
        raise ConfigError("measures must be a nonempty list of nonnegative numbers")

    interval = _interval_arg(args, cfg, default=(0.0, 0.5))
    x = _function_arg(args, cfg, interval)
    if R.shape[0] != x.dimension:
        raise ConfigError(f"R is {R.shape[0]}x{R.shape[1]} but the trajectory has "
                          f"dimension {x.dimension}")
    traj = matrix.trajectory_check(x, R, interval, tol=_tol_arg(args))
    rows = matrix.wellposedness_sweep(M, R, N, mus)
    K = float(np.linalg.norm(matrix.slack_curvature(R, N)))
    q0 = float(np.linalg.norm(matrix.affine_bound(matrix.BoundProblem(M, R, 0.0), N)))
    ok = traj.ordered()
    for r in rows:
        allowance = 4 * np.finfo(float).eps * (abs(q0) + r.affine_norm)
        ok &= r.affine_deviation <= r.mu * K + allowance
    positive = [r for r in rows if r.mu > 0]
    if float(np.linalg.norm(M.T @ R @ M)) > 0 and positive:
        scaled = [r.rational_norm * r.mu for r in positive]
        ok &= max(scaled) <= 1.01 * min(scaled)

    table = [r.as_dict() for r in rows]
    if _format_arg(args, cfg) == "json":
        text = to_json({
            "trajectory": {"true": traj.true_integral, "rational": traj.rational,
                           "affine": traj.affine, "ordered": traj.ordered()},
            "matrices": {"M": matrix_to_json(M), "R": matrix_to_json(R), "N": matrix_to_json(N)},
            "sweep": table,
        })
    else:
        text = table_to_csv(matrix.SWEEP_COLUMNS, table)
        print(f"trajectory: true={format_value(traj.true_integral)} "
              f"rational={format_value(traj.rational)} affine={format_value(traj.affine)}",
              file=sys.stderr)
    svg_path = _svg_arg(args, cfg)
    if svg_path:
        emit_svg(
            {
                "affine ||Q(N)||": ([r["mu"] for r in table], [r["affine_norm"] for r in table]),
                "rational ||M'RM/mu||": ([r["mu"] for r in table], [r["rational_norm"] for r in table]),
            },
            svg_path, title="well-posedness as the measure vanishes",
            xlabel="measure mu", ylabel="Frobenius norm", logx=True, logy=True,
        )
    _emit(text, _out_arg(args, cfg))
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_straddle(args, cfg) -> int:
    interval = _interval_arg(args, cfg)
    eps_list = _pick(args.eps, cfg.get("scheme", {}).get("eps"), [0.1, 0.01, 0.001])
    if not isinstance(eps_list, list):
        eps_list = [eps_list]
    f = Signum(interval.midpoint)
    rows = []
    ok = True
    for e in eps_list:
        e = float(e)
        if not 0.0 < e < interval.measure():
            raise ConfigError(f"eps must lie in (0, {interval.measure()}), got {e}")
        r = gap.fragmented_report(f, straddle(interval, e))
        ok &= abs(r.total_gap - e * e) <= 1e-12
        rows.append({"eps": e, "gap": r.total_gap, "expected": e * e})
    if _format_arg(args, cfg) == "json":
        text = to_json(rows)
    else:
        text = table_to_csv(("eps", "gap", "expected"), rows)
    _emit(text, _out_arg(args, cfg))
    return EXIT_OK if ok else EXIT_NUMERIC


# -- parser ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _common(p, with_function=True):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    if with_function:
        p.add_argument("--function", choices=("exp", "sgn", "sin"))
        p.add_argument("--alpha", type=float)
        p.add_argument("--center", type=float)
        p.add_argument("--frequency", type=float)
        p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jensengap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scan", help="gap and bounds versus fragment count")
    _common(p)
    p.add_argument("--scheme", choices=("uniform", "geometric", "custom"))
    p.add_argument("--eps", type=float)
    p.add_argument("--n-max", type=int)
    p.add_argument("--svg")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("gruss", help="both sides of the Grüss inequality")
    _common(p)
    p.add_argument("--i", type=int, default=0, help="component of the first function")
    p.add_argument("--j", type=int, default=0, help="component of the second function")
    p.set_defaults(handler=cmd_gruss)

    p = sub.add_parser("lemma", help="randomized completion-of-squares suite")
    _common(p, with_function=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-dim", type=int, default=6)
    p.add_argument("--slacks", type=int, default=10)
    p.set_defaults(handler=cmd_lemma)

    p = sub.add_parser("family", help="affine vs rational bound on a trajectory and a measure sweep")
    _common(p)
    p.add_argument("--mus", type=float, nargs="+")
    p.add_argument("--svg")
    p.set_defaults(handler=cmd_family)

    p = sub.add_parser("straddle", help="gap of the signum under the straddling partition")
    _common(p, with_function=False)
    p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--eps", type=float, nargs="+")
    p.set_defaults(handler=cmd_straddle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.handler(args, cfg)
    except (ConfigError, JensenGapError) as exc:
        print(f"jensengap: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"jensengap: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MaxDepthExceeded, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"jensengap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
