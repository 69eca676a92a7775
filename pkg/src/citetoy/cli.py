"""Command-line front end.

Every command writes CSV with one header row, to standard output or to
``--output``. With ``--output`` a JSON sidecar (``<output>.json``) records the
configuration, seed and library versions. Exit status is 0 on success, 1 for
invalid input and 2 for numerical or runtime failures; the error itself goes
to standard error as a single JSON line.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from ._backend import BACKEND
from .asymptotics import convergence_report
from .errors import CitetoyError, NumericalError
from .inference import (
    DEFAULT_THRESHOLDS,
    equality_vs_elite_test,
    fitted_curve,
    geometric_mle,
    load_dataset,
)
from .models import (
    DiscreteStableParams,
    NormalizerParams,
    mixing_to_dict,
    model_from_dict,
    pgf_eval,
    pmf,
    stability_transform,
)
from .sampler import RngState, simulate


class ValidationError(CitetoyError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _model(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"--model is not valid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="citetoy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"citetoy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--output", "-o", help="CSV destination (default: stdout)")
        return p

    p = command("pmf", "exact pmf from the p.g.f. series")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--max-k", type=int, default=100)

    p = command("sample", "seeded Monte Carlo draws")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--draws", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)

    p = command("verify-limit", "sup-error of the group p.g.f. against its limit")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--n", type=_int_list, default=[100, 1000, 10000, 100000, 1000000])

    p = command("stability-check", "P(Q_u(z)) against P(z)**(u**gamma) on a grid")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--u", type=_float_list, default=[0.25, 0.5, 0.75])
    p.add_argument("--z", type=_float_list, default=[i / 10 for i in range(10)])

    p = command("fit", "geometric MLE and straight-line survival fit")
    p.add_argument("--dataset", required=True, help="ex1..ex4 or a file of counts")
    p.add_argument("--threshold", type=float)

    p = command("figures", "(x, -log(1-F(x)), fitted line) for plotting")
    p.add_argument("--dataset", required=True, help="ex1..ex4 or a file of counts")
    p.add_argument("--threshold", type=float)

    p = command("test-elite", "bootstrap LR test of Equality against Elite")
    p.add_argument("--dataset", required=True, help="ex1..ex4 or a file of counts")
    p.add_argument("--reps", type=int, default=199)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    return parser


# --------------------------------------------------------------------------
# commands: each returns (header, rows, extra metadata)
# --------------------------------------------------------------------------

def _threshold(args, data):
    if args.threshold is not None:
        return args.threshold
    if data.name in DEFAULT_THRESHOLDS:
        return DEFAULT_THRESHOLDS[data.name]
    raise ValidationError("--threshold is required for datasets read from a file")


def _positive(name, value):
    if value < 1:
        raise ValidationError(f"{name} must be at least 1")


def _cmd_pmf(args):
    model = model_from_dict(args.model)
    if args.max_k < 0:
        raise ValidationError("--max-k must be non-negative")
    probs = pmf(model, args.max_k)
    return ["k", "probability"], [(k, float(v)) for k, v in enumerate(probs)], {}


def _cmd_sample(args):
    model = model_from_dict(args.model)
    _positive("--draws", args.draws)
    _positive("--workers", args.workers)
    batch = simulate(model, RngState(args.seed), args.draws, workers=args.workers)
    rows = [(i, int(v)) for i, v in enumerate(batch.values)]
    return ["draw", "value"], rows, {"overflow": batch.overflow}


def _cmd_verify_limit(args):
    report = convergence_report(args.lam, args.gamma, args.q, args.n)
    rows = list(zip(report.n_values, report.sup_errors))
    return ["n", "sup_error"], rows, {"strictly_decreasing": report.strictly_decreasing}


def _cmd_stability(args):
    model = DiscreteStableParams(args.lam, args.gamma, args.q)
    rows = []
    for u in args.u:
        norm = NormalizerParams(u, args.q)
        power = u ** args.gamma
        for z in args.z:
            lhs = pgf_eval(model, stability_transform(norm, z))
            rhs = pgf_eval(model, z) ** power
            rows.append((u, z, lhs, rhs, abs(lhs - rhs)))
    worst = max(r[4] for r in rows) if rows else 0.0
    return ["u", "z", "lhs", "rhs", "abs_error"], rows, {"max_abs_error": worst}


def _cmd_fit(args):
    data = load_dataset(args.dataset)
    curve = fitted_curve(data, _threshold(args, data))
    mle = geometric_mle(data)
    f = curve.fit
    header = ["dataset", "n", "q_hat", "log_likelihood", "slope", "intercept", "r_squared", "x_threshold"]
    row = (data.name, len(data), float(mle.q_hat), float(mle.log_likelihood),
           f.slope, f.intercept, f.r_squared, float(f.x_threshold))
    return header, [row], {"source": data.source}


def _cmd_figures(args):
    data = load_dataset(args.dataset)
    curve = fitted_curve(data, _threshold(args, data))
    rows = [(x, y, float(curve.fit(x))) for x, y in curve.points]
    meta = {"source": data.source, "slope": curve.fit.slope,
            "intercept": curve.fit.intercept, "r_squared": curve.fit.r_squared}
    return ["x", "neg_log_survival", "fitted_line"], rows, meta


def _cmd_test_elite(args):
    data = load_dataset(args.dataset)
    if args.reps < 99:
        raise ValidationError("--reps must be at least 99")
    _positive("--workers", args.workers)
    res = equality_vs_elite_test(data, args.reps, RngState(args.seed), workers=args.workers)
    s, b = (res.elite_fit.s, res.elite_fit.b) if res.elite_fit is not None else (float("nan"),) * 2
    header = ["dataset", "n", "lr_statistic", "p_value", "null_q", "elite_s", "elite_b"]
    row = (data.name, len(data), res.lr_statistic, res.p_value, float(res.null_q), s, b)
    meta = {"elite_fit": mixing_to_dict(res.elite_fit) if res.elite_fit is not None else None}
    return header, [row], meta


COMMANDS = {
    "pmf": _cmd_pmf,
    "sample": _cmd_sample,
    "verify-limit": _cmd_verify_limit,
    "stability-check": _cmd_stability,
    "fit": _cmd_fit,
    "figures": _cmd_figures,
    "test-elite": _cmd_test_elite,
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _config_echo(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "output"}


def _versions():
    import scipy

    out = {"citetoy": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
           "backend": BACKEND}
    try:
        import numba

        out["numba"] = numba.__version__
    except ImportError:
        pass
    return out


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".citetoy-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    try:
        args = build_parser().parse_args(argv)
        header, rows, meta = COMMANDS[args.command](args)
        text = render_csv(header, rows)
        if args.output:
            sidecar = {"command": args.command, "config": _config_echo(args),
                       "seed": getattr(args, "seed", None), "versions": _versions(),
                       "rows": len(rows), **meta}
            _atomic_write(args.output, text)
            _atomic_write(args.output + ".json", json.dumps(sidecar, indent=2, sort_keys=True, default=str) + "\n")
        else:
            stdout.write(text)
        return 0
    except (ValidationError, ValueError, KeyError, TypeError) as exc:
        code = 1
        err = exc
    except (NumericalError, ArithmeticError, CitetoyError, OSError, RuntimeError) as exc:
        code = 2
        err = exc
    msg = str(err) if not isinstance(err, KeyError) else f"missing key {err}"
    record = {"error": type(err).__name__, "message": msg, "exit_code": code}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main(argv=None) -> int:
    return run(argv)
