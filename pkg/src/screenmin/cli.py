"""Command line front end.

Exit codes: 0 ok, 2 bad input file, 3 bad parameters, 4 internal failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from .fwer_power import bonferroni_power, fwer_approx, fwer_upper_bound, power_unconditional
from .probmodel import AltModel
from .screening import MAX_EXACT_M, HypothesisMix, expected_selected, p0
from .simulation import SimConfig, SimulationError, default_workers, run_simulation
from .testing import bonferroni_max, screenmin
from .thresholds import ORACLE_METHODS, ThresholdResult, ThresholdSpec, adaptive_threshold, default_threshold, oracle_threshold

EXIT_OK, EXIT_INPUT, EXIT_PARAM, EXIT_INTERNAL = 0, 2, 3, 4


class ParamError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _floats(text: str, n: tuple[int, ...]) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ParamError(f"expected comma-separated numbers, got {text!r}") from None
    if len(vals) not in n:
        raise ParamError(f"expected {' or '.join(map(str, n))} values, got {text!r}")
    return vals


def _mix(text):
    if text is None:
        return None
    try:
        return HypothesisMix(*_floats(text, (3,)))
    except ValueError as exc:
        raise ParamError(str(exc)) from None


def _model(text):
    if text is None:
        return None
    vals = _floats(text, (1, 2))
    try:
        return AltModel(vals[0], vals[1] if len(vals) == 2 else None)
    except ValueError as exc:
        raise ParamError(str(exc)) from None


def _alpha(a: float) -> float:
    if not 0.0 < a < 1.0:
        raise ParamError("--alpha must lie in (0, 1)")
    return a


def _spec(args) -> ThresholdSpec:
    mix, model = _mix(args.mix), _model(args.snr)
    if args.threshold.startswith("oracle") and (mix is None or model is None):
        raise ParamError("oracle thresholds need --mix and --snr")
    try:
        return ThresholdSpec.parse(args.threshold, mix, model)
    except ValueError as exc:
        raise ParamError(str(exc)) from None


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_analyze(args) -> int:
    alpha = _alpha(args.alpha)
    if args.bonferroni:
        spec = None
    else:
        spec = _spec(args)
    try:
        matrix = sio.read_pmatrix(args.input)
    except OSError as exc:
        raise sio.InputError(str(exc)) from None
    if spec is None:
        result, label = bonferroni_max(matrix, alpha), "bonferroni"
    else:
        result, label = screenmin(matrix, spec, alpha), spec.label
    with _output(args.out) as out:
        sio.write_analysis(out, matrix, result, label)
    return EXIT_OK


def cmd_threshold(args) -> int:
    alpha = _alpha(args.alpha)
    spec = _spec(args)
    if spec.kind == "adaptive":
        if not args.input:
            raise ParamError("adaptive threshold needs --input")
        res = adaptive_threshold(sio.read_pmatrix(args.input).pmin, alpha)
    else:
        m = args.m
        if m is None and args.input:
            m = sio.read_pmatrix(args.input).m
        if m is None or m < 1:
            raise ParamError("need --m (or --input)")
        if spec.kind == "oracle":
            res = oracle_threshold(alpha, spec.mix, spec.model, m, spec.method)
        elif spec.kind == "fixed":
            res = ThresholdResult(spec.c, "fixed")
        else:
            res = ThresholdResult(default_threshold(alpha, m), "default")
    with _output(args.out) as out:
        out.write(f"c,{sio.fmt(res.c)}\nmethod,{res.method}\n")
        out.write(f"diagnostics,{json.dumps(res.diagnostics, sort_keys=True)}\n")
    return EXIT_OK


def _threshold_value(name, result):
    if name == "oracle":
        return result.oracle_c
    if name == "default":
        return result.extra["default_c"]
    if name == "fixed":
        return result.config.fixed_c
    return None


def cmd_simulate(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ParamError(f"cannot read config: {exc}") from None
    try:
        cfg = sio.parse_config(text)
        for key, val in (("seed", args.seed), ("n_reps", args.reps), ("rho", args.rho)):
            if val is not None:
                cfg[key] = [v.strip() for v in val.split(",")]
        cells = [SimConfig(**kw) for kw in sio.expand_config(cfg)]
    except ValueError as exc:
        raise ParamError(f"invalid config: {exc}") from None
    workers = args.workers if args.workers is not None else default_workers()
    with _output(args.out) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(sio.SIM_COLUMNS)
        for cfg in cells:
            res = run_simulation(cfg, workers=workers)
            for row in res.rows():
                row["threshold"] = _threshold_value(row["procedure"], res)
                w.writerow(sio.sim_row_values(row))
    return EXIT_OK


def cmd_curves(args) -> int:
    alpha = _alpha(args.alpha)
    if args.grid < 1:
        raise ParamError("--grid must be at least 1")
    with _output(args.out) as out:
        w = csv.writer(out, lineterminator="\n")
        if args.kind == "quantile":
            cs = _floats(args.c, tuple(range(1, 100)))
            snrs = np.linspace(0.0, args.snr_max, args.grid) if args.grid > 1 else np.array([args.snr_max])
            w.writerow(["snr", "c", "u", "p0"])
            for c in cs:
                if not 0.0 < c <= 1.0:
                    raise ParamError("selection thresholds must lie in (0, 1]")
                for s in snrs:
                    w.writerow([sio.fmt(s), sio.fmt(c), sio.fmt(args.u), sio.fmt(p0(args.u, c, AltModel(s)))])
            return EXIT_OK

        mix, model = _mix(args.mix), _model(args.snr)
        if mix is None or model is None or args.m is None:
            raise ParamError("fwer-power curves need --mix, --snr and --m")
        cmin = args.cmin if args.cmin is not None else alpha / (100 * args.m)
        if not 0.0 < cmin <= alpha:
            raise ParamError("--cmin must lie in (0, alpha]")
        grid = np.geomspace(cmin, alpha, args.grid) if args.grid > 1 else np.array([alpha])
        stars = {meth: oracle_threshold(alpha, mix, model, args.m, meth).c for meth in ORACLE_METHODS}
        for meth, c in stars.items():
            out.write(f"# c_star_{meth}: {sio.fmt(c)}\n")
        out.write(f"# bonferroni_power: {sio.fmt(bonferroni_power(alpha, model, args.m))}\n")
        exact = args.m <= MAX_EXACT_M and not args.no_exact
        w.writerow(["c", "expected_selected", "fwer_approx", "fwer_bound", "power", "feasible"])
        for c in grid:
            fa = fwer_approx(c, alpha, mix, model, args.m)
            fb = sio.fmt(fwer_upper_bound(c, alpha, mix, model, args.m)) if exact else ""
            pw = power_unconditional(c, alpha, mix, model, args.m, exact=exact)
            w.writerow([sio.fmt(c), sio.fmt(expected_selected(c, mix, model, args.m)), sio.fmt(fa), fb,
                        sio.fmt(pw), int(c >= stars["constraint"])])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="screenmin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, threshold=True):
        sp.add_argument("--alpha", type=float, default=0.05)
        if threshold:
            sp.add_argument("--threshold", default="default",
                            help="default | fixed:C | oracle:{constraint|first_order|product} | adaptive")
        sp.add_argument("--mix", help="PI0,PI1,PI2")
        sp.add_argument("--snr", help="S1[,S2]")
        sp.add_argument("--out", help="output path (default stdout)")

    a = sub.add_parser("analyze", help="run ScreenMin on an id,p1,p2 file")
    a.add_argument("input")
    common(a)
    a.add_argument("--bonferroni", action="store_true", help="Bonferroni on the maxima instead")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("threshold", help="compute a selection threshold")
    common(t)
    t.add_argument("--m", type=int)
    t.add_argument("--input")
    t.set_defaults(func=cmd_threshold)

    s = sub.add_parser("simulate", help="Monte Carlo FWER/power over a config grid")
    s.add_argument("config")
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    s.add_argument("--seed", help="override the config seed")
    s.add_argument("--reps", help="override the config n_reps")
    s.add_argument("--rho", help="override the config rho list")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("curves", help="FWER/power versus c, or conditional quantile versus snr")
    c.add_argument("--kind", choices=("fwer-power", "quantile"), default="fwer-power")
    common(c, threshold=False)
    c.add_argument("--m", type=int)
    c.add_argument("--grid", type=int, default=100)
    c.add_argument("--cmin", type=float)
    c.add_argument("--no-exact", action="store_true", help="skip the exact |S| distribution")
    c.add_argument("--c", default="1e-4,1e-3,1e-2", help="thresholds for --kind quantile")
    c.add_argument("--u", type=float, default=0.05)
    c.add_argument("--snr-max", type=float, default=5.0)
    c.set_defaults(func=cmd_curves)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_PARAM
    try:
        return args.func(args)
    except sio.InputError as exc:
        print(f"screenmin: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParamError as exc:
        print(f"screenmin: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except SimulationError as exc:
        print(f"screenmin: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"screenmin: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except Exception as exc:  # noqa: BLE001
        print(f"screenmin: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
