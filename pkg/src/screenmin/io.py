"""Reading p-value matrices, writing and re-reading analysis tables, sim configs."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .screening import HypothesisMix
from .testing import PValueMatrix, TestResult
from .thresholds import ThresholdResult


class InputError(ValueError):
    """Malformed input file; ``lineno`` is 1-based when known."""

    def __init__(self, msg: str, lineno: int | None = None):
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)
        self.lineno = lineno


def fmt(x: float) -> str:
    """17 significant digits; round-trips any double."""
    return format(float(x), ".17g")


def _data_lines(text: str) -> Iterable[tuple[int, str]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, line


def parse_pmatrix(text: str) -> PValueMatrix:
    """Parse ``id,p1,p2`` text (comma or tab separated, ``#`` comments)."""
    lines = list(_data_lines(text))
    if not lines:
        raise InputError("no header line")
    hlineno, header = lines[0]
    delim = "\t" if "\t" in header else ","
    cols = [c.strip().lower() for c in next(csv.reader([header], delimiter=delim))]
    if cols[:3] != ["id", "p1", "p2"]:
        raise InputError(f"expected header id,p1,p2, got {header.strip()!r}", hlineno)
    if len(lines) == 1:
        raise InputError("empty data section", hlineno)
    ids, p = [], []
    for lineno, line in lines[1:]:
        fields = next(csv.reader([line], delimiter=delim))
        if len(fields) < 3 or any(f.strip() == "" for f in fields[:3]):
            raise InputError("missing value", lineno)
        try:
            p1, p2 = float(fields[1]), float(fields[2])
        except ValueError:
            raise InputError(f"not a number in {line.strip()!r}", lineno) from None
        if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
            raise InputError("p-values must lie in [0, 1]", lineno)
        ids.append(fields[0].strip())
        p.append((p1, p2))
    return PValueMatrix(np.array(p), ids=ids)


def read_pmatrix(path) -> PValueMatrix:
    return parse_pmatrix(Path(path).read_text())


def load_navy() -> PValueMatrix:
    """Selected pairs of the Navy adenoma analysis, padded to m = 149 with filler rows."""
    text = resources.files("screenmin").joinpath("data/navy_table1.csv").read_text()
    return parse_pmatrix(text)


def write_analysis(out: TextIO, matrix: PValueMatrix, result: TestResult, spec_label: str) -> None:
    thr = result.threshold
    header = {
        "threshold_spec": spec_label,
        "threshold_method": thr.method,
        "threshold_c": fmt(thr.c),
        "testing_threshold": fmt(result.testing_threshold),
        "alpha": fmt(result.alpha),
        "m": str(matrix.m),
        "n_selected": str(result.n_selected),
        "n_rejected": str(result.n_rejected),
        "diagnostics": json.dumps(thr.diagnostics, sort_keys=True),
    }
    for k, v in header.items():
        out.write(f"# {k}: {v}\n")
    ids = matrix.ids or [str(i + 1) for i in range(matrix.m)]
    sel = np.zeros(matrix.m, dtype=int)
    sel[result.selected] = 1
    rej = np.zeros(matrix.m, dtype=int)
    rej[result.rejected] = 1
    rej_adj = np.zeros(matrix.m, dtype=int)
    rej_adj[result.rejected_adjusted] = 1
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", "p1", "p2", "min", "max", "selected", "adjusted", "rejected", "rejected_adjusted"])
    pmin, pmax = matrix.pmin, matrix.pmax
    for i in range(matrix.m):
        w.writerow([ids[i], fmt(matrix.p[i, 0]), fmt(matrix.p[i, 1]), fmt(pmin[i]), fmt(pmax[i]),
                    sel[i], fmt(result.adjusted[i]), rej[i], rej_adj[i]])


def read_analysis(text: str) -> tuple[dict, PValueMatrix, TestResult]:
    """Inverse of :func:`write_analysis`."""
    header, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            header[key] = val
        elif line.strip():
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    p = np.array([(float(r["p1"]), float(r["p2"])) for r in rows])
    matrix = PValueMatrix(p, ids=[r["id"] for r in rows])
    flag = lambda key: np.array([i for i, r in enumerate(rows) if r[key] == "1"], dtype=int)  # noqa: E731
    thr = ThresholdResult(float(header["threshold_c"]), header["threshold_method"],
                          json.loads(header["diagnostics"]))
    result = TestResult(
        threshold=thr,
        selected=flag("selected"),
        adjusted=np.array([float(r["adjusted"]) for r in rows]),
        rejected=flag("rejected"),
        rejected_adjusted=flag("rejected_adjusted"),
        testing_threshold=float(header["testing_threshold"]),
        alpha=float(header["alpha"]),
    )
    return header, matrix, result


# -- simulation config ------------------------------------------------------

GRID_KEYS = ("m", "pi1", "pi2", "snr1", "snr2", "rho")
SCALAR_KEYS = ("n_reps", "alpha", "seed", "procedures", "oracle_method", "fixed_c", "random_side")


def parse_config(text: str) -> dict:
    """Flat ``key = value`` text; comma-separated values make a list."""
    cfg = {}
    for lineno, line in _data_lines(text):
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise InputError(f"expected key = value, got {line.strip()!r}", lineno)
        if key not in GRID_KEYS + SCALAR_KEYS:
            raise InputError(f"unknown key {key!r}", lineno)
        cfg[key] = [v.strip() for v in val.split(",") if v.strip()]
    return cfg


def _num(v: str, cast=float):
    try:
        return cast(v)
    except ValueError:
        raise InputError(f"not a number: {v!r}") from None


def expand_config(cfg: dict) -> list[dict]:
    """Cartesian grid of SimConfig keyword arguments."""
    from .simulation import DEFAULT_PROCEDURES

    for key in ("m", "pi1", "pi2", "snr1"):
        if key not in cfg:
            raise InputError(f"missing key {key!r}")
    grids = {
        "m": [_num(v, int) for v in cfg["m"]],
        "pi1": [_num(v) for v in cfg["pi1"]],
        "pi2": [_num(v) for v in cfg["pi2"]],
        "snr1": [_num(v) for v in cfg["snr1"]],
        "snr2": [None if v.lower() in ("none", "equal") else _num(v) for v in cfg.get("snr2", ["none"])],
        "rho": [_num(v) for v in cfg.get("rho", ["0"])],
    }
    common = {
        "n_reps": _num(cfg.get("n_reps", ["1000"])[0], int),
        "alpha": _num(cfg.get("alpha", ["0.05"])[0]),
        "seed": _num(cfg.get("seed", ["0"])[0], int),
        "procedures": tuple(cfg.get("procedures", DEFAULT_PROCEDURES)),
        "oracle_method": cfg.get("oracle_method", ["constraint"])[0],
        "random_side": cfg.get("random_side", ["false"])[0].lower() in ("1", "true", "yes"),
    }
    if "fixed_c" in cfg:
        common["fixed_c"] = _num(cfg["fixed_c"][0])
    cells = []
    for m, pi1, pi2, snr1, snr2, rho in itertools.product(*grids.values()):
        pi0 = 1.0 - pi1 - pi2
        if pi0 < -1e-12:
            raise InputError(f"pi1 + pi2 exceeds 1 ({pi1} + {pi2})")
        mix = HypothesisMix(max(pi0, 0.0), pi1, pi2)
        cells.append(dict(m=m, mix=mix, snr1=snr1, snr2=snr2, rho=rho, **common))
    return cells


SIM_COLUMNS = ("m", "pi0", "pi1", "pi2", "snr1", "snr2", "rho", "n_reps", "alpha", "seed",
               "oracle_method", "fixed_c", "random_side", "procedure", "threshold",
               "fwer", "fwer_se", "power", "power_se")


def sim_row_values(row: dict) -> list[str]:
    out = []
    for key in SIM_COLUMNS:
        v = row.get(key)
        if v is None or (isinstance(v, float) and math.isnan(v)):
            out.append("")
        elif isinstance(v, bool):
            out.append(str(v).lower())
        elif isinstance(v, float):
            out.append(fmt(v))
        else:
            out.append(str(v))
    return out
