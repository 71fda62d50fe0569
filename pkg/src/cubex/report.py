"""Report files: CSV grids, JSON summaries and PNG figures."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .envelope import CheckRecord, EnvelopeFit  # noqa: E402

# fixed metadata keeps PNG bytes stable between runs
_PNG_META = {"Software": None}


def to_jsonable(obj):
    """Recursively convert report values to plain JSON types.

    Fractions become "p/q" strings, complex numbers [re, im] pairs, and
    non-finite floats the strings "inf", "-inf", "nan".
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def _cell(v):
    v = to_jsonable(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return json.dumps(v)
    return "" if v is None else v


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """RFC 4180 CSV: header row, CRLF line ends, quoting only where needed."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def checks_table(records: Sequence[CheckRecord]) -> tuple[list[str], list[list]]:
    header = ["name", "observed", "threshold", "pass"]
    return header, [[r.name, r.observed, r.threshold, r.passed] for r in records]


def fits_table(fits: Sequence[EnvelopeFit]) -> tuple[list[str], list[list]]:
    header = ["name", "size", "max_ratio"]
    rows = [[f.name, s, m] for f in fits for s, m in zip(f.sizes, f.per_size_max)]
    return header, rows


# ---------------------------------------------------------------------------
# figures

def _style(ax, xlabel: str, ylabel: str, title: str):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_envelope(fit: EnvelopeFit, path: Path) -> Path:
    """Per-size maximum ratio on log-log axes with the fitted slope."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    x = np.array(fit.sizes)
    y = np.array(fit.per_size_max)
    ax.loglog(x, y, "o-", color="C0", label="max ratio")
    pos = y > 0
    if pos.sum() >= 2 and math.isfinite(fit.log_slope):
        x0, y0 = x[pos][0], y[pos][0]
        ax.loglog(x, y0 * (x / x0) ** fit.log_slope, "--", color="C1",
                  label=f"slope {fit.log_slope:.3f}")
    ax.legend(fontsize=8)
    _style(ax, "size", "ratio", f"{fit.name} ({'pass' if fit.passed else 'FAIL'})")
    return _save(fig, path)


def plot_scatter(xs, ys, path: Path, title: str, xlabel: str, ylabel: str,
                 floor: float | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.semilogy(xs, np.maximum(np.asarray(ys, dtype=float), 1e-300), ".", ms=2, color="C0")
    if floor is not None:
        ax.axhline(floor, color="C3", lw=1)
    _style(ax, xlabel, ylabel, title)
    return _save(fig, path)


def plot_bound_table(rows, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    d = [float(r.delta) for r in rows]
    ax.plot(d, [float(r.davenport) for r in rows], "s-", ms=3, label="Davenport")
    ax.plot(d, [float(r.new_bound) for r in rows], "o-", ms=3, label="new bound")
    ax.legend(fontsize=8)
    _style(ax, "delta", "lower bound for delta_3", "density lower bounds")
    return _save(fig, path)


def plot_histogram(values: dict, path: Path, title: str) -> Path:
    """Bar chart of how often each multiplicity occurs."""
    counts = np.bincount(np.fromiter(values.values(), dtype=np.int64))
    fig, ax = plt.subplots(figsize=(5, 3.6))
    k = np.flatnonzero(counts)
    ax.bar(k, counts[k], color="C0")
    ax.set_yscale("log")
    _style(ax, "multiplicity", "number of n", title)
    return _save(fig, path)


def plot_checks(records: Sequence[CheckRecord], path: Path) -> Path:
    """observed / threshold for each check on a log scale; 1 is the pass line."""
    names = [r.name for r in records]
    vals = []
    for r in records:
        t = float(r.threshold)
        vals.append(float(r.observed) / t if t and math.isfinite(t) else float("nan"))
    fig, ax = plt.subplots(figsize=(6, 0.35 * len(names) + 1.2))
    y = np.arange(len(names))
    ax.barh(y, np.maximum(np.nan_to_num(vals, nan=0.0), 1e-20), color=["C0" if r.passed else "C3" for r in records])
    ax.axvline(1.0, color="k", lw=1)
    ax.set_xscale("log")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=7)
    _style(ax, "observed / threshold", "", "checks")
    return _save(fig, path)
