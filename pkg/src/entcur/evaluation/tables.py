"""Result files: per-run records, the aggregate text table, and curve data.

Three versioned formats:

* results data (``entcur-results v1``): comma-separated per-run rows at
  full float precision, one row per (fraction, system, seed) run;
* text table (``entcur-table v1``): aligned mean +/- std percentages per
  system across fractions, plus seen/unseen columns at the smallest
  fraction;
* curve data (``entcur-curve v1``): whitespace-separated
  ``fraction system mean std`` rows for accuracy-vs-fraction plots.

Absent values (e.g. unseen accuracy when the test split has no unseen
device) are stored as empty cells, never invented.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path

RESULTS_HEADER = "entcur-results v1"
TABLE_HEADER = "entcur-table v1"
CURVE_HEADER = "entcur-curve v1"
SYSTEMS = ("baseline", "curriculum")
_COLUMNS = ("fraction", "system", "seed", "overall", "seen", "unseen")


@dataclass(frozen=True)
class RunResult:
    """Headline accuracies of one trained run on the shared test split."""

    fraction: float
    system: str
    seed: int
    overall: float
    seen: float | None
    unseen: float | None

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError("fraction must lie in (0, 1]")


class TableFormatError(ValueError):
    pass


def _cell(value: float | None) -> str:
    return "" if value is None else repr(value)


def _uncell(text: str) -> float | None:
    return None if text == "" else float(text)


def write_results(results: list[RunResult], path: str | Path) -> None:
    if not results:
        raise ValueError("no results to write")
    with open(path, "w", newline="") as fh:
        fh.write(f"# {RESULTS_HEADER}\n")
        writer = csv.writer(fh)
        writer.writerow(_COLUMNS)
        for r in results:
            writer.writerow(
                [repr(r.fraction), r.system, r.seed, repr(r.overall), _cell(r.seen), _cell(r.unseen)]
            )


def read_results(path: str | Path) -> list[RunResult]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != f"# {RESULTS_HEADER}":
        raise TableFormatError(f"missing '{RESULTS_HEADER}' header in {path}")
    rows = list(csv.reader(lines[1:]))
    if not rows or tuple(rows[0]) != _COLUMNS:
        raise TableFormatError(f"unexpected column row in {path}")
    results = []
    for i, row in enumerate(rows[1:], start=3):
        if len(row) != len(_COLUMNS):
            raise TableFormatError(f"line {i}: expected {len(_COLUMNS)} cells, got {len(row)}")
        results.append(
            RunResult(
                fraction=float(row[0]),
                system=row[1],
                seed=int(row[2]),
                overall=float(row[3]),
                seen=_uncell(row[4]),
                unseen=_uncell(row[5]),
            )
        )
    return results


def _mean_std(values: list[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def _aggregate(
    results: list[RunResult], system: str, fraction: float, field: str
) -> tuple[float, float] | None:
    values = [
        getattr(r, field)
        for r in results
        if r.system == system and r.fraction == fraction and getattr(r, field) is not None
    ]
    if not values:
        return None
    return _mean_std(values)


def _pct(stat: tuple[float, float] | None) -> str:
    if stat is None:
        return "-"
    mean, std = stat
    return f"{100 * mean:.2f} +/- {100 * std:.2f}"


def render_table(results: list[RunResult]) -> str:
    """Aligned text table: systems as rows, fractions as columns, percent cells.

    Seen/unseen columns decompose the smallest fraction present.
    """
    if not results:
        raise ValueError("no results to render")
    fractions = sorted({r.fraction for r in results})
    smallest = fractions[0]
    pct_label = f"{100 * smallest:g}%"
    headers = ["system"] + [f"{100 * f:g}%" for f in fractions]
    headers += [f"seen ({pct_label})", f"unseen ({pct_label})"]

    rows = []
    for system in SYSTEMS:
        if not any(r.system == system for r in results):
            continue
        cells = [system]
        for f in fractions:
            cells.append(_pct(_aggregate(results, system, f, "overall")))
        cells.append(_pct(_aggregate(results, system, smallest, "seen")))
        cells.append(_pct(_aggregate(results, system, smallest, "unseen")))
        rows.append(cells)

    widths = [max(len(headers[c]), *(len(r[c]) for r in rows)) for c in range(len(headers))]
    lines = [f"# {TABLE_HEADER}"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def write_table(results: list[RunResult], path: str | Path) -> None:
    Path(path).write_text(render_table(results))


def write_curve(results: list[RunResult], path: str | Path) -> None:
    """Plot-ready accuracy-vs-fraction series, one row per (fraction, system)."""
    if not results:
        raise ValueError("no results to write")
    lines = [f"# {CURVE_HEADER}", "fraction system mean std"]
    for fraction in sorted({r.fraction for r in results}):
        for system in SYSTEMS:
            stat = _aggregate(results, system, fraction, "overall")
            if stat is None:
                continue
            mean, std = stat
            lines.append(f"{fraction!r} {system} {mean!r} {std!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_curve(path: str | Path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != f"# {CURVE_HEADER}":
        raise TableFormatError(f"missing '{CURVE_HEADER}' header in {path}")
    if len(lines) < 2 or lines[1] != "fraction system mean std":
        raise TableFormatError(f"unexpected column row in {path}")
    rows = []
    for i, line in enumerate(lines[2:], start=3):
        parts = line.split()
        if len(parts) != 4:
            raise TableFormatError(f"line {i}: expected 4 fields, got {len(parts)}")
        rows.append(
            {
                "fraction": float(parts[0]),
                "system": parts[1],
                "mean": float(parts[2]),
                "std": float(parts[3]),
            }
        )
    return rows
