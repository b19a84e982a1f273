"""Convergence traces, Monte-Carlo summaries and the CSV writer."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..model import to_db

CSV_HEADER = ("scenario", "filter", "run", "index", "nm_db", "ise_db", "diverged")


@dataclass
class RunTrace:
    """Linear-scale NM and squared error of one filter in one run.

    A diverged run is truncated at the step that produced non-finite
    coefficients.
    """

    filter: str
    run: int
    nm: np.ndarray
    ise: np.ndarray
    diverged: bool = False

    def __len__(self):
        return len(self.nm)


@dataclass
class ConvergenceTrace:
    scenario: str
    filters: tuple
    runs: list = field(default_factory=list)

    def for_filter(self, label):
        if label not in self.filters:
            raise KeyError(f"no filter {label!r} in trace; have {self.filters}")
        return [r for r in self.runs if r.filter == label]

    def _mean(self, label, attr):
        runs = self.for_filter(label)
        n = max((len(r) for r in runs), default=0)
        total = np.zeros(n)
        count = np.zeros(n)
        for r in runs:
            total[: len(r)] += getattr(r, attr)
            count[: len(r)] += 1
        return total / np.maximum(count, 1)

    def mean_nm(self, label):
        """NM averaged over runs in the linear domain (runs contribute while alive)."""
        return self._mean(label, "nm")

    def mean_nm_db(self, label):
        return to_db(self.mean_nm(label))

    def mean_ise_db(self, label):
        return to_db(self._mean(label, "ise"))

    def rows(self):
        """CSV rows ordered by (filter roster order, run, index)."""
        order = {f: i for i, f in enumerate(self.filters)}
        for r in sorted(self.runs, key=lambda r: (order[r.filter], r.run)):
            nm_db = to_db(r.nm)
            ise_db = to_db(r.ise)
            flag = int(r.diverged)
            for i in range(len(r)):
                yield (self.scenario, r.filter, r.run, i, float(nm_db[i]), float(ise_db[i]), flag)


def write_csv(trace, target):
    """Write ``trace`` to a path or text stream; floats use shortest round-trip repr."""
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            _write(trace, fh)
    else:
        _write(trace, target)


def _write(trace, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s, f, run, i, nm, ise, flag in trace.rows():
        w.writerow((s, f, run, i, repr(nm), repr(ise), flag))


def trace_to_csv_text(trace):
    buf = io.StringIO()
    _write(trace, buf)
    return buf.getvalue()


def steady_state(curve_db, fraction=0.1):
    """Mean of a dB curve over its final ``fraction`` (at least one point)."""
    curve_db = np.asarray(curve_db)
    if curve_db.size == 0:
        return float("nan")
    n = max(1, int(round(fraction * curve_db.size)))
    return float(np.mean(curve_db[-n:]))


def iterations_to(curve_db, threshold_db, start=0, stop=None):
    """Steps after ``start`` until the curve first reaches the threshold, or None."""
    seg = np.asarray(curve_db)[start:stop]
    hit = np.flatnonzero(seg <= threshold_db)
    return int(hit[0]) if hit.size else None


@dataclass(frozen=True)
class FilterSummary:
    filter: str
    runs: int
    diverged_runs: int
    steady_nm_db: float
    steady_ise_db: float
    iterations_to_minus_20_db: int = None


def summarize(trace):
    out = []
    for label in trace.filters:
        runs = trace.for_filter(label)
        nm_db = trace.mean_nm_db(label)
        out.append(FilterSummary(
            filter=label,
            runs=len(runs),
            diverged_runs=sum(r.diverged for r in runs),
            steady_nm_db=steady_state(nm_db),
            steady_ise_db=steady_state(trace.mean_ise_db(label)),
            iterations_to_minus_20_db=iterations_to(nm_db, -20.0),
        ))
    return out


def format_summary(summary):
    lines = [f"{'filter':<14} {'runs':>4} {'div':>4} {'NM ss [dB]':>11} {'ISE ss [dB]':>12} {'k(-20dB)':>9}"]
    for s in summary:
        k = "-" if s.iterations_to_minus_20_db is None else str(s.iterations_to_minus_20_db)
        lines.append(f"{s.filter:<14} {s.runs:>4} {s.diverged_runs:>4} "
                     f"{s.steady_nm_db:>11.2f} {s.steady_ise_db:>12.2f} {k:>9}")
    return "\n".join(lines)
