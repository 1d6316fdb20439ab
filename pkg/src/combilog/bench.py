"""Benchmark families and term-size growth measurements."""

from __future__ import annotations

import csv
import io
import math
import random
import statistics
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .bracket import BracketAlgo, GuardExceeded, translate_classic
from .corpus import random_closed
from .kernel import to_debruijn
from .kiselyov import translate_kiselyov
from .modal import pipeline_box
from .syntax import Box, SizeMetric, Var, app, lams, size

FAMILIES = ("ApChain", "NestProj", "RandClosed")
ALGORITHMS = ("leafk", "subtermk", "bc", "kiselyov-ref", "kiselyov", "box-pipeline")
CSV_HEADER = ("family", "n", "algorithm", "metric", "value")
DEFAULT_MAX_NODES = 250_000


def gen_family(family: str, n: int, seed: int = 42):
    if n < 1:
        raise ValueError("n must be at least 1")
    names = [f"x{i}" for i in range(1, n + 1)]
    if family == "ApChain":
        return lams(names, app(*(Var(v) for v in names)))
    if family == "NestProj":
        return lams(names, Var(names[-1]))
    if family == "RandClosed":
        return random_closed(n, random.Random(f"RandClosed:{n}:{seed}"))
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class GrowthRecord:
    family: str
    n: int
    algorithm: str
    metric: str
    value: Optional[int]   # None when a guard stopped the translation

    def row(self):
        return (self.family, str(self.n), self.algorithm, self.metric,
                "NA" if self.value is None else str(self.value))


@dataclass(frozen=True)
class SlopeFit:
    family: str
    algorithm: str
    metric: str
    slope: float
    intercept: float
    r2: float
    points: int


def translate_size(term, algorithm: str, max_nodes: int = DEFAULT_MAX_NODES) -> int:
    if algorithm in ("leafk", "subtermk", "bc"):
        return size(translate_classic(term, BracketAlgo(algorithm), max_nodes=max_nodes))
    if algorithm in ("kiselyov", "kiselyov-ref"):
        d = translate_kiselyov(to_debruijn(term, []), optimized=algorithm == "kiselyov")
        return size(d.term)
    if algorithm == "box-pipeline":
        return size(pipeline_box(Box(term)).term)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def input_size(term, metric: SizeMetric) -> int:
    if SizeMetric(metric) is SizeMetric.DB_WEIGHTED:
        return size(to_debruijn(term, []), SizeMetric.DB_WEIGHTED)
    return size(term)


def fit_loglog(xs: Sequence[float], ys: Sequence[float]):
    """Least-squares slope of log(y) on log(x); returns (slope, intercept, r2)."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    slope, intercept = statistics.linear_regression(lx, ly)
    if len(set(ly)) == 1:
        return slope, intercept, 1.0
    r = statistics.correlation(lx, ly)
    return slope, intercept, r * r


def run_growth(
    families: Iterable[str],
    ns: Iterable[int],
    algorithms: Iterable[str] = ALGORITHMS,
    metric: SizeMetric = SizeMetric.NODE_COUNT,
    seed: int = 42,
    max_nodes: int = DEFAULT_MAX_NODES,
):
    """Translate every instance with every algorithm.

    Each (family, n) yields one ``input`` record (input size under
    ``metric``) plus one NodeCount record per algorithm.  Slopes are fitted
    per (family, algorithm) over the instances that fit in ``max_nodes``.
    """
    metric = SizeMetric(metric)
    records = []
    for family in families:
        for n in ns:
            term = gen_family(family, n, seed)
            records.append(GrowthRecord(family, n, "input", metric.value, input_size(term, metric)))
            for algo in algorithms:
                try:
                    value = translate_size(term, algo, max_nodes)
                except (GuardExceeded, RecursionError):
                    value = None
                records.append(GrowthRecord(family, n, algo, SizeMetric.NODE_COUNT.value, value))
    records.sort(key=lambda r: (r.family, r.n, r.algorithm))
    return records, fit_slopes(records)


def fit_slopes(records) -> list[SlopeFit]:
    inputs = {(r.family, r.n): r for r in records if r.algorithm == "input"}
    groups: dict = {}
    for r in records:
        if r.algorithm != "input" and r.value is not None:
            groups.setdefault((r.family, r.algorithm), []).append(r)
    fits = []
    for (family, algo), rs in sorted(groups.items()):
        rs = [r for r in rs if (family, r.n) in inputs]
        if len({inputs[(family, r.n)].value for r in rs}) < 2:
            continue
        xs = [inputs[(family, r.n)].value for r in rs]
        slope, intercept, r2 = fit_loglog(xs, [r.value for r in rs])
        fits.append(SlopeFit(family, algo, inputs[(family, rs[0].n)].metric, slope, intercept, r2, len(rs)))
    return fits


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def slopes_csv(fits) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("family", "algorithm", "metric", "slope", "intercept", "r2", "points"))
    for f in fits:
        w.writerow((f.family, f.algorithm, f.metric, f"{f.slope:.6f}", f"{f.intercept:.6f}",
                    f"{f.r2:.6f}", f.points))
    return buf.getvalue()
