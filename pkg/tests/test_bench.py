import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from combilog.bench import (
    CSV_HEADER,
    fit_loglog,
    gen_family,
    records_csv,
    run_growth,
    slopes_csv,
    translate_size,
)
from combilog.bracket import BracketAlgo, translate_classic
from combilog.syntax import SizeMetric, show, size

GOLDEN = Path(__file__).parent / "golden"


def test_families():
    assert show(gen_family("ApChain", 1)) == r"\x1. x1"
    assert show(gen_family("NestProj", 3)) == r"\x1.\x2.\x3. x3"
    assert show(gen_family("ApChain", 3)) == r"\x1.\x2.\x3. x1 x2 x3"
    with pytest.raises(ValueError):
        gen_family("ApChain", 0)
    with pytest.raises(ValueError):
        gen_family("Nope", 2)


def test_randclosed_golden():
    expected = (GOLDEN / "randclosed_10_42.txt").read_text().strip()
    assert show(gen_family("RandClosed", 10, 42)) == expected
    assert show(gen_family("RandClosed", 10, 42)) == show(gen_family("RandClosed", 10, 42))


@pytest.mark.parametrize("n", [1, 5, 10, 20])
def test_randclosed_internal_nodes(n):
    t = gen_family("RandClosed", n, 3)
    leaves = sum(1 for _ in _leaves(t))
    assert size(t) - leaves == n


def _leaves(t):
    from combilog.syntax import Var, subterms

    return (s for s in subterms(t) if isinstance(s, Var))


def test_record_matches_translation():
    records, _ = run_growth(["ApChain"], [1], ["leafk"])
    (rec,) = [r for r in records if r.algorithm == "leafk"]
    assert rec.value == size(translate_classic(gen_family("ApChain", 1), BracketAlgo.LEAF_K))
    assert rec.metric == "NodeCount"


def test_guard_marks_record():
    records, fits = run_growth(["ApChain"], [2, 4, 16], ["leafk"], max_nodes=5000)
    na = [r for r in records if r.algorithm == "leafk" and r.value is None]
    assert [r.n for r in na] == [16]
    assert "ApChain,16,leafk,NodeCount,NA" in records_csv(records)
    assert fits[0].points == 2


@given(st.floats(0.5, 3.5), st.floats(0.1, 10.0))
def test_fitter_recovers_exponent(k, c):
    xs = [8, 16, 32, 64, 128]
    slope, intercept, r2 = fit_loglog(xs, [c * x ** k for x in xs])
    assert abs(slope - k) <= 0.01
    assert abs(intercept - math.log(c)) < 1e-6
    assert r2 > 0.999


def test_fitter_constant_data():
    slope, _, r2 = fit_loglog([1, 2, 4], [5, 5, 5])
    assert slope == 0 and r2 == 1.0


def test_csv_reproducible_and_sorted():
    a = records_csv(run_growth(["RandClosed", "ApChain"], [4, 2, 8], seed=5)[0])
    b = records_csv(run_growth(["ApChain", "RandClosed"], [8, 4, 2], seed=5)[0])
    assert a == b
    lines = a.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert "\r" not in a
    keys = [(row[0], int(row[1]), row[2]) for row in (l.split(",") for l in lines[1:])]
    assert keys == sorted(keys)


def test_box_pipeline_and_kiselyov_sizes():
    t = gen_family("ApChain", 4)
    assert translate_size(t, "kiselyov") <= translate_size(t, "kiselyov-ref")
    assert translate_size(t, "box-pipeline") > 0


def test_growth_separation_direction():
    _, fits = run_growth(["ApChain"], [8, 16, 32, 64], ["subtermk", "bc"])
    by = {f.algorithm: f for f in fits}
    assert by["bc"].slope < by["subtermk"].slope


def test_slopes_csv():
    _, fits = run_growth(["NestProj"], [2, 4, 8], ["kiselyov"], SizeMetric.DB_WEIGHTED)
    text = slopes_csv(fits)
    assert text.splitlines()[0] == "family,algorithm,metric,slope,intercept,r2,points"
    assert "NestProj,kiselyov,DbWeighted" in text
