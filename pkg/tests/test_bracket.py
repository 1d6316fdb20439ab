import pytest
from hypothesis import given, settings

from combilog.bench import gen_family
from combilog.bracket import BracketAlgo, GuardExceeded, abstract, translate_classic
from combilog.corpus import closed_corpus
from combilog.machine import agrees_with_lambda, ext_eq
from combilog.syntax import S, K, I, parse, parse_comb, show, size, subterms

from strategies import closed_terms

ALGOS = list(BracketAlgo)


def test_abstract_rules():
    assert show(abstract("x", parse("x"), BracketAlgo.LEAF_K)) == "I"
    assert show(abstract("x", parse("y"), BracketAlgo.LEAF_K)) == "K y"
    assert show(abstract("x", parse("x x"), BracketAlgo.LEAF_K)) == "S I I"
    assert show(abstract("x", parse("y z"), BracketAlgo.LEAF_K)) == "S (K y) (K z)"
    assert show(abstract("x", parse("y z"), BracketAlgo.SUBTERM_K)) == "K (y z)"


def test_director_bc_on_right_occurrence():
    out = abstract("x", parse("y x"), BracketAlgo.DIRECTOR_BC)
    assert size(out) <= size(parse_comb("B y I"))
    assert ext_eq(out, parse_comb("B y I"), 1) is True


def test_director_bc_left_and_both():
    assert show(abstract("x", parse("x y"), BracketAlgo.DIRECTOR_BC)) == "C I y"
    assert show(abstract("x", parse("x x"), BracketAlgo.DIRECTOR_BC)) == "S I I"


@pytest.mark.parametrize("algo", ALGOS)
def test_translate_examples(algo):
    assert translate_classic(parse(r"\x. x"), algo) == I
    assert ext_eq(translate_classic(parse(r"\x.\y. x"), algo), K, 2) is True
    out = translate_classic(parse(r"\f.\g.\x. f x (g x)"), algo)
    assert ext_eq(out, S, 3) is True


def test_rejects_open_and_constants():
    with pytest.raises(ValueError):
        translate_classic(parse("x"), BracketAlgo.LEAF_K)
    with pytest.raises((ValueError, TypeError)):
        translate_classic(parse(r"\x. if x then x else x", booleans=True), BracketAlgo.LEAF_K)


def test_guard():
    with pytest.raises(GuardExceeded):
        translate_classic(gen_family("ApChain", 16), BracketAlgo.LEAF_K, max_nodes=1000)


@pytest.mark.parametrize("algo", ALGOS)
def test_oracle_on_seeded_corpus(algo):
    unknown = 0
    for t in closed_corpus(200, seed=7):
        try:
            comb = translate_classic(t, algo, max_nodes=250_000)
        except GuardExceeded:
            unknown += 1
            continue
        verdict = agrees_with_lambda(comb, t, 3)
        if verdict is None:
            unknown += 1
        else:
            assert verdict, show(t)
    assert unknown < 20


@settings(max_examples=60, deadline=None)
@given(closed_terms(depth=4))
def test_oracle_property(t):
    for algo in (BracketAlgo.SUBTERM_K, BracketAlgo.DIRECTOR_BC):
        assert agrees_with_lambda(translate_classic(t, algo), t, 3, 20_000) in (True, None)


@pytest.mark.parametrize("family", ["ApChain", "NestProj", "RandClosed"])
def test_size_ordering_on_families(family):
    for n in (1, 2, 4, 8):
        t = gen_family(family, n)
        leaf, sub, bc = (size(translate_classic(t, a, max_nodes=10**6)) for a in
                         (BracketAlgo.LEAF_K, BracketAlgo.SUBTERM_K, BracketAlgo.DIRECTOR_BC))
        assert bc <= sub <= leaf, (family, n, bc, sub, leaf)


def test_non_compositional_witness():
    inner = translate_classic(parse(r"\y.\z. y"), BracketAlgo.LEAF_K)
    outer = translate_classic(parse(r"\x.\y.\z. y"), BracketAlgo.LEAF_K)
    assert show(inner) == "S (K K) I"
    assert inner not in set(subterms(outer))


def test_duplicate_binders():
    t = parse(r"\x.\x. x")
    for algo in ALGOS:
        assert ext_eq(translate_classic(t, algo), parse_comb("K I"), 2) is True


def test_large_chain_does_not_overflow():
    t = gen_family("ApChain", 300)
    out = translate_classic(t, BracketAlgo.DIRECTOR_BC)
    assert size(out) > 300
