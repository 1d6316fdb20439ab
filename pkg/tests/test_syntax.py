import pytest
from hypothesis import given

from combilog.syntax import (
    App,
    Arrow,
    Base,
    Box,
    BoxT,
    CApp,
    DialectError,
    DLam,
    I,
    Idx,
    K,
    Lam,
    LetBox,
    ParseError,
    S,
    SizeMetric,
    Unbox,
    UnitT,
    Var,
    parse,
    parse_comb,
    parse_db,
    parse_type,
    show,
    size,
)

from strategies import TYPES, comb_terms, db_terms, modal_terms, plain_terms, staged_terms


def test_parse_identity():
    assert parse(r"\x. x") == Lam("x", Var("x"))


def test_parse_code_composition():
    t = parse("letbox u = x in letbox v = y in box (u v)", "modal")
    assert t == LetBox("u", Var("x"), LetBox("v", Var("y"), Box(App(Var("u"), Var("v")))))


def test_parse_capture_program():
    t = parse(r"let a = box y in box (\x.\y. (unbox a) x)", "staged")
    body = Box(Lam("x", Lam("y", App(Unbox(Var("a")), Var("x")))))
    assert t == App(Lam("a", body), Box(Var("y")))


def test_multi_binder_lambda():
    assert parse(r"\x y. y") == parse(r"\x.\y. y")


def test_print_examples():
    assert show(Lam("x", Var("x"))) == r"\x. x"
    assert show(CApp(CApp(S, K), K)) == "S K K"
    assert show(DLam(DLam(Idx(1)))) == r"\.\.1"
    assert show(parse(r"\x.\y. y x")) == r"\x.\y. y x"


def test_size_examples():
    assert size(parse(r"\x. x")) == 2
    assert size(parse_db(r"\.\.1"), SizeMetric.DB_WEIGHTED) == 4
    assert size(parse_comb("S K K")) == 5


def test_dbweighted_rejects_named():
    with pytest.raises(TypeError):
        size(parse("x"), SizeMetric.DB_WEIGHTED)


def test_dialect_gating():
    with pytest.raises(DialectError):
        parse("box x")
    with pytest.raises(DialectError):
        parse("unbox x", "modal")
    with pytest.raises(DialectError):
        parse("letbox u = x in u", "staged")
    with pytest.raises(DialectError):
        parse(r"\x:A. x")
    with pytest.raises(ParseError):
        parse("if true then x else y")
    assert parse("if true then x else y", booleans=True) is not None


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse(r"\x. (x")
    assert info.value.pos == 6


def test_types():
    assert parse_type("[]A -> A") == Arrow(BoxT(Base("A")), Base("A"))
    assert parse_type("(A -> B) -> unit") == Arrow(Arrow(Base("A"), Base("B")), UnitT())
    assert parse(r"\x:[](A -> B). x", "modal").ann == BoxT(Arrow(Base("A"), Base("B")))


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        Idx(-1)


@given(plain_terms())
def test_roundtrip_plain(t):
    assert parse(show(t)) == t


@given(modal_terms())
def test_roundtrip_modal(t):
    back = parse(show(t), "modal", booleans=True)
    assert back == t
    assert show(back) == show(t)


@given(staged_terms())
def test_roundtrip_staged(t):
    assert parse(show(t), "staged", booleans=True) == t


@given(db_terms(max_free=3))
def test_roundtrip_db(t):
    assert parse_db(show(t)) == t


@given(comb_terms())
def test_roundtrip_comb(t):
    assert parse_comb(show(t)) == t


@given(TYPES)
def test_roundtrip_types(ty):
    from combilog.syntax import show_type

    assert parse_type(show_type(ty)) == ty


@given(db_terms(max_free=4))
def test_nodecount_at_most_dbweighted(t):
    assert size(t) <= size(t, SizeMetric.DB_WEIGHTED)


@given(plain_terms(6), plain_terms(6))
def test_let_desugars(e1, e2):
    a = parse(f"let q = {show(e1)} in {show(e2)}")
    b = parse(rf"(\q. {show(e2)}) ({show(e1)})")
    assert a == b


def test_deep_comb_prints():
    t = I
    for _ in range(5000):
        t = CApp(t, K)
    assert show(t).count("K") == 5000
