import random

import pytest

from combilog.kernel import Diverged, alpha_eq, beta_normalize
from combilog.machine import ext_eq, normalize
from combilog.modal import (
    DualContext,
    ModalTypeError,
    erase_modal,
    eval_modal,
    pipeline_box,
    random_modal_term,
    typecheck_modal,
)
from combilog.syntax import (
    Arrow,
    Base,
    BoxT,
    CApp,
    FreeAtom,
    K,
    Lam,
    LetBox,
    App,
    Var,
    parse,
    parse_comb,
    parse_type,
    show,
    size,
)

A, B = Base("A"), Base("B")
EVAL_FN = r"\x:[]A. letbox u = x in u"


def M(text):
    return parse(text, "modal")


def tc(text, ctx=None, annotations=None):
    return typecheck_modal(ctx or DualContext(), M(text), annotations)


def test_eval_function_type():
    assert tc(EVAL_FN) == Arrow(BoxT(A), A)


def test_box_of_ordinary_variable_rejected():
    with pytest.raises(ModalTypeError, match="inside box"):
        tc(r"\x:A. box x")


def test_composition_type():
    ty = tc(r"\x:[](A -> B).\y:[]A. letbox u = x in letbox v = y in box (u v)")
    assert ty == parse_type("[](A -> B) -> []A -> []B")


def test_annotations_by_name():
    assert tc(r"\x. x", annotations={"x": A}) == Arrow(A, A)
    with pytest.raises(ModalTypeError):
        tc(r"\x. x")


def test_code_variables_visible_in_box():
    assert tc(r"\x:[]A. letbox u = x in box u") == Arrow(BoxT(A), BoxT(A))


def test_context_checks():
    with pytest.raises(ValueError):
        DualContext({"x": A}, {"x": A})
    assert tc("f a", DualContext(gamma={"f": Arrow(A, B), "a": A})) == B
    with pytest.raises(ModalTypeError):
        tc("f f", DualContext(gamma={"f": Arrow(A, B)}))
    with pytest.raises(ModalTypeError):
        tc("letbox u = a in u", DualContext(gamma={"a": A}))


def test_eval_examples():
    assert alpha_eq(eval_modal(M(r"letbox u = box (\y.y) in u")), M(r"\y.y"))
    assert alpha_eq(eval_modal(M(r"(\x. letbox u = x in u) (box (\y.y))")), M(r"\y.y"))
    assert show(eval_modal(M("letbox u = box f in letbox v = box a in box (u v)"))) == "box (f a)"


def test_erase_examples():
    out = erase_modal(M(r"box (\y.y)"))
    assert alpha_eq(out, M(r"\z. \y.y"))
    out = erase_modal(M("letbox u = x in u"))
    assert alpha_eq(out, App(Lam("z", App(Var("z"), Lam("i", Var("i")))), Var("x")))
    assert show(beta_normalize(erase_modal(M("letbox u = box a in u")))) == "a"


def test_erase_fresh_names_avoid_term():
    out = erase_modal(M(r"\z. box z'"))
    assert out.body.name not in ("z", "z'")


def test_pipeline_examples():
    d = pipeline_box(M(r"box (\y.y)"))
    assert d.arity == 0
    assert ext_eq(d.term, parse_comb("K I"), 2) is True
    ev = pipeline_box(M(r"\x. letbox u = x in u"))
    f = FreeAtom("f")
    assert normalize(CApp(ev.term, CApp(K, f))) == f


def test_pipeline_rejects_open():
    with pytest.raises(ValueError):
        pipeline_box(M("box x"))


def _corpus(count=100):
    return [random_modal_term(random.Random(f"modal:{i}")) for i in range(count)]


def test_corpus_well_typed_and_varied():
    terms = _corpus()
    sizes = [size(t) for t in terms]
    assert len(set(map(show, terms))) > 90
    assert max(sizes) > 30
    assert sum(isinstance(n, LetBox) for t in terms for n in _nodes(t)) > 100
    for t in terms:
        ty = typecheck_modal(DualContext(), t)
        # subject reduction, tested empirically
        assert typecheck_modal(DualContext(), eval_modal(t)) == ty


def _nodes(t):
    from combilog.syntax import subterms

    return subterms(t)


def test_simulation_on_corpus():
    for t in _corpus():
        try:
            lhs = beta_normalize(erase_modal(t))
            rhs = beta_normalize(erase_modal(eval_modal(t)))
        except Diverged:
            continue
        assert alpha_eq(lhs, rhs), show(t)


def test_erasure_linear_on_corpus():
    for t in _corpus():
        n = size(t)
        assert size(erase_modal(t)) <= 3.0 * n + 10


def test_progress_on_corpus():
    # closed well-typed terms evaluate to values: lambdas or boxes
    from combilog.syntax import Box

    for t in _corpus():
        v = eval_modal(t)
        assert isinstance(v, (Lam, Box)), show(v)
