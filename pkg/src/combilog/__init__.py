"""Lambda calculus, combinator translations, modal and staged code."""

from .bracket import BracketAlgo, GuardExceeded, abstract, translate_classic
from .kernel import (
    Diverged,
    alpha_eq,
    beta_normalize,
    free_vars,
    from_debruijn,
    normal_form,
    subst_avoiding,
    subst_capturing,
    to_debruijn,
)
from .kiselyov import Denotation, combine_optimized, combine_reference, translate_kiselyov
from .machine import ext_eq, normalize, reduce_step
from .modal import DualContext, ModalTypeError, erase_modal, eval_modal, typecheck_modal
from .staged import (
    build_permuter,
    canonical_order,
    code_fv,
    denote_all_orders,
    denote_canonical,
    eval_staged,
    splice_adapt,
)
from .syntax import ParseError, SizeMetric, parse, parse_comb, parse_db, parse_type, show, size

__version__ = "0.1.0"

__all__ = [
    "abstract",
    "alpha_eq",
    "beta_normalize",
    "BracketAlgo",
    "build_permuter",
    "canonical_order",
    "code_fv",
    "combine_optimized",
    "combine_reference",
    "Denotation",
    "denote_all_orders",
    "denote_canonical",
    "Diverged",
    "DualContext",
    "erase_modal",
    "eval_modal",
    "eval_staged",
    "ext_eq",
    "free_vars",
    "from_debruijn",
    "GuardExceeded",
    "ModalTypeError",
    "normal_form",
    "normalize",
    "parse",
    "parse_comb",
    "parse_db",
    "parse_type",
    "ParseError",
    "reduce_step",
    "show",
    "size",
    "SizeMetric",
    "splice_adapt",
    "subst_avoiding",
    "subst_capturing",
    "to_debruijn",
    "translate_classic",
    "translate_kiselyov",
    "typecheck_modal",
]
