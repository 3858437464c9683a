"""Shipped weights and operators, addressed as ``builtin:<name>``."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .diffop import DiffOp, parse_op
from .field import ParamContext
from .polymat import PolyMatrix, parse_xpoly
from .weight import Weight, parse_weight

__all__ = ["context_2x2", "context_3x3", "cg2x2", "wtilde", "ex3x3", "builtin_weight",
           "builtin_operator", "load_weight", "load_operator", "WEIGHTS", "OPERATORS"]

WEIGHTS = ("cg2x2", "wtilde", "ex3x3")
OPERATORS = ("d_cg2x2", "dtilde", "dtilde2", "dtilde2_conjugated", "lower_left_unit",
             "d_cg2x2_perturbed", "d_3x3")


@lru_cache(maxsize=None)
def context_2x2() -> ParamContext:
    return ParamContext(("a", "b", "E"), (("E", "b"),))


@lru_cache(maxsize=None)
def context_3x3() -> ParamContext:
    return ParamContext(("a1", "a2", "b1", "b2", "E1", "E2"), (("E1", "b1"), ("E2", "b2")))


def _matrix(ctx, rows):
    return PolyMatrix(ctx, [[parse_xpoly(e, ctx) for e in row] for row in rows])


@lru_cache(maxsize=None)
def cg2x2() -> Weight:
    ctx = context_2x2()
    return Weight("cg2x2", (ctx.sym("b"), ctx.zero), _matrix(ctx, [["1", "a*x"], ["0", "1"]]))


@lru_cache(maxsize=None)
def wtilde() -> Weight:
    # shares the (a, b, E) context so operators move freely between the two weights
    ctx = context_2x2()
    return Weight("wtilde", (ctx.sym("b"), ctx.zero), PolyMatrix.identity(ctx, 2))


@lru_cache(maxsize=None)
def ex3x3() -> Weight:
    ctx = context_3x3()
    T = _matrix(ctx, [["1", "a1*x", "0"], ["0", "1", "0"], ["0", "a2*x", "1"]])
    return Weight("ex3x3", (ctx.zero, ctx.sym("b1"), ctx.sym("b2")), T)


def builtin_weight(name: str) -> Weight:
    table = {"cg2x2": cg2x2, "wtilde": wtilde, "ex3x3": ex3x3}
    if name not in table:
        raise KeyError(f"unknown builtin weight {name!r}; choose from {', '.join(WEIGHTS)}")
    return table[name]()


def _data_text(fname: str) -> str:
    return resources.files("matbochner").joinpath("data", fname).read_text()


@lru_cache(maxsize=None)
def builtin_operator(name: str) -> DiffOp:
    if name not in OPERATORS:
        raise KeyError(f"unknown builtin operator {name!r}; choose from {', '.join(OPERATORS)}")
    ctx = context_3x3() if name == "d_3x3" else context_2x2()
    return parse_op(_data_text(name + ".json"), ctx)


def load_weight(selector: str) -> Weight:
    """``builtin:<name>`` or a path to a weight JSON file."""
    if selector.startswith("builtin:"):
        return builtin_weight(selector.split(":", 1)[1])
    return parse_weight(Path(selector).read_text())


def load_operator(selector: str, ctx: ParamContext | None = None) -> DiffOp:
    """``builtin:<name>``, a bare builtin file name, or a path to an operator file."""
    if selector.startswith("builtin:"):
        return builtin_operator(selector.split(":", 1)[1].removesuffix(".json"))
    path = Path(selector)
    if not path.exists() and path.stem in OPERATORS and path.name == selector:
        return builtin_operator(path.stem)
    return parse_op(path.read_text(), ctx)
