"""Matrix differential operators ``sum_j d^j F_j(x)`` acting on the right.

A matrix polynomial ``P`` is acted on by ``P.D = sum_j P^{(j)} F_j``, and
products compose left to right: ``P.(D1 D2) = (P.D1).D2``.  The normal form
keeps derivative powers to the left of the coefficients, so

    (d^i F)(d^j G) = sum_k binom(j, k) d^{i+j-k} F^{(k)} G.

``ExpDiffOp`` has exponential-polynomial coefficients; it only appears
as an intermediate when computing formal W-adjoints.
"""
from __future__ import annotations

import json
import re
from typing import Iterator, Mapping

from ._grammar import ParseError
from .field import ParamContext, Scalar
from .polymat import ExpPolyMatrix, PolyMatrix, XPoly, binom, parse_xpoly

__all__ = [
    "DiffOp",
    "ExpDiffOp",
    "apply",
    "compose",
    "formal_adjoint",
    "commutator",
    "parse_op",
    "serialize_op",
    "op_to_json",
    "op_from_json",
    "OperatorFormatError",
]


class OperatorFormatError(ValueError):
    pass


class _Operator:
    _coeff_type: type = PolyMatrix

    __slots__ = ("ctx", "n", "coeffs")

    def __init__(self, ctx: ParamContext, n: int, coeffs: Mapping[int, object] | None = None):
        self.ctx = ctx
        self.n = n
        clean = {}
        for j, F in (coeffs or {}).items():
            if j < 0:
                raise ValueError("negative derivative order")
            F = self._coerce(F)
            if F.is_zero():
                continue
            clean[j] = F
        self.coeffs = dict(sorted(clean.items()))

    def _coerce(self, F):
        raise NotImplementedError

    def _zero(self):
        raise NotImplementedError

    # -- queries ------------------------------------------------------------
    @property
    def order(self) -> int:
        """Highest derivative order; -1 for the zero operator."""
        return max(self.coeffs, default=-1)

    def coeff(self, j: int):
        return self.coeffs.get(j, self._zero())

    def leading(self):
        return self.coeff(self.order) if self.coeffs else self._zero()

    def terms(self) -> Iterator[tuple[int, object]]:
        return iter(self.coeffs.items())

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, _Operator):
            return NotImplemented
        if self.n != other.n:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    # -- linear structure -------------------------------------------------------
    def _merge(self, other, sign: int):
        cls = _common_class(self, other)
        a, b = cls._promote(self), cls._promote(other)
        if a.n != b.n:
            raise ValueError(f"size mismatch {a.n} vs {b.n}")
        out = dict(a.coeffs)
        for j, G in b.coeffs.items():
            G = G if sign > 0 else -G
            out[j] = out[j] + G if j in out else G
        return cls(a.ctx, a.n, out)

    def __add__(self, other):
        if not isinstance(other, _Operator):
            return NotImplemented
        return self._merge(other, 1)

    def __sub__(self, other):
        if not isinstance(other, _Operator):
            return NotImplemented
        return self._merge(other, -1)

    def __neg__(self):
        return type(self)(self.ctx, self.n, {j: -F for j, F in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (Scalar, int)):
            return type(self)(self.ctx, self.n, {j: F * other for j, F in self.coeffs.items()})
        if isinstance(other, _Operator):
            return compose(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = type(self).identity(self.ctx, self.n)
        for _ in range(k):
            out = compose(out, self)
        return out


class DiffOp(_Operator):
    """Operator with polynomial matrix coefficients."""

    __slots__ = ()

    def _coerce(self, F):
        if isinstance(F, ExpPolyMatrix):
            F = F.to_polymatrix()
        if not isinstance(F, PolyMatrix) or F.shape != (self.n, self.n):
            raise ValueError("coefficient must be an n x n PolyMatrix")
        return F

    def _zero(self):
        return PolyMatrix.zeros(self.ctx, self.n)

    @classmethod
    def _promote(cls, op):
        if isinstance(op, ExpDiffOp):
            return op.to_diffop()
        return op

    @classmethod
    def identity(cls, ctx: ParamContext, n: int) -> "DiffOp":
        return cls(ctx, n, {0: PolyMatrix.identity(ctx, n)})

    @classmethod
    def zero(cls, ctx: ParamContext, n: int) -> "DiffOp":
        return cls(ctx, n, {})

    @classmethod
    def mult(cls, M: PolyMatrix) -> "DiffOp":
        """Multiplication operator ``P -> P M``."""
        return cls(M.ctx, M.size, {0: M})

    @classmethod
    def d(cls, ctx: ParamContext, n: int, k: int = 1) -> "DiffOp":
        return cls(ctx, n, {k: PolyMatrix.identity(ctx, n)})

    def degree_profile(self) -> dict[int, float]:
        return {j: F.degree_max() for j, F in self.coeffs.items()}

    def is_upper_triangular(self) -> bool:
        return all(F.is_upper_triangular() for F in self.coeffs.values())

    def specialize(self, num_ctx: ParamContext) -> "DiffOp":
        return DiffOp(num_ctx, self.n, {j: F.specialize(num_ctx) for j, F in self.coeffs.items()})

    def to_exp(self) -> "ExpDiffOp":
        return ExpDiffOp(self.ctx, self.n, {j: ExpPolyMatrix.from_poly(F)
                                            for j, F in self.coeffs.items()})

    def __repr__(self):
        body = " + ".join(f"d^{j}{F.to_nested_text()}" for j, F in self.coeffs.items())
        return f"DiffOp({body or '0'})"


class ExpDiffOp(_Operator):
    """Operator with exponential-polynomial matrix coefficients."""

    __slots__ = ()

    def _coerce(self, F):
        if isinstance(F, PolyMatrix):
            F = ExpPolyMatrix.from_poly(F)
        if not isinstance(F, ExpPolyMatrix) or F.n != self.n:
            raise ValueError("coefficient must be an n x n ExpPolyMatrix")
        return F

    def _zero(self):
        return ExpPolyMatrix.zeros(self.ctx, self.n)

    @classmethod
    def _promote(cls, op):
        if isinstance(op, DiffOp):
            return op.to_exp()
        return op

    @classmethod
    def identity(cls, ctx: ParamContext, n: int) -> "ExpDiffOp":
        return DiffOp.identity(ctx, n).to_exp()

    def frequencies(self) -> list[Scalar]:
        """Nonzero exponential frequencies, in canonical text order."""
        seen = {}
        for F in self.coeffs.values():
            for phi in F.nonzero_frequencies():
                seen[phi.to_text()] = phi
        return [seen[k] for k in sorted(seen)]

    def is_polynomial(self) -> bool:
        return not self.frequencies()

    def to_diffop(self) -> DiffOp:
        if not self.is_polynomial():
            raise ValueError("operator has exponential coefficients")
        return DiffOp(self.ctx, self.n, {j: F.poly_part() for j, F in self.coeffs.items()})

    def to_exp(self) -> "ExpDiffOp":
        return self

    def to_json(self) -> dict:
        return {"size": self.n,
                "terms": [{"dorder": j, "parts": F.to_json()} for j, F in self.coeffs.items()]}

    def __repr__(self):
        return f"ExpDiffOp({self.to_json()!r})"


def _common_class(a: _Operator, b: _Operator):
    if isinstance(a, ExpDiffOp) or isinstance(b, ExpDiffOp):
        return ExpDiffOp
    return DiffOp


def apply(P: PolyMatrix, D: DiffOp) -> PolyMatrix:
    """Right action ``P.D = sum_j P^{(j)} F_j``."""
    if P.shape[1] != D.n:
        raise ValueError(f"size mismatch: {P.shape} acted on by a {D.n}x{D.n} operator")
    out = PolyMatrix.zeros(P.ctx, P.shape[0], D.n)
    deriv = P
    k = 0
    for j, F in D.terms():
        while k < j:
            deriv = deriv.derivative()
            k += 1
        if deriv.is_zero():
            break
        out = out + deriv * F
    return out


def compose(D1: _Operator, D2: _Operator) -> _Operator:
    """The product ``D1 D2`` (apply D1 first, then D2)."""
    if D1.n != D2.n:
        raise ValueError(f"size mismatch {D1.n} vs {D2.n}")
    cls = _common_class(D1, D2)
    A, B = cls._promote(D1), cls._promote(D2)
    out: dict[int, object] = {}
    for i, F in A.terms():
        derivs = [F]
        for j, G in B.terms():
            for k in range(j + 1):
                while len(derivs) <= k:
                    derivs.append(derivs[-1].derivative())
                Fk = derivs[k]
                if Fk.is_zero():
                    break
                term = Fk * G
                c = binom(j, k)
                if c != 1:
                    term = term * c
                order = i + j - k
                out[order] = out[order] + term if order in out else term
    return cls(A.ctx, A.n, out)


def formal_adjoint(D: _Operator) -> _Operator:
    """Involution fixing transposition and sending d to -d.

    Coefficients: ``G_m = sum_{j>=m} (-1)^j binom(j, m) (F_j^T)^{(j-m)}``.
    """
    out: dict[int, object] = {}
    for j, F in D.terms():
        Ft = F.transpose()
        deriv = Ft
        for m in range(j, -1, -1):
            c = binom(j, m) * (-1 if j % 2 else 1)
            term = deriv * c
            out[m] = out[m] + term if m in out else term
            deriv = deriv.derivative()
            if deriv.is_zero():
                break
    return type(D)(D.ctx, D.n, out)


def commutator(D1: _Operator, D2: _Operator) -> _Operator:
    return compose(D1, D2) - compose(D2, D1)


# -- JSON -----------------------------------------------------------------------

def op_to_json(D: DiffOp) -> dict:
    return {
        "size": D.n,
        "params": list(D.ctx.symbols),
        "terms": [{"dorder": j, "matrix": F.to_nested_text()} for j, F in D.terms()],
    }


def serialize_op(D: DiffOp) -> str:
    return json.dumps(op_to_json(D), indent=2, sort_keys=True) + "\n"


def op_from_json(obj: dict, ctx: ParamContext | None = None) -> DiffOp:
    if not isinstance(obj, dict):
        raise OperatorFormatError("operator file must be a JSON object")
    try:
        n = obj["size"]
        terms = obj.get("terms", [])
    except KeyError as exc:
        raise OperatorFormatError(f"missing key {exc}") from None
    if not isinstance(n, int) or n < 1:
        raise OperatorFormatError(f"bad size {n!r}")
    params = obj.get("params", [])
    if ctx is None:
        ctx = ParamContext(tuple(params))
    else:
        undeclared = [p for p in params if p not in ctx.symbols]
        if undeclared:
            raise OperatorFormatError(f"parameters {undeclared} not in context {ctx.symbols}")
    # identifiers must be among the file's declared params (when it declares any)
    declared = set(params) if params else set(ctx.symbols)
    coeffs: dict[int, PolyMatrix] = {}
    for t_index, term in enumerate(terms):
        j = term.get("dorder")
        rows = term.get("matrix")
        if not isinstance(j, int) or j < 0:
            raise OperatorFormatError(f"term {t_index}: bad dorder {j!r}")
        if not isinstance(rows, list) or len(rows) != n or any(
                not isinstance(r, list) or len(r) != n for r in rows):
            raise OperatorFormatError(f"term {t_index}: matrix is not {n}x{n}")
        entries = []
        for r_i, row in enumerate(rows):
            out_row = []
            for c_i, text in enumerate(row):
                try:
                    p = parse_xpoly(str(text), ctx)
                except ParseError as exc:
                    raise OperatorFormatError(
                        f"term {t_index}, entry ({r_i},{c_i}): {exc}") from exc
                _check_declared(str(text), declared, t_index, r_i, c_i)
                out_row.append(p)
            entries.append(out_row)
        F = PolyMatrix(ctx, entries)
        coeffs[j] = coeffs[j] + F if j in coeffs else F
    return DiffOp(ctx, n, coeffs)


def _check_declared(text, declared, t_index, r_i, c_i):
    for ident in re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text):
        if ident != "x" and ident not in declared:
            raise OperatorFormatError(
                f"term {t_index}, entry ({r_i},{c_i}): undeclared symbol {ident!r}")


def parse_op(text: str, ctx: ParamContext | None = None) -> DiffOp:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperatorFormatError(
            f"JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return op_from_json(obj, ctx)

