"""Coefficient field: rational functions in declared parameter symbols.

Exact scalars are reduced fractions of sparse multivariate polynomials over
the rationals (graded-lex monomial order).  Sparse polynomial arithmetic and
GCDs come from python-flint (``fmpq_mpoly``); this module fixes the canonical
form (coprime numerator and denominator, denominator with leading coefficient
1), the context rules and the bridge to floating point.

Symbols named in ``ParamContext.exp_defs`` (conventionally ``E``, ``E1``,
...) are treated as independent indeterminates in exact arithmetic.  Their
defining relation ``E = exp(c**2)`` is used only when specializing to floats.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from flint import fmpq, fmpq_mpoly_ctx

from ._grammar import ParseError, parse_expression

__all__ = [
    "FieldError",
    "ModeMismatchError",
    "UnboundSymbolError",
    "ParamContext",
    "Scalar",
    "ParseError",
    "parse_scalar",
    "specialize",
    "random_rational_sample",
    "scalar_arith",
]

DEFAULT_ZERO_TOL = 1e-9


class FieldError(ValueError):
    pass


class ModeMismatchError(FieldError):
    pass


class UnboundSymbolError(FieldError):
    pass


@dataclass(frozen=True)
class ParamContext:
    """Declared parameter symbols plus optional numeric bindings.

    ``exp_defs`` maps an exponential symbol to the text of the shift ``c``
    it stands for, e.g. ``{"E": "b"}`` meaning ``E = exp(b**2)``.  A context
    with ``numeric_bindings`` set produces numeric-mode scalars.
    """

    symbols: tuple[str, ...]
    exp_defs: tuple[tuple[str, str], ...] = ()
    numeric_bindings: tuple[tuple[str, float], ...] | None = None
    zero_tol: float = DEFAULT_ZERO_TOL
    _field: object = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        syms = tuple(self.symbols)
        if len(set(syms)) != len(syms):
            raise FieldError(f"duplicate symbol names in {syms}")
        if "x" in syms or "n" in syms:
            raise FieldError("'x' and 'n' are reserved for polynomial variables")
        object.__setattr__(self, "symbols", syms)
        if isinstance(self.exp_defs, Mapping):
            object.__setattr__(self, "exp_defs", tuple(self.exp_defs.items()))
        for name, _ in self.exp_defs:
            if name not in syms:
                raise FieldError(f"exponential symbol {name!r} is not declared")
        if isinstance(self.numeric_bindings, Mapping):
            object.__setattr__(self, "numeric_bindings",
                               tuple(sorted(self.numeric_bindings.items())))
        # 'deglex' is flint's name for graded lexicographic order
        object.__setattr__(self, "_field", fmpq_mpoly_ctx.get(syms, "deglex"))

    # -- construction ---------------------------------------------------
    @property
    def mode(self) -> str:
        return "exact" if self.numeric_bindings is None else "numeric"

    @property
    def exp_symbols(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.exp_defs)

    def exact(self) -> "ParamContext":
        if self.numeric_bindings is None:
            return self
        return ParamContext(self.symbols, self.exp_defs)

    def numeric(self, bindings: Mapping[str, float], zero_tol: float = DEFAULT_ZERO_TOL
                ) -> "ParamContext":
        """Numeric-mode twin of this context; E-symbols are filled from ``exp_defs``."""
        return ParamContext(self.symbols, self.exp_defs,
                            numeric_bindings=self._complete_bindings(bindings),
                            zero_tol=zero_tol)

    def _complete_bindings(self, bindings: Mapping[str, float]) -> dict[str, float]:
        values = {k: float(v) for k, v in bindings.items()}
        unknown = set(values) - set(self.symbols)
        if unknown:
            raise UnboundSymbolError(f"bindings for undeclared symbols {sorted(unknown)}")
        base = ParamContext(self.symbols, self.exp_defs)
        for name, shift_text in self.exp_defs:
            shift = parse_scalar(shift_text, base)
            free = [s for s in shift.free_symbols() if s not in values]
            if free:
                raise UnboundSymbolError(f"cannot evaluate {name} = exp(({shift_text})^2): "
                                         f"unbound {free}")
            c = _eval_exact_as_float(shift, values)
            e_val = math.exp(c * c)
            if name in values and not math.isclose(values[name], e_val, rel_tol=1e-12):
                raise FieldError(f"{name}={values[name]} inconsistent with exp(({shift_text})^2)"
                                 f"={e_val}")
            values[name] = e_val
        missing = [s for s in self.symbols if s not in values]
        if missing:
            raise UnboundSymbolError(f"unbound symbols {missing}")
        return values

    @property
    def bindings(self) -> dict[str, float]:
        return dict(self.numeric_bindings or ())

    def const(self, value: Union[int, Fraction, float, "Scalar"]) -> "Scalar":
        if isinstance(value, Scalar):
            if value.ctx is self or value.ctx == self:
                return value
            raise ModeMismatchError("scalar belongs to a different context")
        if self.numeric_bindings is not None:
            return Scalar(self, float(value))
        if isinstance(value, float):
            raise FieldError("floats are not exact scalars; use Fraction")
        if isinstance(value, Fraction):
            value = fmpq(value.numerator, value.denominator)
        elif not isinstance(value, int):
            raise FieldError(f"cannot make a scalar from {value!r}")
        R = self._field
        return Scalar._raw(self, R.constant(value), R.constant(1))

    def sym(self, name: str) -> "Scalar":
        if name not in self.symbols:
            raise UnboundSymbolError(f"undeclared symbol {name!r}")
        if self.numeric_bindings is not None:
            return Scalar(self, dict(self.numeric_bindings)[name])
        R = self._field
        return Scalar._raw(self, R.gens()[self.symbols.index(name)], R.constant(1))

    def syms(self, *names: str) -> tuple["Scalar", ...]:
        return tuple(self.sym(n) for n in names)

    @property
    def zero(self) -> "Scalar":
        return self.const(0)

    @property
    def one(self) -> "Scalar":
        return self.const(1)

    def parse(self, text: str) -> "Scalar":
        return parse_scalar(text, self)

    def exp_factor(self, shift: "Scalar") -> "Scalar":
        """The scalar standing for ``exp(shift**2)``: 1 for a zero shift."""
        if shift.is_zero():
            return self.one
        exact = self.exact()
        target = shift if shift.ctx.mode == "exact" else None
        for name, shift_text in self.exp_defs:
            cand = parse_scalar(shift_text, exact)
            if target is not None:
                if cand == target or cand == -target:
                    return self.sym(name)
            elif math.isclose(specialize(cand, self), shift.value, rel_tol=1e-12):
                return self.sym(name)
        raise FieldError(f"no exponential symbol declared for exp(({shift})^2)")


Number = Union[int, Fraction]


class Scalar:
    """Immutable element of the coefficient field (exact or numeric)."""

    __slots__ = ("ctx", "_v")

    def __init__(self, ctx: ParamContext, value):
        """``value`` is a float (numeric mode) or a ``(numerator, denominator)`` pair."""
        self.ctx = ctx
        if ctx.numeric_bindings is None:
            value = _reduce(*value)
        self._v = value

    @classmethod
    def _raw(cls, ctx, num, den=None):
        s = cls.__new__(cls)
        s.ctx = ctx
        s._v = (num, den) if den is not None else num
        return s

    # -- helpers --------------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                if other.ctx.mode != self.ctx.mode:
                    raise ModeMismatchError(f"{self.ctx.mode} vs {other.ctx.mode} scalar")
                raise ModeMismatchError("scalars from different parameter contexts")
            return other
        if isinstance(other, (int, Fraction)) or (isinstance(other, float)
                                                  and self.ctx.mode == "numeric"):
            return self.ctx.const(other)
        return NotImplemented

    @property
    def mode(self) -> str:
        return self.ctx.mode

    @property
    def value(self):
        """The payload: ``(numerator, denominator)`` (exact) or a float (numeric)."""
        return self._v

    @property
    def numer(self):
        return self._v[0]

    @property
    def denom(self):
        return self._v[1]

    def size(self) -> int:
        """Term count of numerator plus denominator (pivot cost for elimination)."""
        if self.ctx.numeric_bindings is not None:
            return 1
        return len(self._v[0]) + len(self._v[1])

    def is_zero(self) -> bool:
        if self.ctx.numeric_bindings is None:
            return self._v[0].is_zero()
        return abs(self._v) <= self.ctx.zero_tol

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_constant(self) -> bool:
        if self.ctx.numeric_bindings is not None:
            return True
        return self._v[0].is_constant() and self._v[1].is_constant()

    def as_fraction(self) -> Fraction:
        if self.ctx.numeric_bindings is not None or not self.is_constant():
            raise FieldError(f"{self} is not a rational constant")
        if self._v[0].is_zero():
            return Fraction(0)
        q = self._v[0].leading_coefficient() / self._v[1].leading_coefficient()
        return Fraction(int(q.p), int(q.q))

    def free_symbols(self) -> list[str]:
        if self.ctx.numeric_bindings is not None:
            return []
        used = set()
        for poly in self._v:
            for monom in poly.monoms():
                used.update(i for i, e in enumerate(monom) if e)
        return [self.ctx.symbols[i] for i in sorted(used)]

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.ctx.numeric_bindings is not None:
            return Scalar._raw(self.ctx, self._v + other._v)
        return Scalar._raw(self.ctx, *_frac_add(self._v, other._v))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.ctx.numeric_bindings is not None:
            return Scalar._raw(self.ctx, self._v * other._v)
        return Scalar._raw(self.ctx, *_frac_mul(self._v, other._v))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero() and (self.ctx.numeric_bindings is None or self._v == 0.0):
            raise ZeroDivisionError("division by the zero scalar")
        if self.ctx.numeric_bindings is not None:
            return Scalar._raw(self.ctx, 1.0 / self._v)
        num, den = self._v
        lc = num.leading_coefficient()
        return Scalar._raw(self.ctx, den / lc, num / lc)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        if self.ctx.numeric_bindings is not None:
            return Scalar._raw(self.ctx, -self._v)
        return Scalar._raw(self.ctx, -self._v[0], self._v[1])

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.ctx.one / (self ** (-k))
        if k == 0:
            return self.ctx.one
        if self.ctx.numeric_bindings is not None:
            return Scalar._raw(self.ctx, self._v ** k)
        return Scalar._raw(self.ctx, self._v[0] ** k, self._v[1] ** k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            return False
        if self.ctx.numeric_bindings is None:
            return self._v[0] == other._v[0] and self._v[1] == other._v[1]
        return self._v == other._v

    def __hash__(self):
        if self.ctx.numeric_bindings is None:
            return hash((str(self._v[0]), str(self._v[1])))
        return hash(self._v)

    # -- text -------------------------------------------------------------
    def to_text(self) -> str:
        if self.ctx.numeric_bindings is not None:
            return repr(self._v)
        num = _poly_text(self._v[0], self.ctx.symbols)
        if self._v[1].is_one():
            return num
        return f"({num})/({_poly_text(self._v[1], self.ctx.symbols)})"

    def is_monomial_term(self) -> bool:
        """True when the text form needs no parentheses as a coefficient."""
        if self.ctx.numeric_bindings is not None:
            return True
        return self._v[1].is_one() and len(self._v[0]) <= 1

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Scalar({self.to_text()!r})"

    # -- evaluation -------------------------------------------------------
    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        """Exact value at a rational parameter point."""
        if self.ctx.numeric_bindings is not None:
            raise ModeMismatchError("exact evaluation of a numeric scalar")
        point = _point(self.ctx, values)
        den = self._v[1](*point)
        if den == 0:
            raise ZeroDivisionError(f"denominator of {self} vanishes at {dict(values)}")
        q = self._v[0](*point) / den
        return Fraction(int(q.p), int(q.q))

    def specialize(self, ctx: ParamContext) -> "Scalar":
        """Numeric-mode scalar in ``ctx`` (which must carry bindings)."""
        return Scalar(ctx, specialize(self, ctx))


def _reduce(num, den):
    """Cancel the gcd and make the denominator's leading coefficient 1."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return num, den.context().constant(1)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num, den = num / g, den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num / lc, den / lc
    return num, den


def _frac_add(u, v):
    (n1, d1), (n2, d2) = u, v
    if n1.is_zero():
        return v
    if n2.is_zero():
        return u
    if d1 == d2:
        if d1.is_one():
            return n1 + n2, d1
        return _reduce(n1 + n2, d1)
    g = d1.gcd(d2)
    if g.is_one():
        # coprime denominators: the sum is already reduced
        return _monic_den(n1 * d2 + n2 * d1, d1 * d2)
    e1, e2 = d1 / g, d2 / g
    num = n1 * e2 + n2 * e1
    if num.is_zero():
        return num, d1.context().constant(1)
    h = num.gcd(g)
    if not h.is_one():
        num, g = num / h, g / h
    return _monic_den(num, e1 * e2 * g)


def _frac_mul(u, v):
    (n1, d1), (n2, d2) = u, v
    if n1.is_zero() or n2.is_zero():
        return n1.context().constant(0), d1.context().constant(1)
    if d1.is_one() and d2.is_one():
        return n1 * n2, d1
    g1 = n1.gcd(d2) if not d2.is_one() else None
    g2 = n2.gcd(d1) if not d1.is_one() else None
    if g1 is not None and not g1.is_one():
        n1, d2 = n1 / g1, d2 / g1
    if g2 is not None and not g2.is_one():
        n2, d1 = n2 / g2, d1 / g2
    return _monic_den(n1 * n2, d1 * d2)


def _monic_den(num, den):
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num / lc, den / lc
    return num, den


def _monomial_text(monom, symbols) -> str:
    parts = []
    for name, e in zip(symbols, monom):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _rational_text(q) -> str:
    num, den = int(q.p), int(q.q)
    return str(num) if den == 1 else f"{num}/{den}"


def _poly_text(poly, symbols) -> str:
    if poly.is_zero():
        return "0"
    out = []
    for monom, coeff in poly.terms():  # graded-lex, highest first
        neg = coeff < 0
        mag = -coeff if neg else coeff
        mono = _monomial_text(monom, symbols)
        if not mono:
            body = _rational_text(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_rational_text(mag)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _point(ctx: ParamContext, values: Mapping[str, Number]):
    missing = [s for s in ctx.symbols if s not in values]
    if missing:
        raise UnboundSymbolError(f"unbound symbols {missing}")
    pt = []
    for s in ctx.symbols:
        v = values[s]
        if isinstance(v, float):
            raise FieldError("exact evaluation needs rational values")
        v = Fraction(v)
        pt.append(fmpq(v.numerator, v.denominator))
    return pt


def _eval_poly_float(poly, point) -> float:
    total = 0.0
    for monom, coeff in poly.terms():
        term = float(coeff)
        for v, e in zip(point, monom):
            if e:
                term *= v ** int(e)
        total += term
    return total


def _eval_exact_as_float(s: Scalar, values: Mapping[str, float]) -> float:
    point = [float(values.get(name, 0.0)) for name in s.ctx.symbols]
    num = _eval_poly_float(s.numer, point)
    den = _eval_poly_float(s.denom, point)
    return num / den


# -- module-level operations ------------------------------------------------

def scalar_arith(lhs: Scalar, rhs: Scalar, op: str) -> Scalar:
    ops = {"add": Scalar.__add__, "sub": Scalar.__sub__,
           "mul": Scalar.__mul__, "div": Scalar.__truediv__}
    if op not in ops:
        raise FieldError(f"unknown operation {op!r}")
    if not isinstance(rhs, Scalar) or not isinstance(lhs, Scalar):
        raise FieldError("scalar_arith expects two Scalars")
    return ops[op](lhs, rhs)


def specialize(s: Scalar, ctx: ParamContext | Mapping[str, float]) -> float:
    """Float value of ``s`` under the numeric bindings of ``ctx``."""
    if s.ctx.numeric_bindings is not None:
        return float(s.value)
    if isinstance(ctx, Mapping):
        values = s.ctx._complete_bindings(ctx)
    else:
        if ctx.numeric_bindings is None:
            raise UnboundSymbolError("context has no numeric bindings")
        values = dict(ctx.numeric_bindings)
    missing = [n for n in s.free_symbols() if n not in values]
    if missing:
        raise UnboundSymbolError(f"unbound symbols {missing}")
    point = [float(values.get(name, 0.0)) for name in s.ctx.symbols]
    den = _eval_poly_float(s.denom, point)
    if abs(den) < 1e-12:
        raise ZeroDivisionError(f"denominator of {s} is {den:g} at {values}")
    return _eval_poly_float(s.numer, point) / den


def parse_scalar(text: str, ctx: ParamContext) -> Scalar:
    """Parse a scalar expression; the identifier ``x`` is rejected here."""

    def leaf(kind, val, off):
        if kind == "int":
            return ctx.const(int(val))
        if val == "x":
            raise ParseError("'x' is not allowed in a scalar", text, off)
        if val not in ctx.symbols:
            raise ParseError(f"undeclared symbol {val!r}", text, off)
        return ctx.sym(val)

    def divide(lhs, rhs, off):
        if rhs.is_zero():
            raise ParseError("division by zero", text, off)
        return lhs / rhs

    return parse_expression(text, leaf, divide)


def random_rational_sample(ctx: ParamContext, seed, height: int = 9) -> dict[str, Fraction]:
    """Deterministic random rational point for Schwartz-Zippel style checks.

    Non-exponential symbols get pairwise distinct nonzero values (so shift
    differences such as ``b1 - b2`` never vanish); exponential symbols get
    positive values, which keeps denominators of the form ``2E + n a^2``
    away from zero.
    """
    rng = random.Random(seed)
    exp_syms = set(ctx.exp_symbols)
    out: dict[str, Fraction] = {}
    used: set[Fraction] = set()
    for name in ctx.symbols:
        while True:
            num = rng.randint(1, height)
            den = rng.randint(1, height // 2 + 1)
            val = Fraction(num, den)
            if name not in exp_syms:
                if rng.random() < 0.5:
                    val = -val
                if val in used:
                    continue
                used.add(val)
            break
        out[name] = val
    return out
