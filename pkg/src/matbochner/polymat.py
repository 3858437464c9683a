"""Polynomials in x, matrices of them, and exponential-polynomial matrices.

``XPoly`` is dense (low to high degree); degrees stay small in this
package.  ``ExpPolyMatrix`` stores ``sum_phi exp(phi*x) * A_phi(x)`` keyed by
the frequency ``phi`` (a Scalar).
"""
from __future__ import annotations

from math import comb
from typing import Iterable, Iterator, Sequence, Union

from ._grammar import ParseError, parse_expression
from .field import FieldError, ParamContext, Scalar

NEG_INF = float("-inf")

Coeff = Union[Scalar, int]


class XPoly:
    """Immutable univariate polynomial with Scalar coefficients."""

    __slots__ = ("ctx", "coeffs", "var")

    def __init__(self, ctx: ParamContext, coeffs: Iterable[Coeff] = (), var: str = "x"):
        cs = [c if isinstance(c, Scalar) else ctx.const(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.ctx = ctx
        self.coeffs: tuple[Scalar, ...] = tuple(cs)
        self.var = var

    @classmethod
    def _raw(cls, ctx, coeffs, var="x"):
        p = cls.__new__(cls)
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        p.ctx = ctx
        p.coeffs = tuple(cs)
        p.var = var
        return p

    @classmethod
    def const(cls, ctx: ParamContext, c: Coeff, var: str = "x") -> "XPoly":
        return cls(ctx, [c], var)

    @classmethod
    def monomial(cls, ctx: ParamContext, k: int, c: Coeff = 1, var: str = "x") -> "XPoly":
        return cls(ctx, [ctx.zero] * k + [c], var)

    @classmethod
    def x(cls, ctx: ParamContext, var: str = "x") -> "XPoly":
        return cls.monomial(ctx, 1, 1, var)

    # -- basic queries ----------------------------------------------------
    def degree(self):
        """Degree, with ``NEG_INF`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> Scalar:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ctx.zero

    @property
    def lc(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else self.ctx.zero

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = XPoly.const(self.ctx, other)
        if not isinstance(other, XPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- arithmetic -----------------------------------------------------------
    def _lift(self, other) -> "XPoly":
        if isinstance(other, XPoly):
            return other
        if isinstance(other, (Scalar, int)):
            return XPoly.const(self.ctx, other, self.var)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return XPoly._raw(self.ctx, out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return XPoly._raw(self.ctx, [-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int)):
            if isinstance(other, int):
                other = self.ctx.const(other)
            if other.is_zero():
                return XPoly(self.ctx, (), self.var)
            return XPoly._raw(self.ctx, [c * other for c in self.coeffs], self.var)
        if not isinstance(other, XPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return XPoly(self.ctx, (), self.var)
        out = [self.ctx.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai.is_zero():
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return XPoly._raw(self.ctx, out, self.var)

    __rmul__ = __mul__

    def __truediv__(self, s):
        if isinstance(s, int):
            s = self.ctx.const(s)
        if not isinstance(s, Scalar):
            return NotImplemented
        inv = self.ctx.one / s
        return self * inv

    def __pow__(self, k: int):
        out = XPoly.const(self.ctx, 1, self.var)
        for _ in range(k):
            out = out * self
        return out

    def mul_x(self, k: int = 1) -> "XPoly":
        if not self.coeffs:
            return self
        return XPoly._raw(self.ctx, [self.ctx.zero] * k + list(self.coeffs), self.var)

    def derivative(self, k: int = 1) -> "XPoly":
        cs = self.coeffs
        for _ in range(k):
            cs = [c * i for i, c in enumerate(cs) if i > 0]
        return XPoly._raw(self.ctx, cs, self.var)

    def eval(self, x0) -> Scalar:
        if isinstance(x0, int):
            x0 = self.ctx.const(x0)
        acc = self.ctx.zero
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def shift(self, c: Coeff) -> "XPoly":
        """The polynomial ``f(x - c)``."""
        if isinstance(c, int):
            c = self.ctx.const(c)
        lin = XPoly(self.ctx, [-c, 1], self.var)
        acc = XPoly(self.ctx, (), self.var)
        for coeff in reversed(self.coeffs):
            acc = acc * lin + coeff
        return acc

    def map_coeffs(self, fn, ctx: ParamContext | None = None) -> "XPoly":
        return XPoly(ctx or self.ctx, [fn(c) for c in self.coeffs], self.var)

    def specialize(self, num_ctx: ParamContext) -> "XPoly":
        return self.map_coeffs(lambda c: c.specialize(num_ctx), num_ctx)

    def with_var(self, var: str) -> "XPoly":
        return XPoly._raw(self.ctx, self.coeffs, var)

    # -- text -----------------------------------------------------------------
    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            ctext = c.to_text()
            neg = False
            if c.is_monomial_term() and ctext.startswith("-"):
                neg, ctext = True, ctext[1:]
            if k == 0:
                body = ctext if c.is_monomial_term() else f"({ctext})"
            else:
                mono = self.var if k == 1 else f"{self.var}^{k}"
                if ctext == "1":
                    body = mono
                elif c.is_monomial_term():
                    body = f"{ctext}*{mono}"
                else:
                    body = f"({ctext})*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"XPoly({self.to_text()!r})"


def parse_xpoly(text: str, ctx: ParamContext, var: str = "x") -> XPoly:
    """Parse a polynomial entry; ``var`` is the polynomial variable."""

    def leaf(kind, val, off):
        if kind == "int":
            return XPoly.const(ctx, int(val), var)
        if val == var:
            return XPoly.x(ctx, var)
        if val not in ctx.symbols:
            raise ParseError(f"undeclared symbol {val!r}", text, off)
        return XPoly.const(ctx, ctx.sym(val), var)

    def divide(lhs, rhs, off):
        if not rhs.is_constant():
            raise ParseError(f"division by a polynomial in {var}", text, off)
        if rhs.is_zero():
            raise ParseError("division by zero", text, off)
        return lhs / rhs.coeff(0)

    return parse_expression(text, leaf, divide)


def _as_xpoly(ctx: ParamContext, e) -> XPoly:
    if isinstance(e, XPoly):
        return e
    if isinstance(e, str):
        return parse_xpoly(e, ctx)
    return XPoly.const(ctx, e)


class PolyMatrix:
    """Immutable matrix of XPoly entries."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: ParamContext, rows: Sequence[Sequence]):
        rows = tuple(tuple(_as_xpoly(ctx, e) for e in row) for row in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self.ctx = ctx
        self.rows = rows

    @classmethod
    def _raw(cls, ctx, rows):
        m = cls.__new__(cls)
        m.ctx = ctx
        m.rows = tuple(tuple(r) for r in rows)
        return m

    @classmethod
    def zeros(cls, ctx: ParamContext, n: int, m: int | None = None) -> "PolyMatrix":
        z = XPoly(ctx)
        return cls._raw(ctx, [[z] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def identity(cls, ctx: ParamContext, n: int) -> "PolyMatrix":
        one, z = XPoly.const(ctx, 1), XPoly(ctx)
        return cls._raw(ctx, [[one if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, ctx: ParamContext, n: int, i: int, j: int, entry=1) -> "PolyMatrix":
        z = XPoly(ctx)
        rows = [[z] * n for _ in range(n)]
        rows[i][j] = _as_xpoly(ctx, entry)
        return cls._raw(ctx, rows)

    @classmethod
    def diag(cls, ctx: ParamContext, entries: Sequence) -> "PolyMatrix":
        n = len(entries)
        z = XPoly(ctx)
        return cls._raw(ctx, [[_as_xpoly(ctx, entries[i]) if i == j else z for j in range(n)]
                              for i in range(n)])

    # -- queries ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def size(self) -> int:
        n, m = self.shape
        if n != m:
            raise ValueError(f"matrix is {n}x{m}, not square")
        return n

    def __getitem__(self, ij) -> XPoly:
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> Iterator[tuple[int, int, XPoly]]:
        for i, row in enumerate(self.rows):
            for j, e in enumerate(row):
                yield i, j, e

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def degree_max(self):
        return max((e.degree() for row in self.rows for e in row), default=NEG_INF)

    def coeff(self, k: int) -> "PolyMatrix":
        """Constant matrix of the x^k coefficients."""
        return PolyMatrix._raw(self.ctx, [[XPoly._raw(self.ctx, [e.coeff(k)]) for e in row]
                                          for row in self.rows])

    def scalar_entries(self) -> list[list[Scalar]]:
        """Entries of a constant matrix as Scalars."""
        if self.degree_max() > 0:
            raise ValueError("matrix is not constant")
        return [[e.coeff(0) for e in row] for row in self.rows]

    def is_upper_triangular(self) -> bool:
        return all(e.is_zero() for i, j, e in self.entries() if i > j)

    def is_diagonal(self) -> bool:
        return all(e.is_zero() for i, j, e in self.entries() if i != j)

    def is_scalar_multiple_of_identity(self) -> bool:
        n = self.size
        return self.is_diagonal() and all(self.rows[i][i] == self.rows[0][0] for i in range(n))

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    # -- arithmetic -----------------------------------------------------------
    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"size mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return PolyMatrix._raw(self.ctx, [[a + b for a, b in zip(r1, r2)]
                                          for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return PolyMatrix._raw(self.ctx, [[a - b for a, b in zip(r1, r2)]
                                          for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return PolyMatrix._raw(self.ctx, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, XPoly)):
            return PolyMatrix._raw(self.ctx, [[a * other for a in r] for r in self.rows])
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"size mismatch {self.shape} x {other.shape}")
        z = XPoly(self.ctx)
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = z
                for t in range(k):
                    a = self.rows[i][t]
                    if a.is_zero():
                        continue
                    b = other.rows[t][j]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix._raw(self.ctx, out)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, XPoly)):
            return PolyMatrix._raw(self.ctx, [[other * a for a in r] for r in self.rows])
        return NotImplemented

    def __pow__(self, k: int):
        out = PolyMatrix.identity(self.ctx, self.size)
        for _ in range(k):
            out = out * self
        return out

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix._raw(self.ctx, [list(col) for col in zip(*self.rows)])

    @property
    def T(self) -> "PolyMatrix":
        return self.transpose()

    def derivative(self, k: int = 1) -> "PolyMatrix":
        return PolyMatrix._raw(self.ctx, [[a.derivative(k) for a in r] for r in self.rows])

    def map(self, fn, ctx: ParamContext | None = None) -> "PolyMatrix":
        return PolyMatrix._raw(ctx or self.ctx, [[fn(a) for a in r] for r in self.rows])

    def eval(self, x0) -> "PolyMatrix":
        return self.map(lambda e: XPoly.const(self.ctx, e.eval(x0)))

    def specialize(self, num_ctx: ParamContext) -> "PolyMatrix":
        return self.map(lambda e: e.specialize(num_ctx), num_ctx)

    def det(self) -> XPoly:
        return _det([list(r) for r in self.rows], self.ctx)

    def adjugate(self) -> "PolyMatrix":
        n = self.size
        if n == 1:
            return PolyMatrix.identity(self.ctx, 1)
        rows = [list(r) for r in self.rows]
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
                c = _det(minor, self.ctx)
                out[j][i] = c if (i + j) % 2 == 0 else -c
        return PolyMatrix._raw(self.ctx, out)

    def to_nested_text(self) -> list[list[str]]:
        return [[e.to_text() for e in r] for r in self.rows]

    def __repr__(self):
        return f"PolyMatrix({self.to_nested_text()!r})"


def _det(rows, ctx) -> XPoly:
    n = len(rows)
    if n == 0:
        return XPoly.const(ctx, 1)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = XPoly(ctx)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor, ctx)
        total = total + term if j % 2 == 0 else total - term
    return total


class NotUnimodularError(FieldError):
    pass


def unimodular_inverse(T: PolyMatrix) -> PolyMatrix:
    """Polynomial inverse of a matrix whose determinant is a nonzero constant."""
    d = T.det()
    if d.is_zero() or d.degree() > 0:
        raise NotUnimodularError(f"not unimodular: det = {d}")
    return T.adjugate() * (T.ctx.one / d.coeff(0))


def const_inverse(M: PolyMatrix) -> PolyMatrix:
    """Inverse of a constant matrix over the coefficient field (Gauss-Jordan)."""
    a = M.scalar_entries()
    n = len(a)
    ctx = M.ctx
    aug = [row[:] + [ctx.one if i == j else ctx.zero for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular constant matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = ctx.one / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return PolyMatrix(ctx, [[XPoly.const(ctx, v) for v in row[n:]] for row in aug])


class ExpPolyMatrix:
    """``sum_phi exp(phi*x) A_phi(x)``, keyed by frequency ``phi``."""

    __slots__ = ("ctx", "n", "parts")

    def __init__(self, ctx: ParamContext, n: int, parts: dict | None = None):
        self.ctx = ctx
        self.n = n
        clean: dict[Scalar, PolyMatrix] = {}
        for phi, A in (parts or {}).items():
            if isinstance(phi, int):
                phi = ctx.const(phi)
            if A.shape != (n, n):
                raise ValueError("size mismatch in exponential-polynomial part")
            key = _match_frequency(clean, phi, ctx)
            clean[key] = clean[key] + A if key in clean else A
        zero = ctx.zero
        out = {phi: A for phi, A in clean.items() if phi.is_zero() or not A.is_zero()}
        if not any(phi.is_zero() for phi in out):
            out[zero] = PolyMatrix.zeros(ctx, n)
        self.parts = out

    @classmethod
    def from_poly(cls, A: PolyMatrix) -> "ExpPolyMatrix":
        return cls(A.ctx, A.size, {A.ctx.zero: A})

    @classmethod
    def zeros(cls, ctx: ParamContext, n: int) -> "ExpPolyMatrix":
        return cls(ctx, n, {})

    def part(self, phi) -> PolyMatrix:
        if isinstance(phi, int):
            phi = self.ctx.const(phi)
        return self.parts.get(phi, PolyMatrix.zeros(self.ctx, self.n))

    def poly_part(self) -> PolyMatrix:
        return next(A for phi, A in self.parts.items() if phi.is_zero())

    def nonzero_frequencies(self) -> list[Scalar]:
        return sorted((phi for phi in self.parts if not phi.is_zero()), key=lambda s: s.to_text())

    def is_polynomial(self) -> bool:
        return not self.nonzero_frequencies()

    def to_polymatrix(self) -> PolyMatrix:
        if not self.is_polynomial():
            raise ValueError("exponential terms present")
        return self.poly_part()

    def is_zero(self) -> bool:
        return all(A.is_zero() for A in self.parts.values())

    def __eq__(self, other):
        if isinstance(other, PolyMatrix):
            other = ExpPolyMatrix.from_poly(other)
        if not isinstance(other, ExpPolyMatrix):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset((k, v) for k, v in self.parts.items() if not v.is_zero()))

    def _lift(self, other):
        if isinstance(other, PolyMatrix):
            return ExpPolyMatrix.from_poly(other)
        return other

    def __add__(self, other):
        other = self._lift(other)
        if not isinstance(other, ExpPolyMatrix):
            return NotImplemented
        merged = dict(self.parts)
        for phi, A in other.parts.items():
            key = _match_frequency(merged, phi, self.ctx)
            merged[key] = merged[key] + A if key in merged else A
        return ExpPolyMatrix(self.ctx, self.n, merged)

    __radd__ = __add__

    def __neg__(self):
        return ExpPolyMatrix(self.ctx, self.n, {phi: -A for phi, A in self.parts.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if not isinstance(other, ExpPolyMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, XPoly)):
            return ExpPolyMatrix(self.ctx, self.n, {phi: A * other for phi, A in self.parts.items()})
        other = self._lift(other)
        if not isinstance(other, ExpPolyMatrix):
            return NotImplemented
        out: dict[Scalar, PolyMatrix] = {}
        for phi, A in self.parts.items():
            if A.is_zero():
                continue
            for psi, B in other.parts.items():
                if B.is_zero():
                    continue
                key = _match_frequency(out, phi + psi, self.ctx)
                prod = A * B
                out[key] = out[key] + prod if key in out else prod
        return ExpPolyMatrix(self.ctx, self.n, out)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int, XPoly)):
            return self * other
        other = self._lift(other)
        if isinstance(other, ExpPolyMatrix):
            return other * self
        return NotImplemented

    def derivative(self, k: int = 1) -> "ExpPolyMatrix":
        out = self
        for _ in range(k):
            out = exp_derivative(out)
        return out

    def transpose(self) -> "ExpPolyMatrix":
        return ExpPolyMatrix(self.ctx, self.n, {phi: A.T for phi, A in self.parts.items()})

    def to_json(self) -> list[dict]:
        return [{"frequency": phi.to_text(), "matrix": A.to_nested_text()}
                for phi, A in sorted(self.parts.items(), key=lambda kv: kv[0].to_text())
                if not A.is_zero() or phi.is_zero()]

    def __repr__(self):
        return f"ExpPolyMatrix({self.to_json()!r})"


def _match_frequency(table: dict, phi: Scalar, ctx: ParamContext) -> Scalar:
    if phi in table or ctx.mode == "exact":
        return phi
    for key in table:
        if key != phi and abs(key.value - phi.value) < 1e-9:
            raise ValueError(f"numerically indistinguishable frequencies {key} and {phi}")
    return phi


def exp_derivative(M: ExpPolyMatrix) -> ExpPolyMatrix:
    """d/dx of exp(phi x) A(x) is exp(phi x) (phi A + A')."""
    return ExpPolyMatrix(M.ctx, M.n, {phi: A * phi + A.derivative() for phi, A in M.parts.items()})


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return comb(n, k)
