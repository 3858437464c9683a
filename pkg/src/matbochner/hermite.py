"""Closed-form orthogonal polynomials and recursions for the 2x2 family.

``E`` stands for ``exp(b^2)`` throughout; ``n`` is always a concrete integer.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from .field import ParamContext, Scalar
from .polymat import PolyMatrix, XPoly, const_inverse

__all__ = ["HermiteCache", "monic_hermite", "shifted_hermite", "ClosedFormFamily", "Recursion"]


class HermiteCache:
    """Append-only memo of monic Hermite polynomials ``H_n`` and ``H_n(x - c)``."""

    def __init__(self, ctx: ParamContext):
        self.ctx = ctx
        self._lock = threading.Lock()
        self._plain: list[XPoly] = [XPoly.const(ctx, 1), XPoly.x(ctx)]
        self._shifted: dict[Scalar, list[XPoly]] = {}

    def _extend(self, seq: list[XPoly], n: int, x: XPoly):
        # x H_k = H_{k+1} + (k/2) H_{k-1}
        while len(seq) <= n:
            k = len(seq) - 1
            seq.append(x * seq[k] - seq[k - 1] * (self.ctx.one * k / 2))

    def hermite(self, n: int) -> XPoly:
        if n < 0:
            return XPoly(self.ctx)
        with self._lock:
            self._extend(self._plain, n, XPoly.x(self.ctx))
            return self._plain[n]

    def shifted(self, n: int, c: Scalar) -> XPoly:
        """``H_n(x - c)``."""
        if n < 0:
            return XPoly(self.ctx)
        with self._lock:
            seq = self._shifted.get(c)
            if seq is None:
                xc = XPoly(self.ctx, [-c, 1])
                seq = self._shifted[c] = [XPoly.const(self.ctx, 1), xc]
            self._extend(seq, n, seq[1])
            return seq[n]


_caches: dict[ParamContext, HermiteCache] = {}
_caches_lock = threading.Lock()


def _cache_for(ctx: ParamContext) -> HermiteCache:
    with _caches_lock:
        if ctx not in _caches:
            _caches[ctx] = HermiteCache(ctx)
        return _caches[ctx]


def monic_hermite(n: int, ctx: ParamContext) -> XPoly:
    return _cache_for(ctx).hermite(n)


def shifted_hermite(n: int, b: Scalar) -> XPoly:
    return _cache_for(b.ctx).shifted(n, b)


@dataclass(frozen=True)
class Recursion:
    A: PolyMatrix
    B: PolyMatrix
    C: PolyMatrix


class ClosedFormFamily:
    """Q(x,n), M_n, monic P(x,n) and both recursions for the weight ``cg2x2``."""

    def __init__(self, ctx: ParamContext):
        self.ctx = ctx
        self.a, self.b, self.E = ctx.syms("a", "b", "E")
        self._hc = _cache_for(ctx)

    def _const(self, rows) -> PolyMatrix:
        return PolyMatrix(self.ctx, [[XPoly.const(self.ctx, e) for e in row] for row in rows])

    def H(self, n: int) -> XPoly:
        return self._hc.hermite(n)

    def Hb(self, n: int) -> XPoly:
        return self._hc.shifted(n, self.b)

    def q_polynomial(self, n: int) -> PolyMatrix:
        a, E = self.a, self.E
        x = XPoly.x(self.ctx)
        return PolyMatrix(self.ctx, [
            [self.Hb(n), self.H(n + 1) * a - x * self.Hb(n) * a],
            [self.Hb(n - 1) * (-a * n), self.H(n) * (E * 2) + x * self.Hb(n - 1) * (a * a * n)],
        ])

    def m_matrix(self, n: int) -> PolyMatrix:
        a, b, E = self.a, self.b, self.E
        return self._const([[1, a * b * n], [0, E * 2 + a * a * n]])

    def monic_p(self, n: int) -> PolyMatrix:
        return const_inverse(self.m_matrix(n)) * self.q_polynomial(n)

    def tilde_recursion(self, n: int) -> Recursion:
        a, b, E = self.a, self.b, self.E
        d0 = E * 2 + a * a * n          # 2E + n a^2
        d1 = E * 2 + a * a * (n + 1)    # 2E + (n+1) a^2
        A = self._const([[1, -a * b / d1], [0, d0 / d1]])
        B = self._const([[E * b * 2 / d1, a / (d0 * 2)], [E * a * 2 / d1, a * a * b * n / d0]])
        C = self._const([[d1 * n / (d0 * 2), 0], [-a * b * E * (2 * n) / d0, self.ctx.one * n / 2]])
        return Recursion(A, B, C)

    def monic_recursion(self, n: int) -> Recursion:
        """A_n = I and the explicit B_n, C_n."""
        a, b, E = self.a, self.b, self.E
        d0 = E * 2 + a * a * n
        d1 = E * 2 + a * a * (n + 1)
        den = d0 * d1
        b2 = b * b
        # (1,2) entry: the E^2 term carries coefficient 4, which the recursion forces
        num12 = (a ** 5 * (n * (n + 1)) * (b2 * (2 * n) - 1)
                 + a ** 3 * E * 2 * (b2 * (2 * n * n) - (2 * n + 1))
                 - a * E * E * 4 * (b2 * (2 * n) + 1))
        B = self._const([
            [b * E * E * 4 / den, num12 / (den * -2)],
            [E * a * 2 / den, a * a * b * n * (d1 + E * 2) / den],
        ])
        sq = d0 * d0 * 2
        a4 = a ** 4
        C = self._const([
            [(a4 * (n * (n + 1)) + a * a * E * 2 * (b2 * (2 * n) + (2 * n + 1)) + E * E * 4) * n / sq,
             a * b * n * (a4 * (n * (n - 1)) + a * a * E * 2 * (b2 * (2 * n * n - 2 * n) - 1)
                          - E * E * 4) / sq],
            [-(a * b * E * (2 * n)) / (d0 * d0),
             -(-a4 * (n * (n - 1)) + a * a * E * 2 * (b2 * (2 * n - 2) - (2 * n - 1))
               - E * E * 4) * n / sq],
        ])
        return Recursion(PolyMatrix.identity(self.ctx, 2), B, C)

    def conjugated_recursion(self, n: int) -> Recursion:
        """``M_n^{-1} (A~, B~, C~) (M_{n+1}, M_n, M_{n-1})``."""
        t = self.tilde_recursion(n)
        Mi = const_inverse(self.m_matrix(n))
        C = Mi * t.C * self.m_matrix(n - 1) if n > 0 else PolyMatrix.zeros(self.ctx, 2)
        return Recursion(Mi * t.A * self.m_matrix(n + 1), Mi * t.B * self.m_matrix(n), C)

    def _lower(self, n: int, poly) -> PolyMatrix:
        return poly(n - 1) if n > 0 else PolyMatrix.zeros(self.ctx, 2)

    def tilde_residual(self, n: int) -> PolyMatrix:
        """``x Q_n - (A~ Q_{n+1} + B~ Q_n + C~ Q_{n-1})``."""
        t = self.tilde_recursion(n)
        Q = self.q_polynomial
        return (Q(n) * XPoly.x(self.ctx) - t.A * Q(n + 1) - t.B * Q(n)
                - t.C * self._lower(n, Q))

    def monic_residual(self, n: int) -> PolyMatrix:
        r = self.monic_recursion(n)
        P = self.monic_p
        return (P(n) * XPoly.x(self.ctx) - r.A * P(n + 1) - r.B * P(n)
                - r.C * self._lower(n, P))
