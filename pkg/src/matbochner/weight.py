"""Conjugated-Hermite weights ``W = T(x) diag(exp(-x^2 + 2 c_i x)) T(x)^T``.

Every integral is reported in units of ``sqrt(pi)``, so exact results stay
in the rational-function field.  The factor ``exp(c_i^2)`` produced by a
shifted Gaussian is the exponential symbol the context declares for
``c_i`` (see ``ParamContext.exp_factor``).

Formal W-adjoints ("daggers") are computed in the diagonal frame: with
``E = T^{-1} D T`` each entry of ``E^dagger`` is a scalar Gaussian dagger
kernel times ``exp(2 (c_i - c_l) x)``; the result is conjugated back by
``T``.  ``dagger_direct`` is an independent route through the full weight.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diffop import DiffOp, ExpDiffOp, compose
from .field import ParamContext, Scalar, specialize
from .polymat import (ExpPolyMatrix, PolyMatrix, XPoly, binom, parse_xpoly,
                      unimodular_inverse)

__all__ = [
    "Weight",
    "scalar_dagger_kernel",
    "dagger",
    "dagger_direct",
    "is_w_symmetric",
    "SymmetryResult",
    "symmetry_residuals_2x2",
    "Residuals2x2",
    "fourier_membership",
    "FourierResult",
    "fourier_form_2x2",
    "in_fourier_form_2x2",
    "moment",
    "inner_product",
    "parse_weight",
    "rational_context",
]


@dataclass(frozen=True, eq=False)
class Weight:
    """``T(x) diag(exp(-x^2 + 2 c_i x)) T(x)^T`` on the real line."""

    name: str
    shifts: tuple[Scalar, ...]
    T: PolyMatrix
    # explicit exp(c_i^2) values, used when the context carries no exponential symbols
    exp_values: tuple[Scalar, ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.T.size != len(self.shifts):
            raise ValueError("T and shifts disagree on the size")
        object.__setattr__(self, "shifts", tuple(self.shifts))
        # raises for non-unimodular conjugators
        self._cache["T_inv"] = unimodular_inverse(self.T)
        if self.exp_values is not None:
            self._cache["E"] = tuple(self.exp_values)
        else:
            self._cache["E"] = tuple(self.ctx.exp_factor(c) for c in self.shifts)

    @property
    def ctx(self) -> ParamContext:
        return self.T.ctx

    @property
    def size(self) -> int:
        return len(self.shifts)

    @property
    def T_inv(self) -> PolyMatrix:
        return self._cache["T_inv"]

    def exp_factor(self, i: int) -> Scalar:
        """The scalar ``exp(c_i^2)`` (an exponential symbol or 1)."""
        return self._cache["E"][i]

    def moments(self, i: int, m_max: int) -> list[Scalar]:
        key = ("mom", i)
        got = self._cache.setdefault(key, [])
        while len(got) <= m_max:
            got.append(moment(len(got), self.shifts[i], self.exp_factor(i)))
        return got

    def functional(self, i: int, f: XPoly) -> Scalar:
        """``int f(x) exp(-x^2 + 2 c_i x) dx / sqrt(pi)``."""
        if f.is_zero():
            return self.ctx.zero
        mu = self.moments(i, f.degree())
        acc = self.ctx.zero
        for c, m in zip(f.coeffs, mu):
            if not c.is_zero():
                acc = acc + c * m
        return acc

    def specialize(self, num_ctx: ParamContext) -> "Weight":
        ev = None if self.exp_values is None else tuple(e.specialize(num_ctx) for e in self.exp_values)
        return Weight(self.name, tuple(c.specialize(num_ctx) for c in self.shifts),
                      self.T.specialize(num_ctx), ev)

    def at_sample(self, values) -> "Weight":
        """The weight over plain rationals with every symbol (E's included) substituted."""
        ctx0 = rational_context()
        ev = lambda s: ctx0.const(s.evaluate(values))
        return Weight(self.name, tuple(ev(c) for c in self.shifts),
                      self.T.map(lambda p: p.map_coeffs(ev, ctx0), ctx0),
                      tuple(ev(self.exp_factor(i)) for i in range(self.size)))

    def numeric_matrix(self, x0: float, bindings) -> np.ndarray:
        """W(x0) as a float array (both exponential factors evaluated)."""
        num_ctx = bindings if isinstance(bindings, ParamContext) else self.ctx.numeric(bindings)
        Tn = np.array([[_eval_float(e, x0, num_ctx) for e in row] for row in self.T.rows])
        cs = [specialize(c, num_ctx) for c in self.shifts]
        diag = np.diag([np.exp(-x0 * x0 + 2 * c * x0) for c in cs])
        return Tn @ diag @ Tn.T

    def to_json(self) -> dict:
        names = []
        for i in range(self.size):
            e = self.exp_factor(i)
            names.append(None if e == self.ctx.one else e.to_text())
        return {"name": self.name, "size": self.size, "params": list(self.ctx.symbols),
                "shifts": [c.to_text() for c in self.shifts],
                "exp_symbols": names, "T": self.T.to_nested_text()}


_RATIONAL = ParamContext(())


def rational_context() -> ParamContext:
    """Context with no symbols: plain rational arithmetic."""
    return _RATIONAL


def _eval_float(p: XPoly, x0: float, num_ctx: ParamContext) -> float:
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x0 + specialize(c, num_ctx)
    return acc


def parse_weight(text: str, ctx: ParamContext | None = None) -> Weight:
    """Custom weight from JSON ``{"size", "shifts", "T"}``.

    Optional keys: ``params`` (symbol names), ``exp_symbols`` (one name or
    null per slot; defaults to ``E`` or ``E1, E2, ...`` for nonzero shifts),
    ``name``.
    """
    obj = json.loads(text)
    n = obj["size"]
    shifts_text = obj["shifts"]
    if len(shifts_text) != n or len(obj["T"]) != n:
        raise ValueError("shifts / T do not match size")
    if ctx is None:
        params = list(obj.get("params", []))
        exp_names = obj.get("exp_symbols")
        if exp_names is None:
            nonzero = [i for i, s in enumerate(shifts_text) if s.strip() not in ("0", "")]
            exp_names = [None] * n
            for k, i in enumerate(nonzero):
                exp_names[i] = "E" if len(nonzero) == 1 else f"E{k + 1}"
        exp_defs = []
        for name, s in zip(exp_names, shifts_text):
            if name is None:
                continue
            if name not in params:
                params.append(name)
            exp_defs.append((name, s))
        ctx = ParamContext(tuple(params), tuple(exp_defs))
    shifts = tuple(ctx.parse(s) for s in shifts_text)
    T = PolyMatrix(ctx, [[parse_xpoly(str(e), ctx) for e in row] for row in obj["T"]])
    return Weight(obj.get("name", "custom"), shifts, T)


# -- daggers ------------------------------------------------------------------------

def scalar_dagger_kernel(f: XPoly, k: int, c: Scalar) -> XPoly:
    """``exp(x^2 - 2cx) (exp(-x^2 + 2cx) f)^{(k)}``: k steps of g -> g' + (2c - 2x) g."""
    lin = XPoly(f.ctx, [c * 2, -2])
    g = f
    for _ in range(k):
        g = g.derivative() + g * lin
    return g


def _diagonal_frame_dagger(E: DiffOp, W: Weight) -> ExpDiffOp:
    ctx, n = W.ctx, W.size
    lins = [XPoly(ctx, [c * 2, -2]) for c in W.shifts]
    freq = [[(W.shifts[i] - W.shifts[l]) * 2 for l in range(n)] for i in range(n)]
    top = E.order
    # acc[k][(i, l)] = polynomial part of G_k at entry (i, l)
    acc: list[dict] = [dict() for _ in range(top + 1)]
    for m, F in E.terms():
        sign = -1 if m % 2 else 1
        for i in range(n):
            for l in range(n):
                g = F[l, i]
                if g.is_zero():
                    continue
                for r in range(m + 1):
                    k = m - r
                    term = g * (sign * binom(m, k))
                    cur = acc[k].get((i, l))
                    acc[k][(i, l)] = term if cur is None else cur + term
                    g = g.derivative() + g * lins[i]
    coeffs = {}
    zero = XPoly(ctx)
    for k, entries in enumerate(acc):
        parts: dict[Scalar, list] = {}
        for (i, l), p in entries.items():
            phi = freq[i][l]
            grid = parts.setdefault(phi, [[zero] * n for _ in range(n)])
            grid[i][l] = p
        coeffs[k] = ExpPolyMatrix(ctx, n, {phi: PolyMatrix(ctx, g) for phi, g in parts.items()})
    return ExpDiffOp(ctx, n, coeffs)


def dagger(D: DiffOp, W: Weight) -> ExpDiffOp:
    """Formal W-adjoint ``W D^* W^{-1}`` (may carry exponential terms)."""
    if D.n != W.size:
        raise ValueError(f"size mismatch: operator {D.n}, weight {W.size}")
    if D.is_zero():
        return ExpDiffOp(W.ctx, D.n, {})
    T, Ti = DiffOp.mult(W.T), DiffOp.mult(W.T_inv)
    E = compose(compose(Ti, D), T)
    Ed = _diagonal_frame_dagger(E, W)
    return compose(compose(T, Ed), Ti)


def dagger_direct(D: DiffOp, W: Weight) -> ExpDiffOp:
    """Same as :func:`dagger`, summed directly over the full weight.

    With ``W = exp(-x^2) V``: ``G_k = sum_m (-1)^m binom(m, k) K^{m-k}(V F_m^T) V^{-1}``
    where ``K(G) = G' - 2x G``.
    """
    ctx, n = W.ctx, W.size
    expo = lambda sign: ExpPolyMatrix(ctx, n, _diag_parts(W, sign))
    Tm = ExpPolyMatrix.from_poly(W.T)
    Tti = ExpPolyMatrix.from_poly(W.T_inv.T)
    V = Tm * expo(1) * ExpPolyMatrix.from_poly(W.T.T)
    V_inv = Tti * expo(-1) * ExpPolyMatrix.from_poly(W.T_inv)
    minus_2x = XPoly(ctx, [0, -2])
    coeffs: dict[int, ExpPolyMatrix] = {}
    for m, F in D.terms():
        g = V * ExpPolyMatrix.from_poly(F.T)
        sign = -1 if m % 2 else 1
        for r in range(m + 1):
            k = m - r
            term = g * V_inv * (sign * binom(m, k))
            coeffs[k] = coeffs[k] + term if k in coeffs else term
            g = g.derivative() + g * minus_2x
    return ExpDiffOp(ctx, n, coeffs)


def _diag_parts(W: Weight, sign: int) -> dict:
    ctx, n = W.ctx, W.size
    parts: dict[Scalar, list] = {}
    for i, c in enumerate(W.shifts):
        phi = c * (2 * sign)
        entries = parts.setdefault(phi, [0] * n)
        entries[i] = 1
    return {phi: PolyMatrix.diag(ctx, e) for phi, e in parts.items()}


@dataclass(frozen=True)
class SymmetryResult:
    symmetric: bool
    residual: ExpDiffOp

    def __bool__(self):
        return self.symmetric


def is_w_symmetric(D: DiffOp, W: Weight) -> SymmetryResult:
    residual = dagger(D, W) - D.to_exp()
    return SymmetryResult(residual.is_zero(), residual)


# -- the upper-triangular 2x2 system ---------------------------------------------------

@dataclass(frozen=True)
class Residuals2x2:
    """Polynomial residuals ``[k][eq]`` of the entrywise symmetry equations."""

    residuals: dict[str, list[XPoly]]
    r_reconstruction: list[XPoly]
    r_deviation: list[XPoly]

    def all_zero(self) -> bool:
        return all(p.is_zero() for ps in self.residuals.values() for p in ps)

    def nonzero(self) -> list[tuple[str, int]]:
        return [(name, k) for name, ps in self.residuals.items()
                for k, p in enumerate(ps) if not p.is_zero()]


def _family_params_2x2(W: Weight) -> tuple[Scalar, Scalar]:
    T = W.T
    if W.size != 2 or not T[1, 0].is_zero() or T[0, 0] != 1 or T[1, 1] != 1 \
            or T[0, 1].degree() > 1 or not T[0, 1].coeff(0).is_zero():
        raise ValueError("weight is not of the form T = [[1, a x], [0, 1]]")
    if not W.shifts[1].is_zero():
        raise ValueError("second shift must be zero")
    return T[0, 1].coeff(1), W.shifts[0]


def symmetry_residuals_2x2(D: DiffOp, W: Weight) -> Residuals2x2:
    """Entrywise symmetry equations for an upper-triangular 2x2 operator.

    Each equation is divided by its Gaussian factor, which turns it into a
    polynomial identity; ``W`` must be ``[[1, a x], [0, 1]]``-conjugated with
    shifts ``(b, 0)``.
    """
    if D.n != 2:
        raise ValueError("operator must be 2x2")
    if not D.is_upper_triangular():
        raise ValueError("operator coefficients must be upper triangular")
    a, b = _family_params_2x2(W)
    ctx = W.ctx
    zero = ctx.zero
    top = max(D.order, 0)
    p = [D.coeff(j)[0, 0] for j in range(top + 1)]
    r = [D.coeff(j)[0, 1] for j in range(top + 1)]
    q = [D.coeff(j)[1, 1] for j in range(top + 1)]
    ax = XPoly(ctx, [zero, a])
    a2x2 = XPoly(ctx, [zero, zero, a * a])
    K = scalar_dagger_kernel

    def lhs(k, fn, c, shift=0, factor=None):
        total = XPoly(ctx)
        for j in range(0, top - k):
            m = top - j
            coef = (-1) ** m * binom(m, k)
            if factor is not None:
                coef *= factor(m)
            total = total + K(fn(m), m - k - shift, c) * coef
        return total

    res = {name: [] for name in ("A4", "A2", "A3", "A1", "AA1")}
    recon, dev = [], []
    for k in range(top + 1):
        sgn = -1 if (k + 1) % 2 else 1  # (-1)^(k+1)
        res["A4"].append(lhs(k, lambda m: q[m], zero) - (q[k] + q[k] * sgn))
        res["A2"].append(lhs(k, lambda m: ax * p[m] + r[m], zero)
                         - (ax * q[k] + (ax * p[k] + r[k]) * sgn))
        a3 = lhs(k, lambda m: q[m] * a, zero, shift=1, factor=lambda m: m - k)
        res["A3"].append(a3 - (ax * (p[k] - q[k]) + r[k]))
        res["A1"].append(lhs(k, lambda m: a2x2 * p[m] + ax * r[m], zero)
                         - (a2x2 * (p[k] + p[k] * sgn) + ax * (r[k] + r[k] * sgn)))
        res["AA1"].append(lhs(k, lambda m: p[m], b) - (p[k] + p[k] * sgn))
        rk = ax * (q[k] - p[k]) + a3
        recon.append(rk)
        dev.append(r[k] - rk)
    return Residuals2x2(res, recon, dev)


# -- Fourier algebra -----------------------------------------------------------------------

@dataclass(frozen=True)
class FourierResult:
    member: bool
    witness: Scalar | None
    frequencies: list[Scalar]
    dagger: ExpDiffOp

    def __bool__(self):
        return self.member


def fourier_membership(D: DiffOp, W: Weight) -> FourierResult:
    """Member iff the formal W-adjoint has polynomial coefficients.

    Adjointability itself is not checked: the Gaussian decay of every weight
    in this family makes the boundary terms vanish.
    """
    Dd = dagger(D, W)
    freqs = Dd.frequencies()
    return FourierResult(not freqs, freqs[0] if freqs else None, freqs, Dd)


def fourier_form_2x2(ps: Sequence[XPoly], qs: Sequence[XPoly], a: Scalar) -> DiffOp:
    """``sum_j d^j [[p_j, a x (q_j - p_j)], [0, q_j]] + d^{j-1} [[0, j a q_j], [0, 0]]``."""
    ctx = a.ctx
    top = max(len(ps), len(qs))
    ps = list(ps) + [XPoly(ctx)] * (top - len(ps))
    qs = list(qs) + [XPoly(ctx)] * (top - len(qs))
    ax = XPoly(ctx, [0, a])
    z = XPoly(ctx)
    out = DiffOp.zero(ctx, 2)
    for j in range(top):
        F = PolyMatrix(ctx, [[ps[j], ax * (qs[j] - ps[j])], [z, qs[j]]])
        out = out + DiffOp(ctx, 2, {j: F})
        if j >= 1:
            G = PolyMatrix(ctx, [[z, qs[j] * (a * j)], [z, z]])
            out = out + DiffOp(ctx, 2, {j - 1: G})
    return out


def in_fourier_form_2x2(D: DiffOp, a: Scalar) -> bool:
    """Whether ``D`` matches :func:`fourier_form_2x2` for some ``p_j, q_j``."""
    if D.n != 2:
        return False
    ps = [D.coeff(j)[0, 0] for j in range(D.order + 1)]
    qs = [D.coeff(j)[1, 1] for j in range(D.order + 1)]
    return D == fourier_form_2x2(ps, qs, a)


# -- moments and inner products ---------------------------------------------------------

def _gaussian_even_moment(k: int, ctx: ParamContext) -> Scalar:
    # int y^k exp(-y^2) dy / sqrt(pi) = (k-1)!! / 2^(k/2)
    val = ctx.one
    for j in range(1, k, 2):
        val = val * j
    return val / (2 ** (k // 2))


def moment(m: int, c: Scalar, exp_factor: Scalar | None = None) -> Scalar:
    """``int x^m exp(-x^2 + 2 c x) dx / sqrt(pi)``."""
    ctx = c.ctx
    if exp_factor is None:
        exp_factor = ctx.exp_factor(c)
    total = ctx.zero
    for k in range(0, m + 1, 2):
        total = total + c ** (m - k) * (binom(m, k) * _gaussian_even_moment(k, ctx))
    return exp_factor * total


def inner_product(P: PolyMatrix, Q: PolyMatrix, W: Weight) -> PolyMatrix:
    """``int P W Q^T dx / sqrt(pi)`` as a constant matrix."""
    n = W.size
    if P.shape[1] != n or Q.shape[1] != n:
        raise ValueError("size mismatch")
    PT, QT = P * W.T, Q * W.T
    rows = []
    for r in range(P.shape[0]):
        row = []
        for s in range(Q.shape[0]):
            acc = W.ctx.zero
            for i in range(n):
                f = PT[r, i]
                g = QT[s, i]
                if f.is_zero() or g.is_zero():
                    continue
                acc = acc + W.functional(i, f * g)
            row.append(XPoly.const(W.ctx, acc))
        rows.append(row)
    return PolyMatrix(W.ctx, rows)
