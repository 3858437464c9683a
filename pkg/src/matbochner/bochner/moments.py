"""Monic orthogonal polynomials from exact moments (block Gram-Schmidt)."""
from __future__ import annotations

import threading

from ..field import FieldError
from ..polymat import PolyMatrix, XPoly, const_inverse
from ..weight import Weight

__all__ = ["SingularGramError", "moment_matrices", "monic_ops_from_moments", "monic_sequence"]

_lock = threading.Lock()


class SingularGramError(FieldError):
    pass


def moment_matrices(W: Weight, k_max: int) -> list[PolyMatrix]:
    """``mu_k = int x^k W dx / sqrt(pi)`` for k = 0..k_max, as constant matrices."""
    ctx, N = W.ctx, W.size
    prods: dict[tuple[int, int], list] = {}
    for r in range(N):
        for s in range(N):
            for i in range(N):
                p = W.T[r, i] * W.T[s, i]
                if not p.is_zero():
                    prods.setdefault((r, s), []).append((i, p))
    max_deg = max((p.degree() for v in prods.values() for _, p in v), default=0)
    mom = [W.moments(i, k_max + max_deg) for i in range(N)]
    out = []
    for k in range(k_max + 1):
        rows = [[ctx.zero] * N for _ in range(N)]
        for (r, s), terms in prods.items():
            acc = ctx.zero
            for i, p in terms:
                for d, c in enumerate(p.coeffs):
                    if not c.is_zero():
                        acc = acc + c * mom[i][k + d]
            rows[r][s] = acc
        out.append(PolyMatrix(ctx, [[XPoly.const(ctx, e) for e in row] for row in rows]))
    return out


def _assemble(coeffs: list[PolyMatrix]) -> PolyMatrix:
    ctx = coeffs[0].ctx
    N = coeffs[0].size
    rows = [[XPoly(ctx, [coeffs[k][r, c].coeff(0) for k in range(len(coeffs))])
             for c in range(N)] for r in range(N)]
    return PolyMatrix(ctx, rows)


def _gram_schmidt(W: Weight, n_max: int, state: dict) -> None:
    """Extend ``state`` (coefficient lists and inverse norms) up to degree n_max."""
    ctx, N = W.ctx, W.size
    coeff_lists: list = state.setdefault("coeffs", [])
    inv_norms: list = state.setdefault("inv_norms", [])
    if len(coeff_lists) > n_max:
        return
    mu = moment_matrices(W, 2 * n_max)
    for n in range(len(coeff_lists), n_max + 1):
        cs = [PolyMatrix.zeros(ctx, N) for _ in range(n)] + [PolyMatrix.identity(ctx, N)]
        for k in range(n):
            # <x^n I, P_k> <P_k, P_k>^{-1}
            proj = PolyMatrix.zeros(ctx, N)
            for l, c in enumerate(coeff_lists[k]):
                if not c.is_zero():
                    proj = proj + mu[n + l] * c.T
            factor = proj * inv_norms[k]
            if factor.is_zero():
                continue
            for l, c in enumerate(coeff_lists[k]):
                cs[l] = cs[l] - factor * c
        norm = PolyMatrix.zeros(ctx, N)
        for l, c in enumerate(cs):
            if not c.is_zero():
                norm = norm + c * mu[l + n]
        try:
            inv = const_inverse(norm)
        except (FieldError, ZeroDivisionError) as exc:
            raise SingularGramError(f"Gram block of degree {n} is singular") from exc
        coeff_lists.append(cs)
        inv_norms.append(inv)


def monic_ops_from_moments(W: Weight, n_max: int) -> list[PolyMatrix]:
    """Monic ``P_0..P_{n_max}``, mutually orthogonal under ``inner_product``."""
    with _lock:
        state = W._cache.setdefault("gram_schmidt", {})
        _gram_schmidt(W, n_max, state)
        polys = state.setdefault("polys", [])
        while len(polys) <= n_max:
            polys.append(_assemble(state["coeffs"][len(polys)]))
        return polys[: n_max + 1]


def _has_closed_form(W: Weight) -> bool:
    from ..builtins import cg2x2

    ref = cg2x2()
    return W is ref or (W.ctx == ref.ctx and W.T == ref.T and W.shifts == ref.shifts
                        and W.exp_values is None)


def monic_sequence(W: Weight, n_max: int) -> list[PolyMatrix]:
    """Closed forms for ``cg2x2``; moment Gram-Schmidt otherwise."""
    if _has_closed_form(W):
        from ..hermite import ClosedFormFamily

        fam = W._cache.setdefault("closed_form", ClosedFormFamily(W.ctx))
        return [fam.monic_p(n) for n in range(n_max + 1)]
    return monic_ops_from_moments(W, n_max)
