"""Exact ansatz solver for the bounded-order slice of D(W).

Unknowns are the x^j coefficients (j <= i) of every entry of every F_i,
i <= s.  ``P_n D - Lambda_n(D) P_n`` is linear in them, so each n contributes
linear equations: one per matrix entry and power of x.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..diffop import DiffOp
from ..field import FieldError, ParamContext, Scalar, random_rational_sample
from ..polymat import PolyMatrix, XPoly
from ..weight import Weight
from .eigen import dw_membership, falling_factorial
from .linalg import independent_rows, nullspace_from_rref, rref
from .moments import monic_sequence

__all__ = ["Unknown", "ansatz_unknowns", "constraint_rows", "OperatorSpace",
           "SpecializationMismatch", "ConfirmationError", "ansatz_solve", "default_n_max"]

VERIFY_EXTRA = 5


@dataclass(frozen=True, order=True)
class Unknown:
    i: int  # derivative order
    j: int  # power of x
    r: int
    c: int


def ansatz_unknowns(s: int, N: int) -> list[Unknown]:
    """Descending (i, j), then matrix entry row-major: this order fixes the echelon form."""
    out = []
    for i in range(s, -1, -1):
        for j in range(i, -1, -1):
            for r in range(N):
                for c in range(N):
                    out.append(Unknown(i, j, r, c))
    return out


def default_n_max(s: int) -> int:
    return s + 2


class SpecializationMismatch(FieldError):
    """Solution spaces differ in dimension across random specialisations."""


class ConfirmationError(FieldError):
    """A candidate basis element failed the exact re-verification."""


def constraint_rows(polys: list[PolyMatrix], s: int, ns) -> list[dict[int, Scalar]]:
    """Sparse rows (column = index into ``ansatz_unknowns``) for the indices ``ns``."""
    N = polys[0].size
    unknowns = ansatz_unknowns(s, N)
    rows = []
    for n in ns:
        P = polys[n]
        derivs = [P]
        for _ in range(s):
            derivs.append(derivs[-1].derivative())
        table: dict[tuple, dict[int, Scalar]] = {}

        def add(key, col, val):
            row = table.setdefault(key, {})
            nv = row[col] + val if col in row else val
            if nv.is_zero():
                row.pop(col, None)
            else:
                row[col] = nv

        for col, u in enumerate(unknowns):
            Pi = derivs[u.i]
            # d^i(P_n) x^j E_rc: column c receives column r of P_n^(i), shifted by x^j
            for r in range(N):
                for d, val in enumerate(Pi[r, u.r].coeffs):
                    if not val.is_zero():
                        add((r, u.c, d + u.j), col, val)
            if u.i == u.j:
                k = falling_factorial(n, u.i)
                if k:
                    # -[n]_i E_rc P_n: row r receives -[n]_i * (row c of P_n)
                    for c in range(N):
                        for d, val in enumerate(P[u.c, c].coeffs):
                            if not val.is_zero():
                                add((u.r, c, d), col, -(val * k))
        rows.extend(row for _, row in sorted(table.items()) if row)
    return rows


@dataclass
class OperatorSpace:
    """Basis of ``{D : order <= s, deg F_i <= i, P_n D = Lambda_n P_n, n <= n_max}``."""

    weight: str
    s: int
    n_max: int
    basis: list[DiffOp]
    strategy: str
    constraint_indices: list[int]
    verification_indices: list[int]
    samples: list[dict] = field(default_factory=list)
    sample_dims: list[int] = field(default_factory=list)
    elapsed: dict = field(default_factory=dict)
    source: Weight | None = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def elements_of_order(self, k: int) -> list[DiffOp]:
        return [D for D in self.basis if D.order == k]


def _vectors_to_ops(vectors, unknowns, ctx: ParamContext, N: int) -> list[DiffOp]:
    ops = []
    for v in vectors:
        grids: dict[int, list] = {}
        for col, val in v.items():
            u = unknowns[col]
            g = grids.setdefault(u.i, [[[ctx.zero] * (u.i + 1) for _ in range(N)] for _ in range(N)])
            g[u.r][u.c][u.j] = val
        coeffs = {i: PolyMatrix(ctx, [[XPoly(ctx, cs) for cs in row] for row in g])
                  for i, g in grids.items()}
        ops.append(DiffOp(ctx, N, coeffs))
    return ops


def _canonical_basis(vectors, ncols, ctx) -> list[dict]:
    """Reduced echelon form of the basis vectors themselves (unique for the span)."""
    reduced = rref([dict(v) for v in vectors], lambda z: z.is_zero())
    return [reduced[p] for p in sorted(reduced)]


def _nullspace(rows, columns, ctx) -> list[dict]:
    basis = rref(rows, lambda z: z.is_zero())
    return nullspace_from_rref(basis, columns, ctx.one, ctx.zero)


def _evaluate_rows(rows, values) -> tuple[list[int], list[dict[int, Fraction]]]:
    """Rows over Q at a sample, with the positions of the rows that stay nonzero."""
    positions, out = [], []
    for idx, row in enumerate(rows):
        ev = {}
        for c, v in row.items():
            f = v.evaluate(values)
            if f != 0:
                ev[c] = f
        if ev:
            positions.append(idx)
            out.append(ev)
    return positions, out


def _draw_sample(ctx: ParamContext, rows, seed: int, tries: int = 50):
    for t in range(tries):
        values = random_rational_sample(ctx, seed * 1000 + t)
        try:
            return values, _evaluate_rows(rows, values)
        except ZeroDivisionError:
            continue
    raise FieldError("could not find a sample avoiding every denominator")


def ansatz_solve(W: Weight, s: int, n_max: int | None = None, strategy: str = "specialize",
                 seed: int = 0, n_samples: int = 5, polys=None) -> OperatorSpace:
    """Solve the exact homogeneous system; every basis element re-verified up to n_max + 5."""
    import time

    if s < 0:
        raise ValueError("order bound must be non-negative")
    n_max = default_n_max(s) if n_max is None else n_max
    if n_max < s + 2:
        raise ValueError(f"n_max must be at least s + 2 = {s + 2}")
    if strategy not in ("specialize", "symbolic"):
        raise ValueError(f"unknown strategy {strategy!r}")
    ctx, N = W.ctx, W.size
    unknowns = ansatz_unknowns(s, N)
    ncols = len(unknowns)
    timings = {}
    t0 = time.perf_counter()
    verify_top = n_max + VERIFY_EXTRA
    polys = polys if polys is not None else monic_sequence(W, verify_top)
    timings["polynomials"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rows = constraint_rows(polys, s, range(n_max + 1))
    timings["assembly"] = time.perf_counter() - t0

    samples, dims = [], []
    t0 = time.perf_counter()
    if strategy == "specialize" and ctx.symbols:
        support: set[int] = set()
        first = None
        for k in range(n_samples):
            values, (positions, num_rows) = _draw_sample(ctx, rows, seed + k)
            basis = rref(num_rows, lambda z: z == 0)
            samples.append({name: str(v) for name, v in values.items()})
            dims.append(ncols - len(basis))
            for v in nullspace_from_rref(basis, ncols, Fraction(1), Fraction(0)):
                support.update(c for c, val in v.items() if val != 0)
            if first is None:
                first = (positions, num_rows)
        if len(set(dims)) != 1:
            raise SpecializationMismatch(
                f"solution dimensions {dims} differ across samples; use strategy 'symbolic'")
        # columns outside every sampled kernel vanish generically; drop them, then
        # keep rows independent at the first sample (they stay independent over the field)
        positions, num_rows = first
        kept, _ = independent_rows([{c: v for c, v in r.items() if c in support} for r in num_rows],
                                   lambda z: z == 0)
        cols = sorted(support)
        sub = [{c: v for c, v in rows[positions[i]].items() if c in support} for i in kept]
        vectors = _nullspace(sub, cols, ctx)
        if len(vectors) != dims[0]:
            raise ConfirmationError("restricted system has the wrong dimension over the parameter field")
    else:
        vectors = _nullspace(rows, range(ncols), ctx)
    timings["solve"] = time.perf_counter() - t0

    vectors = _canonical_basis(vectors, ncols, ctx) if vectors else []
    basis = _vectors_to_ops(vectors, unknowns, ctx, N)

    t0 = time.perf_counter()
    for D in basis:
        m = dw_membership(D, W, verify_top, polys)
        if not m.member:
            raise ConfirmationError(f"candidate failed re-verification at n = {m.witness_n}")
    timings["confirm"] = time.perf_counter() - t0
    if strategy == "symbolic" or not ctx.symbols:
        dims = [len(basis)]
    return OperatorSpace(W.name, s, n_max, basis, strategy, list(range(n_max + 1)),
                         list(range(n_max + 1, verify_top + 1)), samples, dims, timings, W)
