"""Sparse exact Gauss-Jordan elimination over any field with ``==``/``+``/``*``/``/``.

Rows are ``dict[col, value]`` with zero entries omitted; columns are ordered by
their integer index, which fixes the (unique) reduced row echelon form.
"""
from __future__ import annotations

from typing import Callable, Sequence

Row = dict

__all__ = ["rref", "independent_rows", "nullspace_from_rref"]


def _is_zero_default(v) -> bool:
    return v == 0


def _reduce(row: Row, basis: dict[int, Row], is_zero) -> Row:
    """Eliminate every pivot column of ``basis`` (rows normalised at the pivot)."""
    row = dict(row)
    for p in sorted(set(row) & set(basis)):
        f = row.get(p)
        if f is None:
            continue
        for c, v in basis[p].items():
            nv = row.get(c, 0) - f * v if c in row else -(f * v)
            if is_zero(nv):
                row.pop(c, None)
            else:
                row[c] = nv
    return row


def independent_rows(rows: Sequence[Row], is_zero: Callable = _is_zero_default,
                     stop_at: int | None = None) -> tuple[list[int], dict[int, Row]]:
    """Greedy maximal independent subset (by index) and its echelon basis."""
    basis: dict[int, Row] = {}
    kept: list[int] = []
    for idx, row in enumerate(rows):
        r = _reduce(row, basis, is_zero)
        # later basis rows may not yet be cleared from r: reduce until stable
        while set(r) & set(basis):
            r = _reduce(r, basis, is_zero)
        if not r:
            continue
        p = min(r)
        inv = 1 / r[p] if not hasattr(r[p], "ctx") else r[p].ctx.one / r[p]
        r = {c: v * inv for c, v in r.items()}
        # keep the basis fully reduced against the new pivot
        for q, brow in basis.items():
            f = brow.get(p)
            if f is None:
                continue
            for c, v in r.items():
                nv = brow.get(c, 0) - f * v if c in brow else -(f * v)
                if is_zero(nv):
                    brow.pop(c, None)
                else:
                    brow[c] = nv
        basis[p] = r
        kept.append(idx)
        if stop_at is not None and len(kept) >= stop_at:
            break
    return kept, basis


def rref(rows: Sequence[Row], is_zero: Callable = _is_zero_default) -> dict[int, Row]:
    """Reduced row echelon form as ``{pivot column: normalised row}``."""
    return independent_rows(rows, is_zero)[1]


def nullspace_from_rref(basis: dict[int, Row], columns, one, zero) -> list[dict[int, object]]:
    """One vector per free column ``f``: ``v_f = 1``, ``v_p = -R_p[f]``.

    ``columns`` is a column count or an iterable of the column indices in play.
    """
    columns = range(columns) if isinstance(columns, int) else columns
    free = [c for c in columns if c not in basis]
    out = []
    for f in free:
        v = {f: one}
        for p, row in basis.items():
            val = row.get(f)
            if val is not None:
                v[p] = zero - val
        out.append(v)
    return out
