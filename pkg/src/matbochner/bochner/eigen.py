"""Eigenvalue maps and finite-index membership certificates for D(W)."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..diffop import DiffOp, apply
from ..field import ParamContext
from ..polymat import PolyMatrix, XPoly
from ..weight import Weight
from .moments import monic_sequence

__all__ = ["AdmissibilityError", "EigenSeq", "falling_factorial", "eigenvalue_map",
           "eigenvalue_poly", "is_eigen_admissible", "Membership", "dw_membership"]


class AdmissibilityError(ValueError):
    """Coefficient F_i has degree above i."""


def falling_factorial(n: int, i: int) -> int:
    out = 1
    for k in range(i):
        out *= n - k
    return out


def _falling_poly(ctx: ParamContext, i: int) -> XPoly:
    # n (n-1) ... (n-i+1) as a polynomial in the variable n
    p = XPoly.const(ctx, 1, "n")
    for k in range(i):
        p = p * XPoly(ctx, [-k, 1], "n")
    return p


def is_eigen_admissible(D: DiffOp) -> int | None:
    """None if ``deg F_i <= i`` for all i, else the first offending order."""
    for i, F in D.terms():
        if F.degree_max() > i:
            return i
    return None


def _check(D: DiffOp):
    bad = is_eigen_admissible(D)
    if bad is not None:
        raise AdmissibilityError(f"not eigenvalue-admissible: deg F_{bad} > {bad}")


def eigenvalue_map(D: DiffOp, n: int) -> PolyMatrix:
    """``Lambda_n = sum_i [n]_i F_i^i`` with ``F_i^i`` the x^i coefficient of F_i."""
    _check(D)
    out = PolyMatrix.zeros(D.ctx, D.n)
    for i, F in D.terms():
        k = falling_factorial(n, i)
        if k:
            out = out + F.coeff(i) * k
    return out


@dataclass(frozen=True)
class EigenSeq:
    """Entrywise polynomials in n with ``Lambda_n = entries(n)``."""

    entries: PolyMatrix  # XPoly entries in the variable n

    def at(self, n: int) -> PolyMatrix:
        return self.entries.map(lambda p: XPoly.const(p.ctx, p.eval(n)))

    def degree(self):
        return self.entries.degree_max()

    def __getitem__(self, ij) -> XPoly:
        return self.entries[ij]


def eigenvalue_poly(D: DiffOp) -> EigenSeq:
    _check(D)
    ctx, N = D.ctx, D.n
    zero = XPoly(ctx, (), "n")
    rows = [[zero] * N for _ in range(N)]
    for i, F in D.terms():
        ff = _falling_poly(ctx, i)
        lead = F.coeff(i)
        for r in range(N):
            for c in range(N):
                s = lead[r, c].coeff(0)
                if not s.is_zero():
                    rows[r][c] = rows[r][c] + ff * s
    return EigenSeq(PolyMatrix(ctx, rows))


@dataclass(frozen=True)
class Membership:
    member: bool
    verified_up_to: int | None
    witness_n: int | None
    reason: str
    eigenvalues: list = field(default_factory=list, repr=False)

    def __bool__(self):
        return self.member

    @property
    def label(self) -> str:
        if self.member:
            return f"member (verified up to n_max = {self.verified_up_to})"
        return f"non-member (witness n = {self.witness_n}: {self.reason})"


def eigen_residual(P: PolyMatrix, D: DiffOp, n: int) -> PolyMatrix:
    return apply(P, D) - eigenvalue_map(D, n) * P


def dw_membership(D: DiffOp, W: Weight, n_max: int, polys=None) -> Membership:
    """Check ``P_n D = Lambda_n(D) P_n`` for n = 0..n_max.

    A pass is a finite certificate only; it is always labelled with n_max.  For
    operators violating ``deg F_i <= i`` the witness is the first n with
    ``P_n D`` not a constant left multiple of ``P_n``.
    """
    if D.n != W.size:
        raise ValueError("size mismatch")
    polys = polys if polys is not None else monic_sequence(W, n_max)
    bad = is_eigen_admissible(D)
    lams = []
    for n in range(n_max + 1):
        image = apply(polys[n], D)
        if bad is not None:
            if image.degree_max() > n or image != image.coeff(n) * polys[n]:
                return Membership(False, None, n, f"deg F_{bad} > {bad}; P_n D is not a multiple of P_n")
            continue
        lam = eigenvalue_map(D, n)
        lams.append(lam)
        if image != lam * polys[n]:
            return Membership(False, None, n, "eigenvalue equation fails", lams)
    if bad is not None:
        return Membership(False, None, None, f"deg F_{bad} > {bad}")
    return Membership(True, n_max, None, "", lams)
