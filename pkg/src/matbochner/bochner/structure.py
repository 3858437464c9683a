"""Structure checks on computed slices: centralizer, polynomial-in-D, fullness, representations."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import factorial

from ..diffop import DiffOp, commutator, compose
from ..field import Scalar
from ..polymat import PolyMatrix, XPoly
from ..report import FAIL, INCONCLUSIVE, PASS, CheckRecord
from ..weight import Weight, is_w_symmetric
from .ansatz import OperatorSpace
from .eigen import eigenvalue_map, eigenvalue_poly
from .linalg import rref

__all__ = ["double_falling", "ElementChecks", "centralizer_checks", "PolyInD", "poly_in_d",
           "FullnessVerdict", "fullness_probe", "representation_check", "default_generator"]

CENTRALIZER_CHECKS = ("commutes", "eigenvalue_criterion", "scalar_leading", "upper_triangular",
                      "coefficient_profile")


def double_falling(n: int, k: int) -> int:
    """``n (n-2) ... (n-2(k-1))``; 1 for k = 0."""
    out = 1
    for j in range(k):
        out *= n - 2 * j
    return out


@dataclass
class ElementChecks:
    index: int
    order: int
    results: dict[str, bool]
    notes: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.results.values())


def _eigen_criterion(D: DiffOp, a: Scalar, b: Scalar) -> tuple[bool, str]:
    lam = eigenvalue_poly(D)
    p, q, r = lam[0, 0], lam[1, 1], lam[0, 1]
    n_ab = XPoly(D.ctx, [0, a * b], "n")
    resid = r - n_ab * (p - q)
    return resid.is_zero(), f"r(n) - ab n (p(n) - q(n)) = {resid.to_text()}"


def _coefficient_profile(D: DiffOp, a: Scalar) -> tuple[bool, str]:
    """Leading coefficient ``[[alpha, a(alpha-beta)x], [0, beta]]`` and the diagonal x^k pattern."""
    s = D.order
    F = D.coeff(s)
    ctx = D.ctx
    if F.degree_max() > 1 or not F[1, 0].is_zero():
        return False, "leading coefficient not of the form [[alpha, *], [0, beta]]"
    alpha, beta = F[0, 0], F[1, 1]
    if not (alpha.is_constant() and beta.is_constant()):
        return False, "diagonal of the leading coefficient is not constant"
    al, be = alpha.coeff(0), beta.coeff(0)
    if F[0, 1] != XPoly(ctx, [0, a * (al - be)]):
        return False, f"leading (0,1) entry is {F[0, 1]}, expected a(alpha - beta) x"
    for k in range(1, s + 1):
        G = D.coeff(s - k)
        for i, lead in ((0, al), (1, be)):
            expected = XPoly.monomial(ctx, k, lead * ctx.const(Fraction((-1) ** k * double_falling(s, k),
                                                                        factorial(k))))
            h = G[i, i] - expected
            if not h.is_zero() and h.degree() > k - 1:
                return False, f"F_{s - k}[{i},{i}] minus the x^{k} term has degree {h.degree()}"
    return True, ""


def centralizer_checks(space: OperatorSpace, D0: DiffOp, a: Scalar | None = None,
                       b: Scalar | None = None) -> list[ElementChecks]:
    """Five per-element checks against the reference operator ``D0`` (2x2 family)."""
    ctx = D0.ctx
    a = ctx.sym("a") if a is None else a
    b = ctx.sym("b") if b is None else b
    out = []
    for idx, D in enumerate(space.basis):
        res, notes = {}, {}
        res["commutes"] = commutator(D, D0).is_zero()
        res["eigenvalue_criterion"], note = _eigen_criterion(D, a, b)
        if not res["eigenvalue_criterion"]:
            notes["eigenvalue_criterion"] = note
        lead = D.coeff(D.order)
        res["scalar_leading"] = D.order % 2 == 1 or lead.is_scalar_multiple_of_identity()
        res["upper_triangular"] = D.is_upper_triangular()
        res["coefficient_profile"], note = _coefficient_profile(D, a)
        if note:
            notes["coefficient_profile"] = note
        out.append(ElementChecks(idx, D.order, res, notes))
    return out


@dataclass
class PolyInD:
    success: bool
    coefficients: list[Scalar]
    reason: str = ""
    remainder: DiffOp | None = None

    def __bool__(self):
        return self.success


def _scalar_constant(M: PolyMatrix) -> Scalar | None:
    if M.degree_max() > 0 or not M.is_scalar_multiple_of_identity():
        return None
    return M[0, 0].coeff(0)


def poly_in_d(op: DiffOp, D0: DiffOp) -> PolyInD:
    """Coefficients ``alpha_k`` with ``op = sum_k alpha_k D0^k`` by descending-order elimination."""
    ctx = op.ctx
    m0 = D0.order
    c0 = _scalar_constant(D0.coeff(m0)) if m0 > 0 else None
    if c0 is None or c0.is_zero():
        return PolyInD(False, [], "reference operator needs positive order and scalar leading coefficient")
    if not op.is_zero() and op.order % m0:
        return PolyInD(False, [], f"order {op.order} is not a multiple of {m0}", op)
    powers = [DiffOp.identity(ctx, op.n)]
    coeffs: dict[int, Scalar] = {}
    rem = op
    while not rem.is_zero():
        m = rem.order
        if m % m0:
            return PolyInD(False, [], f"remainder has order {m}, not a multiple of {m0}", rem)
        k = m // m0
        lead = _scalar_constant(rem.coeff(m))
        if lead is None:
            return PolyInD(False, [], f"order-{m} coefficient {rem.coeff(m)} is not a scalar constant", rem)
        while len(powers) <= k:
            powers.append(compose(powers[-1], D0))
        alpha = lead / c0 ** k
        coeffs[k] = alpha
        rem = rem - powers[k] * alpha
    top = max(coeffs, default=-1)
    return PolyInD(True, [coeffs.get(k, ctx.zero) for k in range(top + 1)])


def default_generator(space: OperatorSpace) -> DiffOp | None:
    """Lowest positive-order basis element with a scalar constant leading coefficient."""
    cands = [D for D in space.basis if D.order > 0 and _scalar_constant(D.coeff(D.order)) is not None]
    return min(cands, key=lambda D: D.order) if cands else None


@dataclass
class FullnessVerdict:
    verdict: str
    status: str
    witnesses: list[DiffOp] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def record(self) -> CheckRecord:
        details = dict(self.details, verdict=self.verdict, witnesses=self.witnesses)
        return CheckRecord("fullness", self.status, "fullness of D(W) at bounded order", details)


def _witness_search(space: OperatorSpace, W: Weight) -> list[DiffOp] | None:
    consts = [D for D in space.basis if D.order == 0 and not D.is_zero()]
    for size in range(len(consts), 1, -1):
        for subset in combinations(consts, size):
            if any(not compose(A, B).is_zero() or not compose(B, A).is_zero()
                   for A, B in combinations(subset, 2)):
                continue
            if not all(is_w_symmetric(A, W) for A in subset):
                continue
            total = subset[0]
            for A in subset[1:]:
                total = total + A
            central = all(commutator(total, B).is_zero() for B in space.basis)
            det = total.coeff(0).det()
            if central and det.is_constant() and not det.is_zero():
                return list(subset)
    return None


def fullness_probe(space: OperatorSpace, D0: DiffOp | None = None,
                   W: Weight | None = None) -> FullnessVerdict:
    """Explicit orthogonal-idempotent witnesses, else the leading-coefficient argument."""
    W = W if W is not None else space.source
    if not space.basis:
        return FullnessVerdict("inconclusive (empty space)", INCONCLUSIVE)
    if W is not None:
        wit = _witness_search(space, W)
        if wit:
            return FullnessVerdict("fullness witnesses found", PASS, wit,
                                   {"pairwise_products": "zero", "sum": "central, invertible"})
    D0 = D0 if D0 is not None else default_generator(space)
    if D0 is None:
        return FullnessVerdict("inconclusive (no generator of positive order)", INCONCLUSIVE)
    decomps = []
    for D in space.basis:
        dec = poly_in_d(D, D0)
        if not dec:
            return FullnessVerdict("inconclusive (undecomposable element)", INCONCLUSIVE,
                                   details={"element": D, "reason": dec.reason})
        decomps.append(dec.coefficients)
    # a product of two polynomials in D0 has leading coefficient alpha_n beta_m c0^(n+m) I
    products = []
    for i, j in combinations_with_replacement(range(len(space.basis)), 2):
        A, B = space.basis[i], space.basis[j]
        prod = compose(A, B)
        lead = prod.coeff(prod.order)
        expected = A.coeff(A.order) * B.coeff(B.order)
        products.append({"pair": [i, j], "order": prod.order,
                         "leading_nonzero": not lead.is_zero() and lead == expected})
    if not all(p["leading_nonzero"] for p in products):
        return FullnessVerdict("inconclusive (product leading coefficient mismatch)", INCONCLUSIVE,
                               details={"products": products})
    return FullnessVerdict(f"not full (desk-scale, order ≤ {space.s})", PASS,
                           details={"decompositions": decomps, "products": products})


def representation_check(space: OperatorSpace, n_range) -> CheckRecord:
    """``Lambda_n`` is additive and multiplicative on basis pairs and separates the basis."""
    ns = list(n_range)
    basis = space.basis
    failures = []
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            for A, B, tag in ((basis[i], basis[j], (i, j)), (basis[j], basis[i], (j, i))):
                prod, total = compose(A, B), A + B
                for n in ns:
                    la, lb = eigenvalue_map(A, n), eigenvalue_map(B, n)
                    if eigenvalue_map(prod, n) != la * lb:
                        failures.append({"pair": list(tag), "n": n, "law": "multiplicative"})
                    if eigenvalue_map(total, n) != la + lb:
                        failures.append({"pair": list(tag), "n": n, "law": "additive"})
    # separation: the linear map coefficients -> (Lambda_n)_n must be injective on the span
    rows = []
    for D in basis:
        row, col = {}, 0
        for n in ns:
            lam = eigenvalue_map(D, n)
            for _, _, e in lam.entries():
                c = e.coeff(0)
                if not c.is_zero():
                    row[col] = c
                col += 1
        rows.append(row)
    rank = len(rref(rows, lambda z: z.is_zero())) if rows else 0
    separated = rank == len(basis)
    details = {"n_range": ns, "failures": failures, "rank": rank, "dimension": len(basis)}
    status = PASS if not failures and separated else FAIL
    return CheckRecord("representation", status, "eigenvalue maps form a separating family of representations",
                       details)
