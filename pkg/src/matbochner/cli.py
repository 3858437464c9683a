"""``matbochner`` command line: verify, ansatz, ops and fourier subcommands.

Exit codes: 0 when every selected check passes, 1 when a check fails,
2 for usage or configuration errors.  JSON goes to ``--out`` (pretty,
sorted keys); a one-line-per-check summary goes to stdout.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .builtins import builtin_operator, load_operator, load_weight
from .diffop import DiffOp
from .field import FieldError, ParamContext
from .polymat import PolyMatrix, XPoly
from .report import FAIL, INCONCLUSIVE, PASS, CheckRecord, Manifest
from .weight import Weight

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

VERIFY_CHECKS = ("symmetry", "orthogonality", "recursions", "eigen", "fourier", "representation",
                 "quadrature")
DEFAULT_OPERATOR = {"cg2x2": "d_cg2x2", "wtilde": "dtilde", "ex3x3": "d_3x3"}
DEFAULT_TOL = 1e-8


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    weight: str = "builtin:cg2x2"
    mode: str = "exact"
    params: dict = field(default_factory=dict)
    nmax: int = 8
    order: int = 2
    seed: int = 0
    out: str | None = None
    checks: tuple[str, ...] = ()
    op: str | None = None
    n: int = 3
    tol: float = DEFAULT_TOL

    def manifest_parameters(self) -> dict:
        out = {"weight": self.weight, "nmax": self.nmax, "order": self.order,
               "params": {k: str(v) for k, v in sorted(self.params.items())}}
        if self.op:
            out["op"] = self.op
        if self.checks:
            out["checks"] = list(self.checks)
        if self.command == "ops":
            out["n"] = self.n
        return out


def parse_params(text: str | None) -> dict[str, Fraction | float]:
    """``a=1,b=1/2`` -> values; rationals stay exact, decimals become floats."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"bad parameter binding {item!r}; expected name=value")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            out[k] = Fraction(v) if "." not in v and "e" not in v.lower() else float(v)
        except ValueError as exc:
            raise UsageError(f"bad value for {k}: {v!r}") from exc
    return out


# -- shared helpers ------------------------------------------------------------------

def _load(cfg: RunConfig) -> Weight:
    try:
        return load_weight(cfg.weight)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    except (OSError, ValueError, FieldError) as exc:
        raise UsageError(f"cannot load weight {cfg.weight!r}: {exc}") from exc


def _operator(cfg: RunConfig, W: Weight) -> DiffOp:
    if cfg.op is None:
        name = DEFAULT_OPERATOR.get(W.name)
        if name is None:
            raise UsageError(f"weight {W.name!r} has no default operator; pass --op")
        return builtin_operator(name)
    try:
        D = load_operator(cfg.op, W.ctx)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    except (OSError, ValueError, FieldError) as exc:
        raise UsageError(f"cannot load operator {cfg.op!r}: {exc}") from exc
    if D.n != W.size:
        raise UsageError(f"operator is {D.n}x{D.n} but the weight is {W.size}x{W.size}")
    return D


def _numeric_ctx(cfg: RunConfig, W: Weight) -> ParamContext:
    missing = [s for s in W.ctx.symbols if s not in cfg.params and s not in W.ctx.exp_symbols]
    if missing:
        raise UsageError(f"numeric mode needs bindings for {', '.join(missing)}")
    return W.ctx.numeric({k: float(v) for k, v in cfg.params.items()})


def _max_abs(M: PolyMatrix, num_ctx) -> float:
    from .field import specialize

    vals = [abs(specialize(c, num_ctx)) for _, _, p in M.entries() for c in p.coeffs]
    return max(vals, default=0.0)


def _closed_form(W: Weight):
    from .bochner.moments import _has_closed_form
    from .hermite import ClosedFormFamily

    return ClosedFormFamily(W.ctx) if _has_closed_form(W) else None


# -- verify ----------------------------------------------------------------------------

def _check_symmetry(W, D, num_ctx, tol=DEFAULT_TOL) -> CheckRecord:
    from .weight import is_w_symmetric, symmetry_residuals_2x2

    res = is_w_symmetric(D, W)
    details: dict = {"dagger_route": res.symmetric}
    ok = res.symmetric
    if num_ctx is not None:
        dev = max((_max_abs(A, num_ctx) for _, F in res.residual.terms() for A in F.parts.values()),
                  default=0.0)
        details["max_abs_residual"] = dev
        ok = dev <= tol
    if W.size == 2 and D.is_upper_triangular():
        try:
            r = symmetry_residuals_2x2(D, W)
        except ValueError:
            pass
        else:
            details["residual_route"] = r.all_zero()
            details["nonzero_residuals"] = [f"{name}[{k}]" for name, k in r.nonzero()]
            ok = ok and (r.all_zero() or num_ctx is not None)
    return CheckRecord("symmetry", PASS if ok else FAIL, "D equals its formal W-adjoint", details)


def _check_orthogonality(W, nmax, num_ctx, tol=DEFAULT_TOL) -> CheckRecord:
    from .bochner import monic_sequence
    from .weight import inner_product

    P = monic_sequence(W, nmax)
    bad = []
    if num_ctx is None:
        for n in range(nmax + 1):
            for m in range(n):
                if not inner_product(P[n], P[m], W).is_zero():
                    bad.append([n, m])
    else:
        import numpy as np

        from .quadrature import quadrature_inner_product, required_nodes

        worst = 0.0
        for n in range(nmax + 1):
            for m in range(n + 1):
                G = quadrature_inner_product(P[n], P[m], W, num_ctx, required_nodes(P[n], P[m], W))
                if n == m:
                    if np.linalg.eigvalsh((G + G.T) / 2).min() <= 0:
                        bad.append([n, n])
                else:
                    worst = max(worst, float(np.max(np.abs(G))))
        if worst > tol:
            bad.append("off-diagonal blocks above tolerance")
        for x0 in (-2.0, -0.5, 0.0, 0.5, 2.0):
            Wx = W.numeric_matrix(x0, num_ctx)
            if np.linalg.eigvalsh((Wx + Wx.T) / 2).min() <= 0:
                bad.append(f"W({x0}) not positive definite")
    details = {"nmax": nmax, "violations": bad}
    fam = _closed_form(W)
    if fam is not None and num_ctx is None:
        lead_bad = [n for n in range(nmax + 1) if fam.q_polynomial(n).coeff(n) != fam.m_matrix(n)]
        details["leading_coefficient_mismatch"] = lead_bad
        bad = bad + lead_bad
    return CheckRecord("orthogonality", FAIL if bad else PASS,
                       "orthogonality of the monic sequence and leading coefficients", details)


def _check_recursions(W, nmax) -> CheckRecord:
    fam = _closed_form(W)
    if fam is None:
        return CheckRecord("recursions", INCONCLUSIVE, "three-term recursions in closed form",
                           {"reason": "no closed form for this weight"})
    bad = []
    for n in range(nmax + 1):
        if not fam.tilde_residual(n).is_zero():
            bad.append({"n": n, "recursion": "tilde"})
        if not fam.monic_residual(n).is_zero():
            bad.append({"n": n, "recursion": "monic"})
        mono, conj = fam.monic_recursion(n), fam.conjugated_recursion(n)
        if (mono.A, mono.B, mono.C) != (conj.A, conj.B, conj.C):
            bad.append({"n": n, "recursion": "closed form vs conjugated"})
    return CheckRecord("recursions", FAIL if bad else PASS, "three-term recursions in closed form",
                       {"nmax": nmax, "violations": bad})


def _check_eigen(W, D, nmax, num_ctx) -> CheckRecord:
    from .bochner import dw_membership, eigenvalue_map

    m = dw_membership(D, W, nmax)
    details = {"verdict": m.label}
    ok = m.member
    if ok and W.name == "cg2x2" and D == builtin_operator("d_cg2x2"):
        a, b = W.ctx.sym("a"), W.ctx.sym("b")
        wrong = []
        for n in range(nmax + 1):
            expected = PolyMatrix(W.ctx, [[XPoly.const(W.ctx, -2 * n - 2), XPoly.const(W.ctx, a * b * (-2 * n))],
                                          [XPoly.const(W.ctx, 0), XPoly.const(W.ctx, -2 * n)]])
            if eigenvalue_map(D, n) != expected:
                wrong.append(n)
        details["eigenvalue_closed_form_mismatch"] = wrong
        ok = not wrong
    return CheckRecord("eigen", PASS if ok else FAIL, "eigenfunction equations P_n D = Lambda_n P_n",
                       details)


def _check_fourier(W, D, seed) -> CheckRecord:
    from .weight import _family_params_2x2, fourier_form_2x2, fourier_membership

    res = fourier_membership(D, W)
    details = {"operator_member": res.member,
               "witness": res.witness.to_text() if res.witness is not None else None}
    ok = res.member
    try:
        a, _ = _family_params_2x2(W)
    except (ValueError, FieldError):
        a = None
    if a is not None:
        import random

        rng = random.Random(seed)
        ctx = W.ctx
        accepted = 0
        for _ in range(5):
            order = rng.randint(1, 3)
            ps = [XPoly(ctx, [rng.randint(-3, 3) for _ in range(j + 1)]) for j in range(order + 1)]
            qs = [XPoly(ctx, [rng.randint(-3, 3) for _ in range(j + 1)]) for j in range(order + 1)]
            accepted += fourier_membership(fourier_form_2x2(ps, qs, a), W).member
        details["random_family_accepted"] = f"{accepted}/5"
        ok = ok and accepted == 5
    return CheckRecord("fourier", PASS if ok else FAIL, "membership in the right Fourier algebra",
                       details)


def _check_representation(W, D, nmax) -> CheckRecord:
    from .bochner.ansatz import OperatorSpace
    from .bochner.structure import representation_check

    I = DiffOp.identity(W.ctx, W.size)
    basis = [I] if D.is_zero() or D == I else [I, D]
    space = OperatorSpace(W.name, D.order, D.order + 2, basis, "given", [], [])
    try:
        return representation_check(space, range(min(nmax, 6) + 1))
    except ValueError as exc:
        return CheckRecord("representation", FAIL, "eigenvalue maps form a separating family of representations",
                           {"error": str(exc)})


def _check_quadrature(W, nmax, num_ctx, tol=DEFAULT_TOL) -> CheckRecord:
    from .bochner import monic_sequence
    from .quadrature import gauss_hermite_check, required_nodes

    P = monic_sequence(W, nmax)
    worst = 0.0
    for n in range(nmax + 1):
        for m in range(n + 1):
            worst = max(worst, gauss_hermite_check(P[n], P[m], W, num_ctx, required_nodes(P[n], P[m], W)))
    return CheckRecord("quadrature", PASS if worst <= tol else FAIL,
                       "Gauss-Hermite cross-check of exact inner products",
                       {"max_abs_deviation": worst, "tolerance": tol})


def cmd_verify(cfg: RunConfig) -> tuple[int, Manifest]:
    W = _load(cfg)
    D = _operator(cfg, W)
    num_ctx = _numeric_ctx(cfg, W) if cfg.mode == "numeric" else None
    checks = cfg.checks or _default_checks(W, cfg.mode)
    unknown = [c for c in checks if c not in VERIFY_CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {', '.join(VERIFY_CHECKS)}")
    if "quadrature" in checks and num_ctx is None:
        raise UsageError("the quadrature check needs --mode numeric with --params")
    man = Manifest("verify", cfg.manifest_parameters(), cfg.mode, cfg.seed)
    for name in checks:
        if name == "symmetry":
            man.add(_check_symmetry(W, D, num_ctx, cfg.tol))
        elif name == "orthogonality":
            man.add(_check_orthogonality(W, cfg.nmax, num_ctx, cfg.tol))
        elif name == "recursions":
            man.add(_check_recursions(W, cfg.nmax))
        elif name == "eigen":
            man.add(_check_eigen(W, D, cfg.nmax, num_ctx))
        elif name == "fourier":
            man.add(_check_fourier(W, D, cfg.seed))
        elif name == "representation":
            man.add(_check_representation(W, D, cfg.nmax))
        elif name == "quadrature":
            man.add(_check_quadrature(W, min(cfg.nmax, 6), num_ctx, cfg.tol))
    return (EXIT_OK if man.all_pass else EXIT_FAIL), man


def _default_checks(W: Weight, mode: str) -> tuple[str, ...]:
    if mode == "numeric":
        return ("symmetry", "orthogonality", "quadrature")
    base = ["symmetry", "orthogonality", "eigen", "fourier", "representation"]
    if _closed_form(W) is not None:
        base.insert(2, "recursions")
    return tuple(base)


# -- ansatz ----------------------------------------------------------------------------

def order_range(order: int) -> list[int]:
    """The reported orders: 2..order, or just ``order`` below 2."""
    return list(range(min(order, 2), order + 1))


def cmd_ansatz(cfg: RunConfig) -> tuple[int, Manifest]:
    from .bochner import ansatz_solve, centralizer_checks, fullness_probe, poly_in_d
    from .bochner.structure import default_generator

    if cfg.mode != "exact":
        raise UsageError("ansatz runs in exact mode only")
    if cfg.order < 0:
        raise UsageError("--order must be non-negative")
    W = _load(cfg)
    man = Manifest("ansatz", cfg.manifest_parameters(), cfg.mode, cfg.seed)
    spaces = {}
    for s in order_range(cfg.order):
        spaces[s] = ansatz_solve(W, s, seed=cfg.seed)
    top = spaces[cfg.order]
    man.add(CheckRecord("dimensions", PASS, "dimensions of bounded-order slices of D(W)", {
        "orders": list(spaces), "dimensions": [sp.dimension for sp in spaces.values()],
        "sample_dimensions": {str(s): sp.sample_dims for s, sp in spaces.items()},
        "verified_up_to": top.n_max + 5, "basis": top.basis}))

    D0 = _operator(cfg, W) if cfg.op else (builtin_operator("d_cg2x2") if W.name == "cg2x2" else None)
    if W.name == "cg2x2" and D0 is not None:
        rows = centralizer_checks(top, D0)
        man.add(CheckRecord("centralizer", PASS if all(r.passed for r in rows) else FAIL,
                            "elements commute with D and have triangular eigenvalue form",
                            {"elements": [{"index": r.index, "order": r.order, **r.results, "notes": r.notes}
                                          for r in rows]}))
    gen = D0 if D0 is not None else default_generator(top)
    if gen is not None:
        decs = [poly_in_d(B, gen) for B in top.basis]
        if all(decs):
            verdict, status = "polynomial algebra in D (desk-scale)", PASS
        else:
            verdict = "not a polynomial algebra in one operator at this order"
            status = FAIL if W.name == "cg2x2" else INCONCLUSIVE
        man.add(CheckRecord("polynomial_in_d", status, "every element is a polynomial in D", {
            "verdict": verdict, "generator": gen,
            "coefficients": [d.coefficients if d else None for d in decs],
            "failures": [d.reason for d in decs if not d]}))
    fv = fullness_probe(top, D0 if W.name == "cg2x2" else None)
    man.add(fv.record())
    code = EXIT_FAIL if any(r.status == FAIL for r in man.records) else EXIT_OK
    return code, man


# -- ops and fourier -------------------------------------------------------------------

def cmd_ops(cfg: RunConfig) -> tuple[int, Manifest]:
    W = _load(cfg)
    fam = _closed_form(W)
    if fam is None:
        raise UsageError("closed forms exist for builtin:cg2x2 only")
    if cfg.n < 0:
        raise UsageError("--n must be non-negative")
    n = cfg.n
    tilde, mono = fam.tilde_recursion(n), fam.monic_recursion(n)
    details = {"n": n, "Q": fam.q_polynomial(n), "P": fam.monic_p(n), "M": fam.m_matrix(n),
               "tilde_recursion": {"A": tilde.A, "B": tilde.B, "C": tilde.C},
               "monic_recursion": {"A": mono.A, "B": mono.B, "C": mono.C}}
    man = Manifest("ops", cfg.manifest_parameters(), cfg.mode, cfg.seed)
    man.add(CheckRecord("closed_forms", PASS, "closed-form orthogonal polynomials and recursions", details))
    return EXIT_OK, man


def cmd_fourier(cfg: RunConfig) -> tuple[int, Manifest]:
    from .weight import fourier_membership

    W = _load(cfg)
    D = _operator(cfg, W)
    res = fourier_membership(D, W)
    verdict = "member" if res.member else f"non-member (witness frequency {res.witness.to_text()})"
    details = {"verdict": verdict,
               "witness_frequency": res.witness, "frequencies": res.frequencies,
               "dagger": res.dagger.to_json()}
    man = Manifest("fourier", cfg.manifest_parameters(), cfg.mode, cfg.seed)
    man.add(CheckRecord("fourier", PASS if res.member else FAIL,
                        "membership in the right Fourier algebra", details))
    return (EXIT_OK if res.member else EXIT_FAIL), man


COMMANDS = {"verify": cmd_verify, "ansatz": cmd_ansatz, "ops": cmd_ops, "fourier": cmd_fourier}


# -- argument parsing ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matbochner", description="Exact checks for conjugated-Hermite weight matrices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("verify", "run the verification suite"),
                            ("ansatz", "solve for bounded-order slices of D(W)"),
                            ("ops", "emit closed-form polynomials and recursion matrices"),
                            ("fourier", "right Fourier algebra membership of an operator")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--weight", default="builtin:cg2x2", help="builtin:<name> or a weight JSON file")
        p.add_argument("--mode", choices=("exact", "numeric"), default="exact")
        p.add_argument("--params", default=None, help="bindings such as a=1,b=1/2 (numeric mode)")
        p.add_argument("--nmax", type=int, default=8)
        p.add_argument("--order", type=int, default=2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write the JSON manifest here")
        p.add_argument("--checks", default=None, help=f"comma list from {', '.join(VERIFY_CHECKS)}")
        p.add_argument("--op", default=None, help="builtin:<name>, a builtin file name, or an operator file")
        p.add_argument("--n", type=int, default=3, help="index for ops")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="max-abs threshold in numeric mode")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    checks = tuple(c.strip() for c in ns.checks.split(",") if c.strip()) if ns.checks else ()
    return RunConfig(ns.command, ns.weight, ns.mode, parse_params(ns.params), ns.nmax, ns.order,
                     ns.seed, ns.out, checks, ns.op, ns.n, ns.tol)


def _summary(man: Manifest) -> str:
    lines = []
    for rec in sorted(man.records, key=lambda r: r.check):
        extra = rec.details.get("verdict", "")
        if rec.check == "dimensions":
            extra = "dims " + json.dumps(rec.details["dimensions"]) + " for s = " + json.dumps(rec.details["orders"])
        lines.append(f"{rec.status.upper():<12} {rec.check}" + (f"  {extra}" if extra else ""))
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = config_from_args(ns)
        if cfg.nmax < 0:
            raise UsageError("--nmax must be non-negative")
        code, man = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"matbochner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = man.dumps()
    if cfg.out:
        Path(cfg.out).write_text(text)
    print(_summary(man))
    return code


if __name__ == "__main__":
    sys.exit(main())
