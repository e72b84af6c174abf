"""Command-line front end, installed as ``tmod``.

Exit codes: 0 success, 1 parse or validation error, 2 a mathematical check
came out negative, 3 a reduction needed an inverse Frobenius.
"""

import argparse
import random
import sys

from .algebra import ParseError, get_field
from .duality import (
    DualData,
    DualityError,
    VerificationError,
    bidual,
    counterexample_demo,
    dual_closed_form,
    dual_morphism,
    dual_via_reduction,
    ext_full,
    ext_full_of_dual,
)
from .extcalc import (
    BiderState,
    NoForwardPivot,
    ReductionError,
    certificate_sum,
    dual_special_strategy,
    generic_strategy,
    inner_biderivation,
    reduce,
    strictly_pure_strategy,
)
from .formats import load_bider, load_morphism, load_tmodule, machine_dump
from .samples import random_strictly_pure
from .skew import SkewMatrix
from .tmodule import NotATModule, classify

EXIT_OK, EXIT_INVALID, EXIT_NEGATIVE, EXIT_NO_PIVOT = 0, 1, 2, 3


class Report:
    """Ordered (key, value) pairs rendered as text or as one JSON document."""

    def __init__(self, command):
        self.items = [("command", command)]

    def add(self, key, value):
        self.items.append((key, value))

    def verdict(self, name, ok):
        self.add(f"verdict: {name}", "pass" if ok else "FAIL")
        return ok

    def render(self, fmt):
        if fmt == "machine":
            return machine_dump(dict(self.items))
        out = []
        for key, value in self.items:
            block = _text(value)
            if "\n" in block:
                out.append(f"{key}:")
                out.extend("  " + line for line in block.splitlines())
            else:
                out.append(f"{key}: {block}")
        return "\n".join(out)


def _text(value):
    if isinstance(value, SkewMatrix):
        return _grid([[str(e) for e in row] for row in value.entries])
    if isinstance(value, tuple) and value and isinstance(value[0], tuple):
        return _grid([[str(x) for x in row] for row in value])
    if isinstance(value, list) and value and isinstance(value[0], str):
        return "\n".join(value)
    return str(value)


def _grid(rows):
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    return "\n".join("[ " + "  ".join(c.ljust(w) for c, w in zip(r, widths)) + " ]"
                     for r in rows)


def _coeffs(report, prefix, phi):
    for i, M in enumerate(phi.coeffs):
        report.add(f"{prefix} tau^{i} coefficient", M)


def _slots(basis):
    return ", ".join(f"(col {c + 1}, tau^{k})" for c, k in basis)


# -- commands ------------------------------------------------------------------

def cmd_validate(args, report):
    phi = load_tmodule(args.file)
    report.add("file", args.file)
    report.add("result", f"valid t-module of dimension {phi.dim} and tau-degree {phi.degree}")
    return EXIT_OK


def cmd_info(args, report):
    phi = load_tmodule(args.file)
    c = classify(phi)
    report.add("file", args.file)
    report.add("p", phi.p)
    report.add("d", c.dim)
    report.add("n", c.deg_tau)
    report.add("strictly pure", "yes" if c.strictly_pure else "no")
    report.add("nilpotence", "yes" if c.has_nilpotence else "no")
    report.add("Phi_t", phi.phi_t)
    return EXIT_OK


def cmd_dual(args, report):
    phi = load_tmodule(args.file)
    closed = reduced = None
    if args.method in ("closed", "both"):
        data = DualData(phi)
        closed = data.dual
        for j, B in enumerate(data.B):
            report.add(f"B_{j}", B)
    if args.method in ("reduce", "both"):
        reduced = dual_via_reduction(phi)
    dual = closed if closed is not None else reduced
    report.add("dual dimension", dual.dim)
    report.add("dual tau-degree", dual.degree)
    _coeffs(report, "dual", dual)
    if args.method == "both":
        ok = closed == reduced
        report.add("verdict", "closed-form = reduction" if ok else "closed-form != reduction")
        if not ok:
            _coeffs(report, "reduction", reduced)
            return EXIT_NEGATIVE
    return EXIT_OK


def cmd_ext(args, report):
    phi = load_tmodule(args.file)
    ext = ext_full_of_dual(phi) if args.of_dual else ext_full(phi)
    report.add("dimension", ext.dim)
    report.add("basis", _slots(ext.basis))
    report.add("action", ext.action)
    report.add("submodule block", ext.sub)
    report.add("quotient block", ext.quotient)
    report.verdict("block triangular with the expected blocks", True)
    return EXIT_OK


def cmd_bidual(args, report):
    phi = load_tmodule(args.file)
    data = DualData(phi)
    report.add("A-hat", data.a_hat)
    report.add("s = B_1 A_n^(1)", data.s)
    try:
        res = bidual(phi)
    except VerificationError as exc:
        report.add("error", str(exc))
        report.verdict("double dual = A_n^-1 Phi A_n", False)
        return EXIT_NEGATIVE
    report.add("basis", _slots(res.basis))
    _coeffs(report, "double dual", res.module)
    report.verdict("double dual = A_n^-1 Phi A_n", True)
    return EXIT_OK


def _pick_strategy(name, phi):
    if name == "dual-special":
        data = DualData(phi)
        return data.dual, dual_special_strategy(data)
    if name == "strictly-pure":
        return phi, strictly_pure_strategy(phi)
    if name == "generic":
        return phi, generic_strategy(phi)
    # auto
    c = classify(phi)
    if c.strictly_pure and c.deg_tau >= 2:
        return phi, strictly_pure_strategy(phi)
    return phi, generic_strategy(phi)


def cmd_reduce(args, report):
    phi = load_tmodule(args.source)
    state = load_bider(args.state)
    source, strategy = _pick_strategy(args.strategy, phi)
    if state.p != source.p:
        raise ParseError("biderivation and t-module have different characteristic",
                         source=args.state)
    red = reduce(state, source, strategy, args.shape)
    report.add("strategy", strategy.name)
    report.add("shape", args.shape)
    report.add("canonical form", "[" + ", ".join(str(e) for e in red.state.to_row()) + "]")
    report.add("certificate", [str(g) for g in red.certificate] or "none")
    report.add("passes", red.passes)
    ok = (state - red.state) == certificate_sum(red.certificate, source, strategy)
    report.verdict("input - output = sum of certificate", ok)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_dual_hom(args, report):
    f = load_morphism(args.file)
    g = dual_morphism(f)
    report.add("morphism", f.matrix)
    report.add("dual morphism", g.matrix)
    report.verdict("dual morphism commutes with t", True)
    return EXIT_OK


def cmd_demo(args, report):
    F = get_field(args.p)
    a = F(args.a)
    rep = counterexample_demo(args.p, a)
    report.add("p", args.p)
    report.add("a", a)
    report.add("source", rep.source.phi_t)
    report.add("dual (7 x 7)", rep.dual.phi_t)
    report.verdict("dual matches the expected 7 x 7 matrix", rep.dual_matches)
    report.add("basis of Ext^1_0(dual, C)", _slots(rep.ext0_basis))
    report.add("t-action on Ext^1_0(dual, C)", rep.ext0_action)
    report.add("claimed diag(T + t#3, T + t#3, T + t#3 - 1)", rep.claimed_ext0)
    report.add("t-action equals claimed", "yes" if rep.ext0_matches_claimed else "no")
    report.add("tau^0 residue", rep.residue)
    report.add("residue equals claimed diag(0, 0, -1)",
               "yes" if rep.residue_matches_claimed else "no")
    report.add("verdict", "Ext^1_0(dual, C) is NOT a t-module" if rep.not_a_tmodule
               else "Ext^1_0(dual, C) is a t-module")
    return EXIT_OK if (rep.not_a_tmodule and rep.dual_matches) else EXIT_NEGATIVE


def _random_params(rng):
    p = rng.choice([2, 3, 5])
    d = rng.randint(1, 3 if p < 5 else 2)
    n = rng.randint(2, 4 if p == 2 else 3)
    return p, d, n


def cmd_verify_bidual(args, report):
    rng = random.Random(args.seed)
    failures = 0
    for i in range(args.count):
        p, d, n = _random_params(rng)
        phi = random_strictly_pure(rng, p, d, n)
        try:
            bidual(phi)
            ok = dual_closed_form(phi) == dual_via_reduction(phi)
        except VerificationError:
            ok = False
        failures += not ok
        report.add(f"instance {i + 1} (p={p}, d={d}, n={n})", "pass" if ok else "FAIL")
    report.verdict(f"{args.count - failures}/{args.count} instances", failures == 0)
    return EXIT_OK if failures == 0 else EXIT_NEGATIVE


def cmd_verify_inner_zero(args, report):
    rng = random.Random(args.seed)
    failures = 0
    for i in range(args.count):
        p, d, n = _random_params(rng)
        phi = random_strictly_pure(rng, p, d, n, nilpotent=rng.random() < 0.3)
        F = get_field(p)
        U = BiderState(d, p)
        for j in range(d):
            for k in range(rng.randint(0, 2)):
                U.add_term(j, k, F.random_element(rng, 1, 0.2))
        delta = inner_biderivation(U, phi)
        strategy = strictly_pure_strategy(phi)
        red = reduce(delta, phi, strategy, "full")
        ok = red.state.is_zero() and certificate_sum(red.certificate, phi, strategy) == delta
        failures += not ok
        report.add(f"instance {i + 1} (p={p}, d={d}, n={n})", "pass" if ok else "FAIL")
    report.verdict(f"{args.count - failures}/{args.count} instances", failures == 0)
    return EXIT_OK if failures == 0 else EXIT_NEGATIVE


# -- entry point -------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="tmod", description="Duals of t-modules over F_p(T).")
    parser.add_argument("--format", choices=["text", "machine"], default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a .tm file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="dimension, degree and type of a t-module")
    p.add_argument("file")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("dual", help="the dual t-module")
    p.add_argument("file")
    p.add_argument("--method", choices=["closed", "reduce", "both"], default="closed")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("ext", help="the full Ext^1 t-module and its exact sequence")
    p.add_argument("file")
    p.add_argument("--of-dual", action="store_true",
                   help="use Ext^1 of the dual instead of Ext^1 of the module")
    p.set_defaults(func=cmd_ext)

    p = sub.add_parser("bidual", help="double dual and its comparison with the module")
    p.add_argument("file")
    p.set_defaults(func=cmd_bidual)

    p = sub.add_parser("reduce", help="reduce a biderivation modulo inner ones")
    p.add_argument("source")
    p.add_argument("state")
    p.add_argument("--strategy", default="auto",
                   choices=["auto", "strictly-pure", "generic", "dual-special"],
                   help="dual-special reduces on the dual of SOURCE")
    p.add_argument("--shape", choices=["full", "zero"], default="full")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("dual-hom", help="dual of a morphism given as a .hom file")
    p.add_argument("file")
    p.set_defaults(func=cmd_dual_hom)

    p = sub.add_parser("demo-counterexample",
                       help="module with nilpotence whose dual has no dual")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--a", default="1")
    p.set_defaults(func=cmd_demo)

    for name, func in (("verify-bidual", cmd_verify_bidual),
                       ("verify-inner-zero", cmd_verify_inner_zero)):
        p = sub.add_parser(name, help="randomized check")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--count", type=int, default=20)
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Report(args.command)
    try:
        code = args.func(args, report)
    except (ParseError, NotATModule, DualityError, FileNotFoundError) as exc:
        report.add("error", str(exc))
        residue = getattr(exc, "residue", None)
        if residue is not None:
            report.add("residue M0 - theta*I", residue)
        code = EXIT_INVALID
    except NoForwardPivot as exc:
        report.add("error", str(exc))
        code = EXIT_NO_PIVOT
    except ReductionError as exc:
        report.add("error", str(exc))
        code = EXIT_INVALID
    except VerificationError as exc:
        report.add("error", str(exc))
        code = EXIT_NEGATIVE
    except ValueError as exc:
        report.add("error", str(exc))
        code = EXIT_INVALID
    report.add("exit code", code)
    print(report.render(args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
