"""Command line front end.

Exit codes: 0 when every check passes, 1 when a check finds a
counterexample, 2 when the input is malformed or inconsistent.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .cocycle import LocFun, cohomology_group
from .corpus import example2, example_pair
from .invariants import (
    Obstruction,
    Side,
    SizeLimit,
    bowen_franks,
    det_id_minus,
    one_sided_conjugacy_obstruction,
    permutation_equivalent,
    total_amalgamation,
    zeta_polynomial,
)
from .jsonio import (
    InputError,
    certificate_to_json,
    code_to_json,
    dumps,
    load_json,
    locfun_from_json,
    locfun_to_json,
    map_from_json,
    matrix_from_json,
    orbit_data_from_json,
    orbit_data_to_json,
    sft_from_json,
)
from .orbitmap import (
    IncompatibleSpaces,
    MalformedMap,
    NoRuleMatch,
    OrbitMapData,
    compose,
    compose_maps,
    identity_map,
    map_equal,
    psi_transfer,
    verify_orbit_map,
)
from .scoe import (
    InvalidWitness,
    NotInverse,
    NotStrong,
    OrbitEquationFails,
    build_certificate,
    b_witness_failure,
    build_two_sided,
    check_c1n,
    check_klp,
    is_b_witness,
)
from .sft import SftError, TransitionMatrix

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_INPUT_ERRORS = (InputError, IncompatibleSpaces, MalformedMap, NoRuleMatch, KeyError, TypeError)


class Output:
    """Collects text lines and a JSON payload; prints whichever was asked for."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines = []
        self.payload = {}

    def line(self, text=""):
        self.lines.append(text)

    def emit(self):
        if self.fmt == "json":
            print(dumps(self.payload))
        else:
            print("\n".join(self.lines))


def _load_sft(path):
    return sft_from_json(load_json(path))


def _load_bundle(path):
    return orbit_data_from_json(load_json(path))


# commands -------------------------------------------------------------------

def cmd_validate(args, out: Output) -> int:
    obj = load_json(args.matrix)
    m = matrix_from_json(obj)
    try:
        sft_from_json(obj)
    except SftError as exc:
        out.payload = {"valid": False, "reason": type(exc).__name__, "detail": str(exc)}
        out.line(f"invalid: {type(exc).__name__}: {exc}")
        return EXIT_FAIL
    out.payload = {"valid": True, "n": m.n}
    out.line(f"ok: {m.n} states, irreducible, condition (I) holds")
    return EXIT_OK


def cmd_words(args, out: Output) -> int:
    s = _load_sft(args.matrix)
    if args.length > args.max_depth:
        raise InputError(f"length {args.length} exceeds --max-depth {args.max_depth}")
    words = [s.spell(w) for w in s.words(args.length)]
    out.payload = {"length": args.length, "count": len(words), "words": words}
    out.line(f"{len(words)} admissible words of length {args.length}")
    out.lines.extend(words)
    return EXIT_OK


def _invariants(m, cap: int) -> dict:
    col = total_amalgamation(m, Side.COLUMN)
    row = total_amalgamation(m, Side.ROW)
    coh = cohomology_group(m)
    return {
        "det_id_minus": det_id_minus(m),
        "zeta": list(zeta_polynomial(m).trimmed()),
        "zeta_text": str(zeta_polynomial(m)),
        "bowen_franks": bowen_franks(m),
        "cohomology": {"invariant_factors": list(coh.invariant_factors), "order_unit": list(coh.order_unit)},
        "column_amalgamation": col.matrix.tolist(),
        "row_amalgamation": row.matrix.tolist(),
    }


def cmd_invariants(args, out: Output) -> int:
    sfts = [_load_sft(p) for p in args.matrices]
    reports = []
    for path, s in zip(args.matrices, sfts):
        inv = _invariants(s, args.perm_cap)
        reports.append({"file": path, **inv})
        out.line(f"{path}:")
        out.line(f"  det(id - A)        {inv['det_id_minus']}")
        out.line(f"  det(id - tA)       {inv['zeta_text']}")
        out.line(f"  Bowen-Franks       {_group_text(inv['bowen_franks'])}")
        out.line(f"  H^A, [1]           {_group_text(inv['cohomology']['invariant_factors'])}, "
                 f"{inv['cohomology']['order_unit']}")
        out.line(f"  column amalgamation {inv['column_amalgamation']}")
        out.line(f"  row amalgamation    {inv['row_amalgamation']}")
    out.payload = {"matrices": reports}
    if len(sfts) == 2:
        a, b = sfts
        same_zeta = zeta_polynomial(a) == zeta_polynomial(b)
        verdict = one_sided_conjugacy_obstruction(a, b, cap=args.perm_cap)
        out.payload["comparison"] = {"zeta_equal": same_zeta, "one_sided_conjugacy": verdict.value}
        out.line(f"zeta polynomials equal: {same_zeta}")
        out.line(f"one-sided conjugacy: {verdict.value}")
    return EXIT_OK


def _group_text(factors) -> str:
    return " + ".join(f"Z/{d}" if d else "Z" for d in factors) or "0"


def cmd_amalgamate(args, out: Output) -> int:
    m = matrix_from_json(load_json(args.matrix))
    res = total_amalgamation(m, Side(args.side))
    out.payload = {"side": args.side, "matrix": res.matrix.tolist(), "merges": [list(g) for g in res.history]}
    out.line(f"total {args.side} amalgamation: {res.matrix.tolist()}")
    for g in res.history:
        out.line(f"  merged states {list(g)}")
    if args.compare:
        other = matrix_from_json(load_json(args.compare))
        eq = permutation_equivalent(res.matrix, other, cap=args.perm_cap)
        out.payload["permutation_equivalent_to"] = {"file": args.compare, "result": eq}
        out.line(f"permutation equivalent to {args.compare}: {eq}")
    return EXIT_OK


def _orbit_data_from_args(args):
    if len(args.inputs) == 1:
        d, _ = _load_bundle(args.inputs[0])
        return d
    if len(args.inputs) != 3:
        raise InputError("check-orbit takes a bundle or MAP K L")
    h = map_from_json(load_json(args.inputs[0]))
    k = locfun_from_json(h.source, load_json(args.inputs[1]))
    l = locfun_from_json(h.source, load_json(args.inputs[2]))
    try:
        return OrbitMapData(h, k, l)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_check_orbit(args, out: Output) -> int:
    d = _orbit_data_from_args(args)
    v = verify_orbit_map(d)
    if v:
        out.payload = {"verdict": "Verified"}
        out.line("Verified")
        return EXIT_OK
    src, tgt = d.source, d.target
    out.payload = {
        "verdict": "Counterexample",
        "word": src.decode(v.word),
        "left": tgt.decode(v.left),
        "right": tgt.decode(v.right),
    }
    out.line(f"Counterexample on cylinder {src.spell(v.word)}: "
             f"sigma^k h(sigma x) starts {tgt.spell(v.left)!r}, sigma^l h(x) starts {tgt.spell(v.right)!r}")
    return EXIT_FAIL


def cmd_compose(args, out: Output) -> int:
    g, _ = _load_bundle(args.outer)
    h, _ = _load_bundle(args.inner)
    d = compose(g, h)
    ok = bool(verify_orbit_map(d))
    out.payload = {"composite": orbit_data_to_json(d), "verified": ok,
                   "is_identity": d.source == d.target and map_equal(d.map, identity_map(d.source))}
    out.line(dumps(out.payload))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_psi(args, out: Output) -> int:
    d, _ = _load_bundle(args.bundle)
    f = locfun_from_json(d.target, load_json(args.function))
    res = psi_transfer(d, f)
    out.payload = locfun_to_json(res)
    out.line(dumps(out.payload))
    return EXIT_OK


def _certificate(args):
    fwd, b1 = _load_bundle(args.forward)
    bwd, b2 = _load_bundle(args.backward)
    return build_certificate(fwd, bwd, b1, b2)


def _scoe_failure(out: Output, exc) -> int:
    out.payload = {"verdict": {"scoe": False, "N_h": None, "lag": None, "failures": [str(exc)]}}
    out.line(f"not certified: {exc}")
    return EXIT_FAIL


def cmd_scoe(args, out: Output) -> int:
    try:
        cert = _certificate(args)
        two = build_two_sided(cert)
    except (NotStrong, NotInverse, OrbitEquationFails, InvalidWitness) as exc:
        return _scoe_failure(out, exc)
    out.payload = certificate_to_json(cert, two)
    out.line("scoe: true")
    out.line(f"N_h = {cert.n_h} (witnesses shifted to minimum 0: {cert.n_h_normalized})")
    out.line(f"two-sided lag = {two.lag}")
    return EXIT_OK


def cmd_two_sided(args, out: Output) -> int:
    try:
        cert = _certificate(args)
        two = build_two_sided(cert)
    except (NotStrong, NotInverse, OrbitEquationFails, InvalidWitness) as exc:
        return _scoe_failure(out, exc)
    out.payload = {
        "forward_code": code_to_json(two.forward),
        "backward_code": code_to_json(two.backward),
        "lag": two.lag,
        "b1": locfun_to_json(two.b1),
        "b2": locfun_to_json(two.b2),
        "N_h": cert.n_h,
    }
    out.line(f"lag {two.lag} (certificate N_h {cert.n_h})")
    out.line(f"forward code, window {two.forward.window}:")
    for key, v in out.payload["forward_code"]["map"].items():
        out.line(f"  {key} -> {v}")
    out.line(f"backward code, window {two.backward.window}:")
    for key, v in out.payload["backward_code"]["map"].items():
        out.line(f"  {key} -> {v}")
    return EXIT_OK


# corpus -----------------------------------------------------------------------

@dataclass
class Row:
    example: str
    check: str
    ok: bool
    detail: str = ""


@dataclass
class Battery:
    rows: list = field(default_factory=list)

    def add(self, example, check, ok, detail=""):
        self.rows.append(Row(example, check, bool(ok), detail))


# c1 = l1 - k1 as listed for example 2, on aa, ab, ba, bb
_C1_REFERENCE = {"αα": 1, "αβ": 2, "βα": 0, "ββ": 1}


def _table_text(f: LocFun) -> str:
    return "{" + ", ".join(f"{f.sft.spell(w)}: {v}" for w, v in sorted(f.table.items())) + "}"


def _perturbed(f: LocFun, key) -> LocFun:
    table = dict(f.table)
    table[key] += 1
    return LocFun(f.sft, f.depth, table)


def run_corpus(perturb: str | None = None, max_cycle: int = 6, perm_cap: int = 8) -> Battery:
    bat = Battery()

    a1, b1m = example_pair(1)
    bat.add("1", "valid", True, "both irreducible with condition (I)")
    d = (det_id_minus(a1), det_id_minus(b1m))
    bat.add("1", "det(id - A) = det(id - B) = -1", d == (-1, -1), f"{d}")
    za, zb = zeta_polynomial(a1), zeta_polynomial(b1m)
    bat.add("1", "zeta polynomials differ", za != zb, f"{za} vs {zb}")

    ex = example2()
    h, g, b1, b2 = ex.h, ex.g, ex.b1, ex.b2
    first = sorted(h.l.table)[0]
    if perturb == "k1":
        h = OrbitMapData(h.map, _perturbed(h.k, first), h.l)
    elif perturb == "l1":
        h = OrbitMapData(h.map, h.k, _perturbed(h.l, first))
    elif perturb == "b1":
        b1 = _perturbed(b1, sorted(b1.table)[0])
    reference = dict(_C1_REFERENCE)
    if perturb == "c1":
        reference["αβ"] += 1

    za, zb = zeta_polynomial(ex.A), zeta_polynomial(ex.B)
    bat.add("2", "zeta polynomials equal 1 - 2t", za == zb and za.trimmed() == (1, -2), f"{za}")
    obs = one_sided_conjugacy_obstruction(ex.A, ex.B, cap=perm_cap)
    col_b = total_amalgamation(ex.B, Side.COLUMN).matrix
    col_a = total_amalgamation(ex.A, Side.COLUMN).matrix
    bat.add("2", "column amalgamations: B fixed, A -> [2]",
            col_b == ex.B.matrix and col_a.tolist() == [[2]], f"{col_a.tolist()}, {col_b.tolist()}")
    bat.add("2", "one-sided conjugacy obstructed", obs is Obstruction.OBSTRUCTED, obs.value)

    for name, dd in (("h", h), ("g", g)):
        v = verify_orbit_map(dd)
        detail = "" if v else f"separating word {dd.source.spell(v.word)}"
        bat.add("2", f"orbit equation for {name}", v, detail)
    ida = map_equal(compose_maps(g.map, h.map), identity_map(ex.A))
    idb = map_equal(compose_maps(h.map, g.map), identity_map(ex.B))
    bat.add("2", "g o h = id and h o g = id", ida and idb)

    c1 = psi_transfer(h, LocFun.constant(ex.B, 1)).refine(2)
    got = {ex.A.spell(w): v for w, v in c1.table.items()}
    bad = sorted(k for k in reference if got.get(k) != reference[k])
    bat.add("2", "Psi_h(1) equals the listed c1", not bad, f"differs on {bad}" if bad else "")

    for name, dd, bb in (("b1", h, b1), ("b2", g, b2)):
        ok = is_b_witness(dd, bb)
        detail = ""
        if not ok:
            w = b_witness_failure(dd, bb)
            detail = f"fails on cylinder {dd.source.spell(w)}"
        bat.add("2", f"{name} witnesses c = 1 + b - b o sigma", ok, detail)

    try:
        cert = build_certificate(h, g, b1 if is_b_witness(h, b1) else None, b2)
        bat.add("2", "certificate N_h = 3", cert.n_h == 3, f"N_h {cert.n_h}, normalized {cert.n_h_normalized}")
        klp = all(check_klp(h, g, p, 2, max_cycle) for p in range(3))
        bat.add("2", "klp identities, p <= 2", klp)
        c1n = all(check_c1n(h, cert.b1, n) and check_c1n(g, cert.b2, n) for n in range(5))
        bat.add("2", "c^n = n + b - b o sigma^n, n <= 4", c1n)
        two = build_two_sided(cert)
        bat.add("2", "two-sided conjugacy from sigma^b o h", True,
                f"lag {two.lag}, b1 {_table_text(two.b1)}, b2 {_table_text(two.b2)}")
    except (NotStrong, NotInverse, OrbitEquationFails, InvalidWitness) as exc:
        bat.add("2", "certificate", False, str(exc))

    a3, b3 = example_pair(3)
    ra = total_amalgamation(a3, Side.ROW).matrix
    cb = total_amalgamation(b3, Side.COLUMN).matrix
    target = TransitionMatrix(((2, 1), (1, 0)))
    ok = permutation_equivalent(ra, target, cap=perm_cap) and permutation_equivalent(cb, target, cap=perm_cap)
    bat.add("3", "row amalgamation of A ~ column amalgamation of B ~ [[2,1],[1,0]]", ok,
            f"{ra.tolist()}, {cb.tolist()}")
    ca, cb2 = cohomology_group(a3), cohomology_group(b3)
    bat.add("3", "(H, [1]) differ: not continuously orbit equivalent",
            ca != cb2, f"{ca.invariant_factors}/{ca.order_unit} vs {cb2.invariant_factors}/{cb2.order_unit}")
    return bat


def cmd_corpus(args, out: Output) -> int:
    bat = run_corpus(args.perturb, args.max_cycle, args.perm_cap)
    out.payload = {"rows": [r.__dict__ for r in bat.rows], "passed": all(r.ok for r in bat.rows)}
    width = max(len(r.check) for r in bat.rows)
    for r in bat.rows:
        mark = "PASS" if r.ok else "FAIL"
        out.line(f"{mark}  ex{r.example}  {r.check.ljust(width)}  {r.detail}".rstrip())
    failed = sum(not r.ok for r in bat.rows)
    out.line(f"{len(bat.rows) - failed}/{len(bat.rows)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


# parser -------------------------------------------------------------------------

def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a flag given before the subcommand from being reset by the subparser
    common.add_argument("--format", choices=["text", "json"], default=argparse.SUPPRESS)
    common.add_argument("--max-depth", type=_positive, default=argparse.SUPPRESS,
                        help="longest word length enumerated (default 10)")
    common.add_argument("--max-cycle", type=_positive, default=argparse.SUPPRESS,
                        help="longest cycle of the eventually periodic test points (default 6)")
    common.add_argument("--perm-cap", type=_positive, default=argparse.SUPPRESS,
                        help="largest matrix size for permutation-equivalence search (default 8)")

    p = argparse.ArgumentParser(prog="sftorbit", parents=[common],
                                description="Orbit equivalence certificates for one-sided shifts of finite type.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check irreducibility and condition (I)")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("words", parents=[common], help="list admissible words")
    s.add_argument("matrix")
    s.add_argument("--length", type=int, default=2)
    s.set_defaults(func=cmd_words)

    s = sub.add_parser("invariants", parents=[common], help="determinant, zeta, Bowen-Franks, amalgamations")
    s.add_argument("matrices", nargs="+")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("amalgamate", parents=[common], help="total row or column amalgamation")
    s.add_argument("matrix")
    s.add_argument("--side", choices=["row", "column"], default="column")
    s.add_argument("--compare", help="matrix file to test for permutation equivalence")
    s.set_defaults(func=cmd_amalgamate)

    s = sub.add_parser("check-orbit", parents=[common], help="verify the orbit equation")
    s.add_argument("inputs", nargs="+", metavar="FILE", help="a bundle, or MAP K L")
    s.set_defaults(func=cmd_check_orbit)

    s = sub.add_parser("compose", parents=[common], help="compose two orbit-map bundles (outer after inner)")
    s.add_argument("outer")
    s.add_argument("inner")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("psi", parents=[common], help="transfer a function along an orbit map")
    s.add_argument("bundle")
    s.add_argument("function")
    s.set_defaults(func=cmd_psi)

    for name, fn, text in (("scoe", cmd_scoe, "certify strong continuous orbit equivalence"),
                           ("two-sided", cmd_two_sided, "block codes of the induced two-sided conjugacy")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("forward")
        s.add_argument("backward")
        s.set_defaults(func=fn)

    s = sub.add_parser("corpus", parents=[common], help="run the bundled example battery")
    s.add_argument("--perturb", choices=["k1", "l1", "b1", "c1"],
                   help="bump one table entry to demonstrate a failing row")
    s.set_defaults(func=cmd_corpus)
    return p


DEFAULTS = {"format": "text", "max_depth": 10, "max_cycle": 6, "perm_cap": 8}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    out = Output(args.format)
    try:
        code = args.func(args, out)
    except (SftError, *_INPUT_ERRORS, ValueError, SizeLimit) as exc:
        if args.format == "json":
            print(dumps({"error": type(exc).__name__, "detail": str(exc)}))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
