"""Strong continuous orbit equivalence certificates and the induced
two-sided conjugacy."""
from __future__ import annotations

from dataclasses import dataclass

from .cocycle import LocFun, cocycle_sum, compose_shift, is_coboundary, point_sum
from .orbitmap import (
    OrbitMapData,
    PrefixRuleMap,
    SlidingBlockCode,
    compose_codes,
    compose_maps,
    eval_ep,
    eval_prefix,
    from_block_code,
    identity_map,
    map_equal,
    post_shift,
    pre_shift,
    separating_word,
    shift_map,
    to_block_code,
    verify_orbit_map,
    _tabulate,
)
from .sft import eventually_periodic_points, shift_ep


class ScoeError(ValueError):
    pass


class NotStrong(ScoeError):
    def __init__(self, side, cycle, cycle_sum):
        super().__init__(f"{side} cocycle is not cohomologous to 1: cycle {cycle} has c-1 sum {cycle_sum}")
        self.side = side
        self.cycle = cycle
        self.cycle_sum = cycle_sum


class NotInverse(ScoeError):
    def __init__(self, side, word):
        super().__init__(f"maps are not mutually inverse ({side}); separating word {word}")
        self.side = side
        self.word = word


class OrbitEquationFails(ScoeError):
    def __init__(self, side, counterexample, spelled=None):
        where = spelled if spelled is not None else counterexample.word
        super().__init__(f"{side} data fails the orbit equation on cylinder {where}")
        self.side = side
        self.counterexample = counterexample


class InvalidWitness(ScoeError):
    pass


class NonConstantNh(AssertionError):
    pass


class ShiftCommutationFailed(AssertionError):
    pass


class ConjugacyCheckFailed(AssertionError):
    pass


def check_strong(d: OrbitMapData, side: str = "forward") -> LocFun:
    """A nonnegative ``b`` with ``l - k = 1 + b - b o sigma``, shifted so ``min b = 0``.

    Raises :class:`NotStrong` with a cycle on which ``c - 1`` has nonzero sum.
    """
    res = is_coboundary(d.c - 1)
    if not res:
        raise NotStrong(side, res.cycle, res.cycle_sum)
    xi = res.witness
    return (xi - xi.min()).simplify()


def is_b_witness(d: OrbitMapData, b: LocFun) -> bool:
    return b.min() >= 0 and d.c == 1 + b - compose_shift(b, 1)


def b_witness_failure(d: OrbitMapData, b: LocFun):
    """Shortest word on whose cylinder ``c = 1 + b - b o sigma`` fails, or ``None``.

    A negative value of ``b`` is reported on a word of length ``b.depth``.
    """
    for w, v in sorted(b.table.items()):
        if v < 0:
            return w
    diff = (d.c - 1 - b + compose_shift(b, 1)).simplify()
    bad = sorted((w for w, v in diff.table.items() if v), key=lambda w: (len(w), w))
    return bad[0] if bad else None


def constant_value(f: LocFun):
    vals = f.values()
    return next(iter(vals)) if len(vals) == 1 else None


def n_h_function(h: PrefixRuleMap, b1: LocFun, b2: LocFun) -> LocFun:
    """``b1 + b2 o h`` as a function on the source of ``h``."""
    d = b1.depth

    def value(w):
        y = eval_prefix(h, w)
        if len(y) < b2.depth:
            return None
        return b1.table[w[:d]] + b2.table[y[: b2.depth]]

    return _tabulate(h.source, max(d, h.max_match), value)


@dataclass(frozen=True, eq=False)
class ScoeCertificate:
    forward: OrbitMapData
    backward: OrbitMapData
    b1: LocFun
    b2: LocFun
    n_h: int
    # N_h for the witnesses shifted to minimum 0
    n_h_normalized: int


def _require_inverse(fwd: OrbitMapData, bwd: OrbitMapData):
    ga = compose_maps(bwd.map, fwd.map)
    ida = identity_map(fwd.source)
    if not map_equal(ga, ida):
        raise NotInverse("backward o forward", separating_word(ga, ida))
    hb = compose_maps(fwd.map, bwd.map)
    idb = identity_map(fwd.target)
    if not map_equal(hb, idb):
        raise NotInverse("forward o backward", separating_word(hb, idb))


def build_certificate(fwd: OrbitMapData, bwd: OrbitMapData, b1: LocFun | None = None,
                      b2: LocFun | None = None) -> ScoeCertificate:
    """Certify strong continuous orbit equivalence of a mutually inverse pair.

    Supplied ``b1``/``b2`` are checked and used as given; missing ones are
    solved for.  ``n_h`` is the constant ``b1 + b2 o h`` of the witnesses
    used.
    """
    if fwd.target != bwd.source or bwd.target != fwd.source:
        raise ScoeError("forward and backward data do not run between the same spaces")
    for side, d in (("forward", fwd), ("backward", bwd)):
        v = verify_orbit_map(d)
        if not v:
            raise OrbitEquationFails(side, v, d.source.spell(v.word))
    _require_inverse(fwd, bwd)

    verdicts = {}
    solved = {}
    for side, d in (("forward", fwd), ("backward", bwd)):
        try:
            solved[side] = check_strong(d, side)
            verdicts[side] = None
        except NotStrong as exc:
            verdicts[side] = exc
    if (verdicts["forward"] is None) != (verdicts["backward"] is None):
        raise AssertionError("strongness differs between a map and its inverse")
    if verdicts["forward"] is not None:
        raise verdicts["forward"]

    for side, d, b in (("forward", fwd, b1), ("backward", bwd, b2)):
        if b is not None and not is_b_witness(d, b):
            raise InvalidWitness(f"supplied {side} b does not satisfy l - k = 1 + b - b o sigma with b >= 0")
    b1 = b1 if b1 is not None else solved["forward"]
    b2 = b2 if b2 is not None else solved["backward"]

    values = {}
    for name, (p, q) in (("raw", (b1, b2)), ("normalized", (solved["forward"], solved["backward"]))):
        nf = n_h_function(fwd.map, p, q)
        c = constant_value(nf)
        if c is None:
            raise NonConstantNh(f"b1 + b2 o h takes values {sorted(nf.values())}")
        dual = constant_value(n_h_function(bwd.map, q, p))
        if dual != c:
            raise NonConstantNh(f"b2 + b1 o h^-1 = {dual} but b1 + b2 o h = {c}")
        values[name] = c
    return ScoeCertificate(fwd, bwd, b1, b2, values["raw"], values["normalized"])


def check_c1n(d: OrbitMapData, b1: LocFun, n: int) -> bool:
    """``c^n = n + b - b o sigma^n`` tablewise."""
    lhs = cocycle_sum(d.l, n) - cocycle_sum(d.k, n)
    rhs = n + b1 - compose_shift(b1, n)
    return lhs == rhs


def _klp_side(h: OrbitMapData, g: OrbitMapData, p: int, max_transient: int, max_cycle: int) -> bool:
    for x in eventually_periodic_points(h.source, max_transient, max_cycle):
        xp = shift_ep(x, p)
        hx, hxp = eval_ep(h.map, x), eval_ep(h.map, xp)
        lp, kp = point_sum(h.l, x, p), point_sum(h.k, x, p)
        left = point_sum(g.k, hx, lp) + point_sum(g.l, hxp, kp) + p
        right = point_sum(g.k, hxp, kp) + point_sum(g.l, hx, lp)
        if left != right:
            return False
    return True


def check_klp(fwd: OrbitMapData, bwd: OrbitMapData, p: int, max_transient: int = 2, max_cycle: int = 4) -> bool:
    """Both cocycle identities relating ``(k1, l1)`` and ``(k2, l2)`` at power ``p``,
    checked pointwise on every eventually periodic point within the bounds."""
    return (_klp_side(fwd, bwd, p, max_transient, max_cycle)
            and _klp_side(bwd, fwd, p, max_transient, max_cycle))


def build_phi_b1(d: OrbitMapData, b1: LocFun) -> PrefixRuleMap:
    """``x -> sigma^{b1(x)}(h(x))``, asserted to commute with the shift."""
    phi = post_shift(d.map, b1)
    if not map_equal(pre_shift(phi), post_shift(phi, 1)):
        raise ShiftCommutationFailed("sigma^b o h does not commute with the shift")
    return phi


def commuting_lift(d: OrbitMapData, b: LocFun) -> int:
    """Least ``c >= 0`` with ``sigma^{b+c} o h`` commuting with the shift.

    ``b + c >= l - 1`` everywhere always suffices, so the search is finite.
    """
    depth = max(b.depth, d.l.depth)
    slack = (d.l - 1 - b).refine(depth)
    bound = max(0, slack.max())
    for c in range(bound + 1):
        phi = post_shift(d.map, b + c)
        if map_equal(pre_shift(phi), post_shift(phi, 1)):
            return c
    raise ShiftCommutationFailed("no lift up to the sufficient bound commutes; b is not a valid witness")


@dataclass(frozen=True, eq=False)
class TwoSidedConjugacy:
    """Codes for ``phi_b1`` and ``psi_b2`` with ``psi o phi = sigma^lag`` and
    ``phi o psi = sigma^lag``; ``b1``/``b2`` are the (possibly lifted)
    witnesses actually used."""

    forward: SlidingBlockCode
    backward: SlidingBlockCode
    lag: int
    b1: LocFun
    b2: LocFun


def code_equals_shift_power(code: SlidingBlockCode, n: int) -> bool:
    return map_equal(from_block_code(code), shift_map(code.source, n))


def build_two_sided(cert: ScoeCertificate) -> TwoSidedConjugacy:
    """Block codes for ``phi_b1``, ``psi_b2`` with both composites equal to a shift power.

    The certificate's witnesses are raised by the least constants that make
    ``sigma^b o h`` shift-commuting (nonnegativity alone does not), so the
    lag is ``N_h`` plus those constants.
    """
    c1 = commuting_lift(cert.forward, cert.b1)
    c2 = commuting_lift(cert.backward, cert.b2)
    b1, b2 = cert.b1 + c1, cert.b2 + c2
    phi = to_block_code(build_phi_b1(cert.forward, b1))
    psi = to_block_code(build_phi_b1(cert.backward, b2))
    n = cert.n_h + c1 + c2
    if not code_equals_shift_power(compose_codes(psi, phi), n):
        raise ConjugacyCheckFailed("psi o phi != sigma_A^N")
    if not code_equals_shift_power(compose_codes(phi, psi), n):
        raise ConjugacyCheckFailed("phi o psi != sigma_B^N")
    return TwoSidedConjugacy(phi, psi, n, b1.simplify(), b2.simplify())
