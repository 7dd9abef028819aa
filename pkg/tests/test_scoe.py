import random

import pytest

from sftorbit.cocycle import LocFun
from sftorbit.generators import random_conjugacy, random_conjugacy_data
from sftorbit.orbitmap import (
    OrbitMapData,
    compose,
    compose_codes,
    compose_maps,
    conjugacy_data,
    eval_ep,
    from_block_code,
    identity_data,
    identity_map,
    map_equal,
    post_shift,
    shift_map,
)
from sftorbit.scoe import (
    InvalidWitness,
    NotInverse,
    NotStrong,
    ShiftCommutationFailed,
    build_certificate,
    build_phi_b1,
    build_two_sided,
    check_c1n,
    check_klp,
    check_strong,
    code_equals_shift_power,
    commuting_lift,
    is_b_witness,
    n_h_function,
)
from sftorbit.sft import shift_ep
from sftorbit.invariants import zeta_polynomial

from conftest import sample_points


def test_check_strong_examples(ex2):
    b1 = check_strong(ex2.h)
    assert b1.min() == 0
    assert b1.eval_word((0,)) - b1.eval_word((1,)) == 1
    b2 = check_strong(ex2.g)
    assert b2.eval_word((0,)) - b2.eval_word((1,)) == -1
    assert b2.eval_word((1,)) == b2.eval_word((2,))
    assert check_strong(identity_data(ex2.A)) == 0


def test_not_strong(ex2):
    A = ex2.A
    # c = 0 everywhere: the orbit equation holds for k = l, but [c] != [1]
    d = OrbitMapData(identity_map(A), LocFun.constant(A, 1), LocFun.constant(A, 1))
    with pytest.raises(NotStrong) as exc:
        check_strong(d)
    assert exc.value.cycle_sum == -len(exc.value.cycle)


def test_listed_witnesses_are_valid(ex2):
    assert is_b_witness(ex2.h, ex2.b1)
    assert is_b_witness(ex2.g, ex2.b2)
    assert not is_b_witness(ex2.h, ex2.b1 + LocFun(ex2.A, 1, {(0,): 1, (1,): 0}))


def test_certificate_values(ex2):
    cert = build_certificate(ex2.h, ex2.g, ex2.b1, ex2.b2)
    assert cert.n_h == 3
    assert cert.n_h_normalized == 1
    nf = n_h_function(ex2.h.map, ex2.b1, ex2.b2)
    assert nf.values() == {3}
    cert = build_certificate(ex2.h, ex2.g, ex2.b1, ex2.b2 + 1)
    assert cert.n_h == 4
    cert = build_certificate(ex2.h, ex2.g)
    assert cert.n_h == cert.n_h_normalized == 1
    cert = build_certificate(identity_data(ex2.A), identity_data(ex2.A))
    assert cert.n_h == 0 and cert.b1 == 0 and cert.b2 == 0


def test_n_h_pointwise(ex2, rng):
    for x in sample_points(ex2.A, rng, 60):
        assert ex2.b1(x) + ex2.b2(eval_ep(ex2.h.map, x)) == 3
    for y in sample_points(ex2.B, rng, 60):
        assert ex2.b2(y) + ex2.b1(eval_ep(ex2.g.map, y)) == 3


def test_certificate_rejections(ex2):
    with pytest.raises(InvalidWitness):
        build_certificate(ex2.h, ex2.g, ex2.b1 + LocFun(ex2.A, 1, {(0,): 0, (1,): 1}), ex2.b2)
    A = ex2.A
    with pytest.raises(NotInverse):
        build_certificate(identity_data(A), OrbitMapData(shift_map(A), LocFun.constant(A, 0), LocFun.constant(A, 1)))


def test_c1n_and_klp(ex2):
    for n in range(5):
        assert check_c1n(ex2.h, ex2.b1, n)
        assert check_c1n(ex2.g, ex2.b2, n)
    assert not check_c1n(ex2.h, ex2.b1 + LocFun(ex2.A, 1, {(0,): 1, (1,): 0}), 2)
    for p in range(3):
        assert check_klp(ex2.h, ex2.g, p)


def test_listed_b1_does_not_commute(ex2):
    A, B = ex2.A, ex2.B
    with pytest.raises(ShiftCommutationFailed):
        build_phi_b1(ex2.h, ex2.b1)
    x = A.point("", "αβ")
    phi = post_shift(ex2.h.map, ex2.b1)
    assert eval_ep(phi, shift_ep(x, 1)) == B.point("3", "12")
    assert shift_ep(eval_ep(phi, x), 1) == B.point("", "21")
    # psi o phi = sigma^3 still holds as maps since psi_b2 commutes with the shift
    psi = build_phi_b1(ex2.g, ex2.b2)
    assert map_equal(compose_maps(psi, phi), shift_map(A, 3))
    assert not map_equal(compose_maps(phi, psi), shift_map(B, 3))


def test_commuting_lift(ex2):
    assert commuting_lift(ex2.h, ex2.b1) == 1
    assert commuting_lift(ex2.g, ex2.b2) == 0
    assert commuting_lift(ex2.g, ex2.b2 - 1) == 1
    build_phi_b1(ex2.h, ex2.b1 + 1)
    build_phi_b1(ex2.h, ex2.b1 + 2)


def test_two_sided_lifted(ex2, rng):
    cert = build_certificate(ex2.h, ex2.g, ex2.b1, ex2.b2)
    two = build_two_sided(cert)
    assert two.lag == 4
    assert two.b1 == ex2.b1 + 1 and two.b2 == ex2.b2
    assert code_equals_shift_power(compose_codes(two.backward, two.forward), 4)
    assert code_equals_shift_power(compose_codes(two.forward, two.backward), 4)
    for x in sample_points(ex2.A, rng, 50):
        assert two.forward.apply_point(x) == shift_ep(eval_ep(ex2.h.map, x), two.b1(x))
    cert0 = build_certificate(ex2.h, ex2.g)
    assert build_two_sided(cert0).lag == 4


def test_two_sided_trivial_cases(ex2):
    cert = build_certificate(identity_data(ex2.A), identity_data(ex2.A))
    two = build_two_sided(cert)
    assert two.lag == 0 and two.forward.window == 1
    assert two.forward.table == {(0,): 0, (1,): 1}
    rng = random.Random(4)
    fwd, bwd = random_conjugacy(rng)
    cert = build_certificate(conjugacy_data(fwd), conjugacy_data(bwd))
    two = build_two_sided(cert)
    assert two.lag == 0
    assert map_equal(from_block_code(two.forward), from_block_code(fwd))


def test_scoe_properties_on_random_conjugacies():
    rng = random.Random(8)
    for _ in range(8):
        fwd, bwd = random_conjugacy(rng)
        h, g = random_conjugacy_data(rng, fwd), random_conjugacy_data(rng, bwd)
        cert = build_certificate(h, g)
        assert zeta_polynomial(fwd.source) == zeta_polynomial(fwd.target)
        two = build_two_sided(cert)
        assert code_equals_shift_power(compose_codes(two.backward, two.forward), two.lag)
        for p in range(3):
            assert check_klp(h, g, p, 2, 3)


def test_transitivity():
    rng = random.Random(21)
    f1, b1 = random_conjugacy(rng)
    from sftorbit.generators import relabel_pair
    perm = list(range(f1.target.n))
    rng.shuffle(perm)
    f2, b2 = relabel_pair(f1.target, perm)
    h1, g1 = conjugacy_data(f1), conjugacy_data(b1)
    h2, g2 = conjugacy_data(f2), conjugacy_data(b2)
    cert = build_certificate(compose(h2, h1), compose(g1, g2))
    assert cert.n_h == 0
