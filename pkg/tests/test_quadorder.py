import math
import random

import pytest

from endoring import (
    FrobeniusData,
    QForm,
    build_factor_base,
    class_group_structure,
    compose,
    enumerate_classes,
    factor_form_over_base,
    identity_form,
    order_from_frobenius,
    orders_directly_above,
    prime_ideal_above,
    sigma,
)
from endoring.errors import EmptyFactorBaseError, InvalidInputError
from endoring.ntheory import kronecker
from endoring.quadorder import form_order, form_pow, inverse_form, reduce_form, subgroup_span


def fd_for(t, q, char=None):
    from endoring.ntheory import factorint

    delta = t * t - 4 * q
    return FrobeniusData(
        q=q, t=t, delta=delta,
        delta_factorization=tuple(sorted(factorint(-delta).items())),
        char=char,
    )


def test_order_from_frobenius_examples():
    O = order_from_frobenius(fd_for(-2, 11))
    assert (O.d_k, O.f_max) == (-40, 1)
    O = order_from_frobenius(fd_for(4, 31))
    assert (O.d_k, O.f_max) == (-3, 6)
    O = order_from_frobenius(fd_for(2, 5))
    assert (O.d_k, O.f_max) == (-4, 2)


def test_orders_directly_above():
    O = order_from_frobenius(fd_for(4, 31))  # f_max = 6
    assert [o.f for o in orders_directly_above(O)] == [3, 2]
    assert orders_directly_above(O.with_conductor(1)) == []
    O4 = order_from_frobenius(fd_for(2, 17))  # Delta = -64, f_max = 4
    assert [o.f for o in orders_directly_above(O4)] == [2]


def test_prime_ideal_above_examples():
    fd = fd_for(-2, 11, char=11)
    O = order_from_frobenius(fd)
    assert prime_ideal_above(O, fd, 3) is None  # kronecker(-40, 3) = -1
    assert prime_ideal_above(O, fd, 2) is None  # 2 | Delta
    assert prime_ideal_above(O, fd, 5) is None  # 5 | Delta
    p7 = prime_ideal_above(O, fd, 7)
    assert p7.lam == 1  # roots of x^2+2x+4 mod 7 are {1, 4}
    assert p7.conj().eigenvalue(fd) == 4
    f = p7.form_in(O, fd)
    assert f.a == 7 and f.D == -40
    assert (f.b - (2 * p7.lam - fd.t)) % 14 == 0  # b = 2*lam - t (mod 2 ell) in Z[pi]


def test_prime_ideal_excludes_characteristic():
    fd = fd_for(4, 31, char=31)
    O = order_from_frobenius(fd)
    assert kronecker(fd.delta, 31) == 1
    assert prime_ideal_above(O, fd, 31) is None


def test_prime_form_transport_to_suborders():
    # Delta = -108: O_K has d_K = -3; check the embedded prime forms have the
    # right discriminant and compose consistently at every level
    fd = fd_for(4, 31, char=31)
    Opi = order_from_frobenius(fd)
    for f in (1, 2, 3, 6):
        O = Opi.with_conductor(f)
        for ell in (7, 13, 19):
            pic = prime_ideal_above(O, fd, ell)
            form = pic.form_in(O, fd)
            assert form.a == ell and form.D == O.D
            conj = pic.conj().form_in(O, fd)
            assert reduce_form(*_t(compose(form, conj))) == identity_form(O.D)


def _t(f):
    return (f.a, f.b, f.c)


def test_compose_worked_example():
    f = QForm(2, 1, 3)
    assert compose(f, f) == QForm(2, -1, 3)
    ident = identity_form(-23)
    assert compose(f, ident) == f
    assert compose(f, inverse_form(f)) == ident


def test_enumerate_classes_examples():
    assert len(enumerate_classes(-23)) == 3
    assert enumerate_classes(-4) == [QForm(1, 0, 1)]
    assert len(enumerate_classes(-108)) == 3
    with pytest.raises(InvalidInputError):
        enumerate_classes(-5)
    with pytest.raises(InvalidInputError):
        enumerate_classes(4)


def test_enumerate_classes_are_reduced_unique():
    for D in (-23, -40, -108, -420, -1011):
        forms = enumerate_classes(D)
        assert len(set(forms)) == len(forms)
        for f in forms:
            assert f.is_reduced() and f.D == D
            assert math.gcd(math.gcd(f.a, abs(f.b)), f.c) == 1


def test_class_group_structure_examples():
    assert class_group_structure(-23) == [(QForm(2, 1, 3), 3)]
    assert class_group_structure(-4) == []
    for D in (-23, -40, -84, -108, -144, -420, -480):
        gens = class_group_structure(D)
        h = len(enumerate_classes(D))
        assert math.prod(k for _, k in gens) == h
        for g, k in gens:
            assert form_order(g) == k
        # divisibility chain
        orders = [k for _, k in gens]
        for a, b in zip(orders, orders[1:]):
            assert a % b == 0


def test_group_law_closure_small_sweep():
    for D in range(-3, -300, -1):
        if D % 4 not in (0, 1):
            continue
        forms = enumerate_classes(D)
        span = subgroup_span(D, forms)
        assert len(span) == len(forms)
        assert span == set(forms)


def test_compose_associative_random():
    rng = random.Random(11)
    for D in (-84, -420, -1155):
        forms = enumerate_classes(D)
        for _ in range(30):
            a, b, c = (rng.choice(forms) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))
            assert compose(a, b) == compose(b, a)


def test_build_factor_base():
    fd = fd_for(-2, 11, char=11)
    O = order_from_frobenius(fd)
    B = build_factor_base(O, fd, 10)
    assert B.norms() == [7]
    with pytest.raises(EmptyFactorBaseError):
        build_factor_base(O, fd, 2)
    sizes = [len(build_factor_base(O, fd, N)) for N in (10, 30, 60, 120)]
    assert sizes == sorted(sizes)


def test_sigma_identities():
    fd = fd_for(4, 31, char=31)
    O = order_from_frobenius(fd)
    B = build_factor_base(O, fd, 60)
    ident = identity_form(O.D)
    assert sigma(O, B, {}) == ident
    for pic in B.primes:
        assert sigma(O, B, {pic.ell: 1}) == reduce_form(*_t(pic.form_in(O, fd)))
    rng = random.Random(12)
    for _ in range(20):
        n1 = {pic.ell: rng.randint(-3, 3) for pic in B.primes}
        n2 = {pic.ell: rng.randint(-3, 3) for pic in B.primes}
        s = {ell: n1[ell] + n2[ell] for ell in n1}
        assert sigma(O, B, s) == compose(sigma(O, B, n1), sigma(O, B, n2))


def test_factor_form_over_base_roundtrip():
    fd = fd_for(-2, 11, char=11)
    O = order_from_frobenius(fd)
    B = build_factor_base(O, fd, 60)
    ident = identity_form(O.D)
    assert factor_form_over_base(ident, B, fd) == {}
    for pic in B.primes:
        g = reduce_form(*_t(pic.form_in(O, fd)))
        y = factor_form_over_base(g, B, fd)
        if y is not None and g.a == pic.ell:
            assert y == {pic.ell: 1}
    rng = random.Random(13)
    tested = 0
    for _ in range(60):
        n = {pic.ell: rng.randint(-2, 2) for pic in B.primes}
        g = sigma(O, B, n)
        y = factor_form_over_base(g, B, fd)
        if y is None:
            continue
        tested += 1
        assert sigma(O, B, y) == g  # class-equal, not necessarily y == n
    assert tested > 10


def test_factor_form_rejects_nonsmooth():
    fd = fd_for(-2, 11, char=11)
    O = order_from_frobenius(fd)
    B = build_factor_base(O, fd, 10)  # only ell = 7
    # (2, 0, 5) has a = 2 which divides Delta: not smooth over B
    assert factor_form_over_base(QForm(2, 0, 5), B, fd) is None


def test_form_pow_matches_repeated_compose():
    forms = enumerate_classes(-420)
    rng = random.Random(14)
    for _ in range(10):
        f = rng.choice(forms)
        acc = identity_form(-420)
        for e in range(6):
            assert form_pow(f, e) == acc
            acc = compose(acc, f)
        assert form_pow(f, -1) == inverse_form(f)
