import random

import pytest

from endoring import (
    Curve,
    FrobeniusData,
    PrimeField,
    Subgroup,
    cardinality_ext,
    division_poly,
    ext_make,
    is_ordinary,
    isomorphic,
    j_invariant,
    random_point,
    rational_subgroups,
    trace,
    velu,
)
from endoring.curve import _count_bsgs, _count_exhaustive
from endoring.errors import InvalidInputError
from endoring.field import Poly, poly_roots, sqrt_in_field


def brute_count(p, a, b):
    """Independent O(p^2) oracle: count affine solutions pair by pair."""
    n = 1
    for x in range(p):
        rhs = (x * x * x + a * x + b) % p
        for y in range(p):
            if y * y % p == rhs:
                n += 1
    return n


def brute_count_ext(E):
    """Count points over an extension field by a squares table (independent of
    the library's counting: only uses field multiplication)."""
    F = E.field
    squares = {}
    for e in F.elements():
        squares.setdefault((e * e).coeffs, 0)
        squares[(e * e).coeffs] += 1
    n = 1
    for x in F.elements():
        rhs = E.rhs(x)
        n += squares.get(rhs.coeffs, 0)
    return n


def test_singular_curve_rejected():
    F = PrimeField(5)
    with pytest.raises(InvalidInputError):
        Curve(F, 0, 0)


def test_j_invariant_examples():
    F11 = PrimeField(11)
    assert j_invariant(Curve(F11, 0, 1)) == F11(0)
    assert j_invariant(Curve(F11, 1, 0)) == F11(1728)
    # 1728 * 4 / (4 + 27) mod 11
    expected = F11(1728) * F11(4) / F11(31)
    assert j_invariant(Curve(F11, 1, 1)) == expected


def test_trace_worked_example(e11):
    E, fd = e11
    assert brute_count(11, 1, 1) == 14
    assert fd.t == -2
    assert fd.delta == -40
    assert fd.delta_factorization == ((2, 3), (5, 1))


def test_trace_matches_brute_force_on_random_curves():
    rng = random.Random(7)
    for _ in range(8):
        p = rng.choice([13, 17, 19, 23])
        while True:
            a, b = rng.randrange(p), rng.randrange(p)
            if (4 * a**3 + 27 * b * b) % p:
                break
        E = Curve(PrimeField(p), a, b)
        assert trace(E).t == p + 1 - brute_count(p, a, b)


def test_trace_f31_family_exists(family_f31):
    # curves with #E = 28 over F_31 give t = 4, Delta = -108 = 6^2 * (-3)
    assert family_f31
    fd = family_f31[0][1]
    assert fd.delta == -108
    assert fd.delta_factorization == ((2, 2), (3, 3))


def test_is_ordinary():
    assert is_ordinary(FrobeniusData(q=11, t=-2, delta=-40, delta_factorization=((2, 3), (5, 1)), char=11))
    assert not is_ordinary(FrobeniusData(q=7, t=0, delta=-28, delta_factorization=((2, 2), (7, 1)), char=7))
    assert not is_ordinary(FrobeniusData(q=7, t=7, delta=21, delta_factorization=((3, 1), (7, 1)), char=7))


def test_cardinality_ext(e11):
    _, fd = e11
    assert cardinality_ext(fd, 1) == 14
    assert cardinality_ext(fd, 2) == 140
    n6 = cardinality_ext(fd, 6)
    assert n6 == 1770860 == 49 * 36140 and 36140 % 7 != 0


def test_cardinality_ext_agrees_with_direct_count(e11):
    E, fd = e11
    for k in (2, 3):
        K = ext_make(E.field, k)
        assert brute_count_ext(E.lift_to(K)) == cardinality_ext(fd, k)


def test_cardinality_ext_norm_divisibility(e11):
    _, fd = e11
    for m, n in ((1, 2), (1, 5), (2, 4), (2, 6), (3, 6)):
        assert cardinality_ext(fd, n) % cardinality_ext(fd, m) == 0


def test_group_law(e11):
    E, fd = e11
    rng = random.Random(8)
    inf = E.infinity
    n = cardinality_ext(fd, 1)
    for _ in range(20):
        P = random_point(E, rng)
        Q = random_point(E, rng)
        R = random_point(E, rng)
        assert P + inf == P
        assert (P + (-P)).is_infinity
        assert (P + Q) + R == P + (Q + R)
        assert P + Q == Q + P
        assert (n * P).is_infinity


def test_point_on_curve_validation(e11):
    E, _ = e11
    with pytest.raises(InvalidInputError):
        E.point(1, 1)  # 1^3+1+1 = 3 but 1^2 = 1
    P = E.point(0, 1)
    assert not P.is_infinity


def test_random_point_distribution(e11):
    E, _ = e11
    rng = random.Random(9)
    counts = {}
    draws = 13000
    for _ in range(draws):
        P = random_point(E, rng)
        counts[P.raw] = counts.get(P.raw, 0) + 1
    assert len(counts) == 13
    for c in counts.values():
        assert abs(c / draws - 1 / 13) < 0.02


def test_random_point_deterministic(e11):
    E, _ = e11
    a = [random_point(E, random.Random(77)).raw for _ in range(5)]
    b = [random_point(E, random.Random(77)).raw for _ in range(5)]
    assert a == b


def test_division_poly_formulas():
    F = PrimeField(13)
    E = Curve(F, 2, 3)
    assert division_poly(E, 2) == Poly(F, [3, 2, 0, 1])
    # 3x^4 + 6ax^2 + 12bx - a^2
    assert division_poly(E, 3) == Poly(F, [-4, 36, 12, 0, 3])
    E0 = Curve(F, 0, 5)
    assert division_poly(E0, 3) == Poly(F, [0, 60, 0, 0, 3])  # 3x^4 + 12bx


@pytest.mark.parametrize("m", [3, 5, 7])
def test_division_poly_roots_are_torsion(m):
    from endoring.field import poly_factor

    E = Curve(PrimeField(11), 1, 1)
    psi = division_poly(E, m)
    factors = [g for g, _ in poly_factor(psi)]
    deg = max(g.degree for g in factors)
    K = ext_make(E.field, 2 * deg if deg > 1 else 2)
    EK = E.lift_to(K)
    found = 0
    for g in factors:
        gK = Poly(K, [K(c) for c in g.coeffs])
        for r in poly_roots(gK):
            y = sqrt_in_field(EK.rhs(r))
            if y is None:
                continue
            P = EK.point(r, y)
            assert (m * P).is_infinity and not P.is_infinity
            found += 1
    assert found > 0


def brute_rational_subgroups(E, p):
    """Independent oracle: build all of E[p] over one big extension, group the
    points into the p+1 cyclic subgroups, and keep those stable under the
    q-power Frobenius map applied directly to the points. Returns the big
    field and the x-coordinate sets of the stable subgroups."""
    from math import lcm

    from endoring.field import poly_factor

    psi = division_poly(E, p)
    degs = [g.degree for g, _ in poly_factor(psi)]
    deg = 2 * lcm(*degs)
    K = ext_make(E.field, deg)
    EK = E.lift_to(K)
    psiK = Poly(K, [K(c) for c in psi.coeffs])
    points = []
    for r in poly_roots(psiK):
        y = sqrt_in_field(EK.rhs(r))
        assert y is not None, "extension too small for the torsion"
        points.append(EK.point(r, y))
        if not y.is_zero():
            points.append(EK.point(r, -y))
    assert len(points) == p * p - 1
    stable_xsets = []
    count = 0
    remaining = {pt.raw for pt in points}
    while remaining:
        raw = next(iter(remaining))
        T = EK._pt(raw)
        orbit = [i * T for i in range(1, p)]
        for pt in orbit:
            remaining.discard(pt.raw)
        count += 1
        piT = T.frobenius()
        if any(piT == o for o in orbit):
            stable_xsets.append(sorted({pt.x for pt in orbit}, key=lambda e: e.coeffs))
    assert count == p + 1
    return K, stable_xsets


@pytest.mark.parametrize(
    "p,a,b,ell",
    [
        (31, 1, 8, 2),
        (31, 1, 8, 3),
        (17, 1, 5, 2),
        (13, 2, 3, 3),
        (11, 1, 1, 5),
        (19, 3, 4, 5),
        (13, 1, 4, 7),
    ],
)
def test_rational_subgroups_vs_brute_force(p, a, b, ell):
    E = Curve(PrimeField(p), a, b)
    subs = rational_subgroups(E, ell)
    K, stable_xsets = brute_rational_subgroups(E, ell)
    # library subgroups and brute-force stable subgroups must match one-to-one:
    # each xpoly vanishes exactly on one brute x-set
    matched = set()
    for s in subs:
        xpK = Poly(K, [K(c) for c in s.xpoly.coeffs])
        hits = [
            idx
            for idx, xs in enumerate(stable_xsets)
            if all(xpK(x).is_zero() for x in xs)
        ]
        assert len(hits) == 1
        matched.add(hits[0])
    assert matched == set(range(len(stable_xsets)))
    assert len(subs) == len(stable_xsets)


def test_rational_subgroups_counts(family_f31):
    # above-floor curves carry p+1 rational subgroups, floor curves at most 1
    from endoring import oracle_endring

    for E, fd in family_f31[:6]:
        res = oracle_endring(E, fd)
        for p in (2, 3):
            n = len(rational_subgroups(E, p))
            if res.volcano_levels[p] == 1:
                assert n <= 1
            else:
                assert n == p + 1


def test_velu_trivial_kernel(e11):
    E, _ = e11
    assert velu(E, Subgroup.trivial(E)) == E


def test_velu_preserves_cardinality():
    for p, a, b in [(31, 1, 8), (17, 1, 5), (13, 2, 3), (23, 5, 7)]:
        E = Curve(PrimeField(p), a, b)
        t0 = trace(E).t
        for ell in (2, 3, 5):
            for ker in rational_subgroups(E, ell):
                E2 = velu(E, ker)
                assert trace(E2).t == t0


def test_isomorphic(e11):
    E, fd = e11
    assert isomorphic(E, E)
    # quadratic twist: t -> -t, same j
    F = E.field
    d = next(e for e in F.elements() if not e.is_zero() and sqrt_in_field(e) is None)
    Et = Curve(F, E.a * d * d, E.b * d * d * d)
    assert trace(Et).t == -fd.t
    assert not isomorphic(E, Et)


def test_bsgs_counting_matches_exhaustive():
    rng = random.Random(10)
    for _ in range(6):
        p = rng.choice([1009, 2003, 4001, 7919])
        while True:
            a, b = rng.randrange(p), rng.randrange(p)
            if (4 * a**3 + 27 * b * b) % p:
                break
        assert _count_bsgs(p, a, b) == _count_exhaustive(p, a, b)


def test_counting_cap():
    with pytest.raises(InvalidInputError):
        trace(Curve(PrimeField(1000003), 1, 1))
