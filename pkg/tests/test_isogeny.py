import itertools
import random

import pytest

from endoring import (
    RelationParams,
    apply_ideal,
    build_factor_base,
    cardinality_ext,
    find_relation,
    frobenius_matrix,
    holds_in_graph,
    holds_in_order,
    isomorphic,
    j_invariant,
    kernel_for_ideal,
    order_from_frobenius,
    prime_ideal_above,
    torsion_basis,
    trace,
)
from endoring.curve import Curve, PrimeField
from endoring.isogeny import walk
from endoring.quadorder import form_order, reduce_form
from endoring.relations import Relation


def test_torsion_basis_worked_example(e11):
    E, fd = e11
    n6 = cardinality_ext(fd, 6)
    assert n6 == 49 * 36140 and 36140 % 7 != 0  # k = 2, m = 36140
    B = torsion_basis(E, fd, 7, random.Random(31))
    assert B.curve_ext.field.order == 11**6
    for T in (B.P, B.Q):
        assert not T.is_infinity and (7 * T).is_infinity
    multiples = {(i * B.P).raw for i in range(7)}
    assert B.Q.raw not in multiples


def _split_primes(fd, bound=30):
    O = order_from_frobenius(fd)
    out = []
    for ell in (3, 5, 7, 11, 13):
        if ell >= bound:
            break
        pic = prime_ideal_above(O, fd, ell)
        if pic is not None:
            out.append(pic)
    return out


@pytest.mark.parametrize("p,a,b", [(11, 1, 1), (13, 2, 3), (31, 1, 8), (19, 2, 4)])
def test_frobenius_matrix_invariants(p, a, b):
    E = Curve(PrimeField(p), a, b)
    fd = trace(E)
    for pic in _split_primes(fd)[:2]:
        ell = pic.ell
        B = torsion_basis(E, fd, ell, random.Random(32))
        M = frobenius_matrix(B, fd)
        # M^2 - tM + qI = 0 (mod ell), entrywise
        m = ((M.m11, M.m12), (M.m21, M.m22))
        for i in range(2):
            for j in range(2):
                sq = sum(m[i][k] * m[k][j] for k in range(2))
                val = sq - fd.t * m[i][j] + (fd.q if i == j else 0)
                assert val % ell == 0
        assert M.det == fd.q % ell and M.trace == fd.t % ell


def test_frobenius_matrix_eigenvalues_worked_example(e11):
    E, fd = e11
    B = torsion_basis(E, fd, 7, random.Random(33))
    M = frobenius_matrix(B, fd)
    assert sorted(x for x in range(7) if M.charpoly_at(x) == 0) == [1, 4]


def test_kernel_is_frobenius_eigenspace(e11):
    # brute-force oracle: collect all basis combinations fixed by pi up to the
    # eigenvalue, compare power sums with the kernel subgroup
    E, fd = e11
    ell = 7
    O = order_from_frobenius(fd)
    pic = prime_ideal_above(O, fd, ell)
    B = torsion_basis(E, fd, ell, random.Random(34))
    M = frobenius_matrix(B, fd)
    for ideal in (pic, pic.conj()):
        lam = ideal.eigenvalue(fd)
        eigen_pts = []
        for aa, bb in itertools.product(range(ell), repeat=2):
            V = aa * B.P + bb * B.Q
            if V.is_infinity:
                continue
            if V.frobenius() == lam * V:
                eigen_pts.append(V)
        assert len(eigen_pts) == ell - 1  # one line minus infinity
        ker = kernel_for_ideal(B, M, ideal, fd)
        ext = B.curve_ext.field
        s1 = sum((pt.x for pt in eigen_pts), ext.zero)
        s2 = sum((pt.x * pt.x for pt in eigen_pts), ext.zero)
        assert ker.s1 == E.field(s1.coeffs[0]) and not any(s1.coeffs[1:])
        assert ker.s2 == E.field(s2.coeffs[0]) and not any(s2.coeffs[1:])


def test_conjugate_kernels_are_distinct(e11):
    E, fd = e11
    pic = prime_ideal_above(order_from_frobenius(fd), fd, 7)
    B = torsion_basis(E, fd, 7, random.Random(35))
    M = frobenius_matrix(B, fd)
    k1 = kernel_for_ideal(B, M, pic, fd)
    k2 = kernel_for_ideal(B, M, pic.conj(), fd)
    assert (k1.s1, k1.s2, k1.s3) != (k2.s1, k2.s2, k2.s3)


def test_apply_ideal_conjugate_roundtrip(e11):
    E, fd = e11
    pic = prime_ideal_above(order_from_frobenius(fd), fd, 7)
    E2 = apply_ideal(E, fd, pic, random.Random(36))
    assert trace(E2).t == fd.t
    E3 = apply_ideal(E2, fd, pic.conj(), random.Random(37))
    assert isomorphic(E3, E)


def test_walk_cycle_length_equals_class_order():
    # ord([p]) from the enumeration oracle = CM-walk cycle length
    cases = [(11, 1, 1, 7), (31, 1, 8, 7), (13, 2, 3, 5)]
    for p, a, b, ell in cases:
        E = Curve(PrimeField(p), a, b)
        fd = trace(E)
        O = order_from_frobenius(fd)
        pic = prime_ideal_above(O, fd, ell)
        if pic is None:
            continue
        from endoring import oracle_endring

        f_end = oracle_endring(E, fd).conductor
        O_end = O.with_conductor(f_end)
        frm = pic.form_in(O_end, fd)
        expected = form_order(reduce_form(frm.a, frm.b, frm.c))
        js = [j_invariant(c) for c in walk(E, fd, pic, expected, random.Random(38))]
        assert js[-1] == js[0]
        assert all(js[i] != js[0] for i in range(1, expected))


def test_holds_in_graph_empty_relation(e11):
    E, fd = e11
    O = order_from_frobenius(fd)
    B = build_factor_base(O, fd, 30)
    assert holds_in_graph(E, fd, Relation(base=B, n={}), random.Random(39))


def test_holds_in_graph_matches_orders(family_f31):
    # Theorem-1 correspondence on oracle-known endomorphism rings
    from endoring import oracle_endring

    E, fd = family_f31[10]
    O = order_from_frobenius(fd)
    f_end = oracle_endring(E, fd).conductor
    O_end = O.with_conductor(f_end)
    params = RelationParams(norm_bound=60)
    rng = random.Random(40)
    checked = 0
    for f in (1, 2, 3, 6):
        Of = O.with_conductor(f)
        for _ in range(4):
            rel = find_relation(Of, fd, params, rng)
            expected = holds_in_order(rel, O_end)
            got = holds_in_graph(E, fd, rel, random.Random(41 + checked))
            assert got == expected
            checked += 1
    assert checked == 16


def test_walk_order_invariance(family_f31):
    # the verdict of a relation walk does not depend on the step order
    E, fd = family_f31[7]
    O = order_from_frobenius(fd)
    B = build_factor_base(O, fd, 30)
    picks = {pic.ell: pic for pic in B.primes}
    n = {7: 1, 13: -1} if 13 in picks and 7 in picks else None
    if n is None:
        pytest.skip("factor base too small for the permutation test")
    rel = Relation(base=B, n=n)
    verdict = holds_in_graph(E, fd, rel, random.Random(42))
    # manual reversed-order walk
    cur = E
    for ell in sorted(n, reverse=True):
        pic = picks[ell] if n[ell] > 0 else picks[ell].conj()
        for _ in range(abs(n[ell])):
            cur = apply_ideal(cur, fd, pic, random.Random(43))
    assert isomorphic(cur, E) == verdict


def test_intermediate_walk_curves_share_trace(family_f31):
    E, fd = family_f31[3]
    O = order_from_frobenius(fd)
    pic = prime_ideal_above(O, fd, 7)
    for c in walk(E, fd, pic, 3, random.Random(44)):
        assert trace(c).t == fd.t
