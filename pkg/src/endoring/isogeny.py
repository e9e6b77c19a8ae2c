"""The CM action on curves: ell-torsion bases over F_{q^(ell-1)}, the matrix
of Frobenius on such a basis, eigenspace kernels for prime ideals, Velu
evaluation, and walking relations through the isogeny graph.
"""

import random
from dataclasses import dataclass

from .curve import (
    Curve,
    FrobeniusData,
    Point,
    Subgroup,
    cardinality_ext,
    isomorphic,
    random_point,
    velu,
)
from .errors import InternalInvariantError, InvalidInputError
from .field import ext_make
from .quadorder import PrimeIdealClass

_RESTART_BUDGET = 256


@dataclass
class TorsionBasis:
    """An independent basis (P, Q) of E[ell] over the degree-(ell-1) extension."""

    curve: Curve  # base curve over F_q
    curve_ext: Curve
    ell: int
    P: Point
    Q: Point


@dataclass(frozen=True)
class FrobMatrix:
    """Matrix of the q-power Frobenius on a torsion basis, over Z/ell."""

    ell: int
    m11: int
    m12: int
    m21: int
    m22: int

    def charpoly_at(self, x: int) -> int:
        return (x * x - (self.m11 + self.m22) * x + (self.m11 * self.m22 - self.m12 * self.m21)) % self.ell

    @property
    def trace(self) -> int:
        return (self.m11 + self.m22) % self.ell

    @property
    def det(self) -> int:
        return (self.m11 * self.m22 - self.m12 * self.m21) % self.ell


def _order_exponent(pt: Point, ell: int, k_max: int) -> int:
    """k with ord(pt) = ell^k, assuming ord(pt) | ell^k_max."""
    k = 0
    cur = pt
    while not cur.is_infinity:
        cur = ell * cur
        k += 1
        if k > k_max:
            raise InternalInvariantError("point order is not an ell-power")
    return k


def torsion_basis(E: Curve, fd: FrobeniusData, ell: int, rng: random.Random) -> TorsionBasis:
    """A basis of E[ell] over F_{q^(ell-1)} by the random-sampling lifting loop:
    multiply random points into the ell-Sylow part, then eliminate the
    dependent tail of Q against the precomputed multiples of the ell-torsion
    part of P, restarting whenever the output contract would fail."""
    n = cardinality_ext(fd, ell - 1)
    k_total = 0
    m = n
    while m % ell == 0:
        m //= ell
        k_total += 1
    if k_total < 2:
        raise InvalidInputError(
            f"E[{ell}] is not rational over the degree-{ell - 1} extension; "
            "is ell split and coprime to the discriminant?"
        )
    ext = ext_make(E.field, ell - 1)
    E_ext = E.lift_to(ext) if ell > 2 else E
    for _ in range(_RESTART_BUDGET):
        P = m * random_point(E_ext, rng)
        Q = m * random_point(E_ext, rng)
        k_p = _order_exponent(P, ell, k_total)
        k_q = _order_exponent(Q, ell, k_total)
        if k_p < k_q:
            P, Q = Q, P
            k_p, k_q = k_q, k_p
        if k_q == 0:
            continue
        T = ell ** (k_p - 1) * P
        table = {}  # i*T -> i
        cur = E_ext.infinity
        for i in range(ell):
            table[cur.raw] = i
            cur = cur + T
        for j in range(k_q - 1, 0, -1):
            i = table.get((ell**j * Q).raw)
            if i:
                Q = Q - i * (ell ** (k_p - j - 1)) * P
            if Q.is_infinity:
                break
        if Q.is_infinity:
            continue
        k_q = _order_exponent(Q, ell, k_total)
        if k_q == 0:
            continue
        T2 = ell ** (k_q - 1) * Q
        # output contract: exact order ell and independence (ell comparisons)
        if not (ell * T2).is_infinity or T2.raw in table:
            continue
        return TorsionBasis(curve=E, curve_ext=E_ext, ell=ell, P=T, Q=T2)
    raise InternalInvariantError("torsion basis sampling exceeded its restart budget")


def _two_dim_log(E_ext: Curve, R: Point, P_table: dict, Q: Point, ell: int):
    """(a, b) with R = a*P + b*Q, using a table of the multiples of P and an
    O(ell) subtract-and-scan over the ell^2 combinations."""
    cur = R
    for b in range(ell):
        a = P_table.get(cur.raw)
        if a is not None:
            return a, b
        cur = cur - Q
    return None


def frobenius_matrix(B: TorsionBasis, fd: FrobeniusData) -> FrobMatrix:
    """Decompose pi(P), pi(Q) over the basis (P, Q)."""
    ell = B.ell
    table = {}
    cur = B.curve_ext.infinity
    for i in range(ell):
        table[cur.raw] = i
        cur = cur + B.P
    ab = _two_dim_log(B.curve_ext, B.P.frobenius(), table, B.Q, ell)
    cd = _two_dim_log(B.curve_ext, B.Q.frobenius(), table, B.Q, ell)
    if ab is None or cd is None:
        raise InternalInvariantError("Frobenius image escaped the torsion basis")
    M = FrobMatrix(ell=ell, m11=ab[0], m12=ab[1], m21=cd[0], m22=cd[1])
    # trace + det pin the 2x2 charpoly, i.e. Cayley-Hamilton for pi
    if M.trace != fd.t % ell or M.det != fd.q % ell:
        raise InternalInvariantError("Frobenius matrix has wrong trace or determinant")
    return M


def kernel_for_ideal(B: TorsionBasis, M: FrobMatrix, pic: PrimeIdealClass, fd: FrobeniusData) -> Subgroup:
    """The order-ell subgroup cut out by the ideal: the eigenspace of M for the
    ideal's Frobenius eigenvalue, independent of which order one works in."""
    ell = B.ell
    if pic.ell != ell:
        raise InvalidInputError("ideal norm does not match the torsion basis")
    lam = pic.eigenvalue(fd)
    if M.charpoly_at(lam) != 0:
        raise InternalInvariantError(
            f"eigenvalue {lam} is not a root of the Frobenius matrix charpoly mod {ell}"
        )
    # pi(aP + bQ) has coefficient vector (a, b) * M, so the lam-eigenspace is
    # spanned by a row eigenvector of M
    if M.m21 % ell:
        vec = (M.m21 % ell, (lam - M.m11) % ell)
    elif M.m12 % ell:
        vec = ((lam - M.m22) % ell, M.m12 % ell)
    else:
        vec = (1, 0) if (M.m11 - lam) % ell == 0 else (0, 1)
    if ((M.m11 - lam) * vec[0] + M.m21 * vec[1]) % ell:
        raise InternalInvariantError("eigenvector failed the first matrix column")
    if (M.m12 * vec[0] + (M.m22 - lam) * vec[1]) % ell:
        raise InternalInvariantError("eigenvector failed the second matrix column")
    K = vec[0] * B.P + vec[1] * B.Q
    if K.is_infinity:
        raise InternalInvariantError("eigenvector gave the zero point")
    if ell == 2:
        from .field import Poly

        xpoly = Poly(B.curve.field, [-_project(B.curve, K.x), B.curve.field(1)])
        return Subgroup.from_xpoly(B.curve, 2, xpoly)
    half = (ell - 1) // 2
    xs = []
    cur = K
    for _ in range(half):
        xs.append(cur.x)
        cur = cur + K
    return Subgroup.from_ext_half_orbit(B.curve, ell, xs)


def _project(curve: Curve, val):
    """Project an extension element with rational support onto the base field."""
    if val.field == curve.field:
        return val
    if any(val.coeffs[1:]):
        raise InternalInvariantError("expected a rational value")
    return curve.field(val.coeffs[0])


def apply_ideal(E: Curve, fd: FrobeniusData, pic: PrimeIdealClass, rng: random.Random) -> Curve:
    """One CM step: the codomain of the isogeny with kernel cut out by the ideal."""
    basis = torsion_basis(E, fd, pic.ell, rng)
    M = frobenius_matrix(basis, fd)
    ker = kernel_for_ideal(basis, M, pic, fd)
    return velu(E, ker)


def holds_in_graph(E: Curve, fd: FrobeniusData, R, rng: random.Random) -> bool:
    """Walk the relation through the isogeny graph (ascending prime order,
    conjugates for negative exponents) and test isomorphism with the start."""
    cur = E
    for ell in sorted(R.n):
        e = R.n[ell]
        if e == 0:
            continue
        pic = R.base.by_norm(ell)
        if e < 0:
            pic = pic.conj()
            e = -e
        for _ in range(e):
            cur = apply_ideal(cur, fd, pic, rng)
    return isomorphic(cur, E)


def walk(E: Curve, fd: FrobeniusData, pic: PrimeIdealClass, steps: int, rng: random.Random) -> list[Curve]:
    """Repeatedly apply one prime ideal; returns the curves visited (including E)."""
    out = [E]
    cur = E
    for _ in range(steps):
        cur = apply_ideal(cur, fd, pic, rng)
        out.append(cur)
    return out
