"""Short-Weierstrass curves y^2 = x^3 + ax + b over F_p and its extensions:
group law, point counting (exhaustive sweep or Shanks-Mestre BSGS in place of
Schoof), extension cardinalities via the trace recurrence, division
polynomials, rational p-subgroups, and Velu's formulas.
"""

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from . import backend
from .errors import InternalInvariantError, InvalidInputError
from .field import ExtField, FieldElem, Poly, PrimeField, ext_make, poly_factor, poly_roots, sqrt_in_field
from .ntheory import derive_seed, factorint, sqrt_mod_prime

_EXHAUSTIVE_CAP = 10**4
_COUNT_CAP = 10**6

_count_cache: dict = {}


class Curve:
    """Nonsingular y^2 = x^3 + ax + b over a prime field or an extension."""

    __slots__ = ("field", "a", "b", "kernel")

    def __init__(self, field, a, b):
        a = field(a)
        b = field(b)
        disc = field(4) * a**3 + field(27) * b * b
        if disc.is_zero():
            raise InvalidInputError("singular curve: 4a^3 + 27b^2 = 0")
        self.field = field
        self.a = a
        self.b = b
        self.kernel = backend.curve_kernel(field.kernel, a.coeffs, b.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Curve)
            and other.field == self.field
            and other.a == self.a
            and other.b == self.b
        )

    def __hash__(self):
        return hash((self.field, self.a.coeffs, self.b.coeffs))

    def __repr__(self):
        return f"E({self.field}; a={self.a}, b={self.b})"

    @property
    def infinity(self) -> "Point":
        return Point(self, None)

    def point(self, x, y) -> "Point":
        x, y = self.field(x), self.field(y)
        pt = Point(self, (x.coeffs, y.coeffs))
        if not self.kernel.on_curve(pt.raw):
            raise InvalidInputError(f"({x}, {y}) is not on {self}")
        return pt

    def _pt(self, raw) -> "Point":
        return Point(self, raw)

    def lift_to(self, ext: ExtField) -> "Curve":
        """The same equation over an extension of the base field."""
        if ext.base != self.field:
            raise InvalidInputError("extension of a different base field")
        return Curve(ext, ext.embed(self.a), ext.embed(self.b))

    def rhs(self, x: FieldElem) -> FieldElem:
        return x * x * x + self.a * x + self.b


class Point:
    """A point on a Curve; ``raw`` is None for infinity or a pair of coefficient tuples."""

    __slots__ = ("curve", "raw")

    def __init__(self, curve: Curve, raw):
        self.curve = curve
        self.raw = raw

    @property
    def is_infinity(self) -> bool:
        return self.raw is None

    @property
    def x(self) -> FieldElem:
        return FieldElem(self.curve.field, self.raw[0])

    @property
    def y(self) -> FieldElem:
        return FieldElem(self.curve.field, self.raw[1])

    def __add__(self, other: "Point") -> "Point":
        if other.curve != self.curve:
            raise ValueError("points on different curves")
        return Point(self.curve, self.curve.kernel.add(self.raw, other.raw))

    def __sub__(self, other: "Point") -> "Point":
        return self + (-other)

    def __neg__(self) -> "Point":
        return Point(self.curve, self.curve.kernel.neg(self.raw))

    def __rmul__(self, n: int) -> "Point":
        return Point(self.curve, self.curve.kernel.smul(n, self.raw))

    def __mul__(self, n: int) -> "Point":
        return self.__rmul__(n)

    def __eq__(self, other):
        return (
            isinstance(other, Point)
            and other.curve == self.curve
            and other.raw == self.raw
        )

    def __hash__(self):
        return hash(self.raw)

    def __repr__(self):
        if self.raw is None:
            return "O"
        return f"({self.x}, {self.y})"

    def frobenius(self) -> "Point":
        """Image under the q-power Frobenius (q = characteristic: base field is prime)."""
        if self.raw is None:
            return self
        p = self.curve.field.char
        fk = self.curve.field.kernel
        return Point(self.curve, (fk.pow(self.raw[0], p), fk.pow(self.raw[1], p)))


@dataclass(frozen=True)
class FrobeniusData:
    """The curve's arithmetic fingerprint: trace, chi_pi, and factored discriminant."""

    q: int
    t: int
    delta: int
    delta_factorization: tuple  # ((prime, exponent), ...) of |delta|
    char: int | None  # characteristic for curve-backed data, None for synthetic

    @property
    def chi(self) -> tuple:
        """x^2 - t x + q as little-endian integer coefficients."""
        return (self.q, -self.t, 1)

    @classmethod
    def synthetic(cls, delta: int) -> "FrobeniusData":
        """Abstract Frobenius data for a discriminant with no underlying curve."""
        if delta >= 0 or delta % 4 not in (0, 1):
            raise InvalidInputError("discriminant must be negative and 0 or 1 mod 4")
        t = delta % 2
        q = (t * t - delta) // 4
        fac = tuple(sorted(factorint(-delta).items()))
        return cls(q=q, t=t, delta=delta, delta_factorization=fac, char=None)


def j_invariant(E: Curve) -> FieldElem:
    a3 = E.a**3 * 4
    return E.field(1728) * a3 / (a3 + E.field(27) * E.b * E.b)


def trace(E: Curve) -> FrobeniusData:
    """Exact Frobenius trace by point counting (exhaustive or BSGS, never Schoof)."""
    if not isinstance(E.field, PrimeField):
        raise InvalidInputError("trace is computed over prime fields only")
    p = E.field.p
    n = _count_points(p, int(E.a), int(E.b))
    t = p + 1 - n
    delta = t * t - 4 * p
    fac = tuple(sorted(factorint(-delta).items()))
    return FrobeniusData(q=p, t=t, delta=delta, delta_factorization=fac, char=p)


def is_ordinary(fd: FrobeniusData) -> bool:
    return fd.t % fd.q != 0


def cardinality_ext(fd: FrobeniusData, n: int) -> int:
    """#E(F_{q^n}) = q^n + 1 - t_n with t_0 = 2, t_1 = t, t_{i+1} = t*t_i - q*t_{i-1}."""
    if n < 1:
        raise InvalidInputError("extension degree must be >= 1")
    t_prev, t_cur = 2, fd.t
    for _ in range(n - 1):
        t_prev, t_cur = t_cur, fd.t * t_cur - fd.q * t_prev
    return fd.q**n + 1 - t_cur


def _count_points(p: int, a: int, b: int) -> int:
    key = (p, a % p, b % p)
    n = _count_cache.get(key)
    if n is None:
        if p <= _EXHAUSTIVE_CAP:
            n = _count_exhaustive(p, a, b)
        elif p <= _COUNT_CAP:
            n = _count_bsgs(p, a, b)
        else:
            raise InvalidInputError(f"point counting capped at p <= {_COUNT_CAP}")
        _count_cache[key] = n
    return n


def _count_exhaustive(p: int, a: int, b: int) -> int:
    qr = bytearray(p)
    for r in range(p // 2 + 1):
        qr[r * r % p] = 1
    n = 1  # infinity
    for x in range(p):
        v = (x * x % p * x + a * x + b) % p
        if v == 0:
            n += 1
        elif qr[v]:
            n += 2
    return n


def _bsgs_order_hits(ck, pt, lo: int, hi: int) -> list[int]:
    """All m in [lo, hi] with m*pt = infinity (interval baby-step giant-step)."""
    width = hi - lo
    s = math.isqrt(width) + 1
    baby = {}
    cur = None
    for j in range(s):
        baby.setdefault(cur, j)
        cur = ck.add(cur, pt)
    step = ck.smul(s, pt)
    giant = ck.smul(lo, pt)
    hits = []
    i = 0
    while lo + i * s <= hi:
        j = baby.get(ck.neg(giant))
        if j is not None and lo + i * s + j <= hi:
            hits.append(lo + i * s + j)
        giant = ck.add(giant, step)
        i += 1
    return hits


def _order_from_multiple(ck, pt, m: int) -> int:
    o = m
    for prime in factorint(m):
        while o % prime == 0 and ck.smul(o // prime, pt) is None:
            o //= prime
    return o


def _count_bsgs(p: int, a: int, b: int) -> int:
    """Shanks-Mestre style counting: combine point orders on the curve and its
    quadratic twist until a unique candidate survives in the Hasse interval."""
    rng = random.Random(derive_seed(p, "count", a, b))
    fk = backend.field_kernel(p, (0, 1))
    d = 2
    while sqrt_mod_prime(d, p) is not None:
        d += 1
    curves = [
        backend.curve_kernel(fk, (a,), (b,)),
        backend.curve_kernel(fk, (a * d * d % p,), (b * d * d % p * d % p,)),
    ]
    w = math.isqrt(4 * p)
    lo, hi = p + 1 - w, p + 1 + w
    lcms = [1, 1]
    side = 0
    for _ in range(200):
        ck = curves[side]
        aa = a if side == 0 else a * d * d % p
        bb = b if side == 0 else b * d * d % p * d % p
        while True:
            x = rng.randrange(p)
            v = (x * x % p * x + aa * x + bb) % p
            y = sqrt_mod_prime(v, p)
            if y is not None:
                break
        pt = ((x,), (y,))
        hits = _bsgs_order_hits(ck, pt, lo, hi)
        if not hits:
            raise InternalInvariantError("no order multiple in the Hasse interval")
        g = 0
        for h in hits:
            g = math.gcd(g, h)
        o = _order_from_multiple(ck, pt, g)
        lcms[side] = lcms[side] * o // math.gcd(lcms[side], o)
        first = (lo + lcms[0] - 1) // lcms[0] * lcms[0]
        cands = [
            n
            for n in range(first, hi + 1, lcms[0])
            if (2 * p + 2 - n) % lcms[1] == 0
        ]
        if len(cands) == 1:
            return cands[0]
        side = 1 - side
    raise InternalInvariantError("point counting did not converge")  # pragma: no cover


def random_point(E: Curve, rng: random.Random) -> Point:
    """Uniformly random affine point (infinity is never returned)."""
    while True:
        x = E.field.random_element(rng)
        y = sqrt_in_field(E.rhs(x))
        if y is None:
            continue
        if y.is_zero():
            # order-2 fiber has a single point; halve its weight
            if rng.getrandbits(1):
                continue
            return E._pt((x.coeffs, y.coeffs))
        if rng.getrandbits(1):
            y = -y
        return E._pt((x.coeffs, y.coeffs))


# ---------------------------------------------------------------------------
# division polynomials
# ---------------------------------------------------------------------------


def _pair_mul(R, u1v1, u2v2):
    u1, v1 = u1v1
    u2, v2 = u2v2
    return (u1 * u2 + v1 * v2 * R, u1 * v2 + v1 * u2)


@lru_cache(maxsize=None)
def _psi_table(E: Curve, m: int):
    """psi_m as a pair (u, v) meaning u(x) + v(x)*y, with y^2 reduced to the curve."""
    F = E.field
    a, b = E.a, E.b
    R = Poly(F, [b, a, 0, 1])
    if m == 0:
        return (Poly(F, []), Poly(F, []))
    if m == 1:
        return (Poly(F, [1]), Poly(F, []))
    if m == 2:
        return (Poly(F, []), Poly(F, [2]))
    if m == 3:
        return (
            Poly(F, [-(a * a), b * 12, a * 6, F.zero, F(3)]),
            Poly(F, []),
        )
    if m == 4:
        inner = Poly(
            F,
            [
                -(b * b * 8) - a**3,
                -(a * b * 4),
                -(a * a * 5),
                b * 20,
                a * 5,
                F.zero,
                F(1),
            ],
        )
        return (Poly(F, []), inner * F(4))
    n = m // 2
    if m % 2 == 1:
        t1 = _pair_mul(R, _psi_table(E, n + 2), _pair_pow3(R, _psi_table(E, n)))
        t2 = _pair_mul(R, _psi_table(E, n - 1), _pair_pow3(R, _psi_table(E, n + 1)))
        u = t1[0] - t2[0]
        v = t1[1] - t2[1]
        if not v.is_zero():
            raise InternalInvariantError("odd division polynomial is not y-free")
        return (u, Poly(F, []))
    br1 = _pair_mul(R, _psi_table(E, n + 2), _pair_sqr(R, _psi_table(E, n - 1)))
    br2 = _pair_mul(R, _psi_table(E, n - 2), _pair_sqr(R, _psi_table(E, n + 1)))
    num = _pair_mul(R, _psi_table(E, n), (br1[0] - br2[0], br1[1] - br2[1]))
    if not num[1].is_zero():
        raise InternalInvariantError("even division polynomial numerator malformed")
    q, rem = divmod(num[0], R * F(2))
    if not rem.is_zero():
        raise InternalInvariantError("even division polynomial: inexact division")
    return (Poly(F, []), q)


def _pair_sqr(R, uv):
    return _pair_mul(R, uv, uv)


def _pair_pow3(R, uv):
    return _pair_mul(R, uv, _pair_mul(R, uv, uv))


def division_poly(E: Curve, m: int) -> Poly:
    """The x-part of the m-th division polynomial (m = 2 gives x^3 + ax + b).

    Roots over the splitting field are exactly the x-coordinates of the
    nonzero m-torsion points. Supported for primes m up to 13.
    """
    if m == 2:
        return Poly(E.field, [E.b, E.a, 0, 1])
    if m < 2 or m > 13:
        raise InvalidInputError("division_poly supports small primes 2..13")
    u, v = _psi_table(E, m)
    if not v.is_zero():
        raise InvalidInputError("division_poly expects an odd (or = 2) index")
    return u


# ---------------------------------------------------------------------------
# subgroups and Velu's formulas
# ---------------------------------------------------------------------------


class Subgroup:
    """A finite Frobenius-stable subgroup of prime order, reduced to what Velu
    needs: the power sums s_j = sum x_Q^j over the nonzero points (each +-pair
    contributing twice), in the curve's own field.
    """

    __slots__ = ("curve", "ell", "xpoly", "s1", "s2", "s3", "npoints")

    def __init__(self, curve, ell, xpoly, s1, s2, s3, npoints):
        self.curve = curve
        self.ell = ell
        self.xpoly = xpoly
        self.s1 = s1
        self.s2 = s2
        self.s3 = s3
        self.npoints = npoints

    @classmethod
    def trivial(cls, curve: Curve) -> "Subgroup":
        z = curve.field.zero
        return cls(curve, 1, None, z, z, z, 0)

    @classmethod
    def from_xpoly(cls, curve: Curve, ell: int, xpoly: Poly) -> "Subgroup":
        """Kernel described by the monic polynomial of the x-coordinates
        (degree (ell-1)/2 for odd ell, degree 1 for ell = 2)."""
        F = curve.field
        xpoly = xpoly.monic()
        d = xpoly.degree
        cs = xpoly.coeffs
        e1 = -cs[d - 1] if d >= 1 else F.zero
        e2 = cs[d - 2] if d >= 2 else F.zero
        e3 = -cs[d - 3] if d >= 3 else F.zero
        p1 = e1
        p2 = e1 * p1 - e2 * 2
        p3 = e1 * p2 - e2 * p1 + e3 * 3
        mult = 1 if ell == 2 else 2
        return cls(
            curve, ell, xpoly, p1 * mult, p2 * mult, p3 * mult, mult * d
        )

    @classmethod
    def from_ext_half_orbit(cls, curve: Curve, ell: int, xs) -> "Subgroup":
        """Kernel of odd order ell given the x-coordinates of i*K for
        i=1..(ell-1)/2 over an extension; the symmetric sums must land in the
        base field (asserted, not assumed)."""
        ext = xs[0].field
        s1 = sum((x for x in xs), ext.zero) * 2
        s2 = sum((x * x for x in xs), ext.zero) * 2
        s3 = sum((x * x * x for x in xs), ext.zero) * 2
        sums = []
        for s in (s1, s2, s3):
            if any(s.coeffs[1:]):
                raise InternalInvariantError(
                    "kernel power sums are not rational: conjugate pairing is broken"
                )
            sums.append(FieldElem(curve.field, (s.coeffs[0],)))
        return cls(curve, ell, None, sums[0], sums[1], sums[2], ell - 1)

    def __repr__(self):
        return f"Subgroup(ell={self.ell} on {self.curve})"


def velu(E: Curve, ker: Subgroup) -> Curve:
    """The image curve E/ker in short Weierstrass form (same cardinality)."""
    if ker.curve != E:
        raise InvalidInputError("kernel belongs to a different curve")
    if ker.npoints == 0:
        return E
    F = E.field
    n = F(ker.npoints)
    v = ker.s2 * 3 + E.a * n
    w = ker.s3 * 5 + E.a * ker.s1 * 3 + E.b * n * 2
    try:
        return Curve(F, E.a - v * 5, E.b - w * 7)
    except InvalidInputError as exc:  # cannot happen for a genuine kernel
        raise InternalInvariantError(f"velu produced a singular curve: {exc}") from exc


def rational_subgroups(E: Curve, p: int) -> list[Subgroup]:
    """All order-p subgroups stable under the q-power Frobenius, each given by
    the (rational) polynomial of its x-coordinates."""
    F = E.field
    if p == 2:
        cubic = division_poly(E, 2)
        out = []
        for r in poly_roots(cubic):
            out.append(Subgroup.from_xpoly(E, 2, Poly(F, [-r, F(1)])))
        return out
    psi = division_poly(E, p).monic()
    factors = [g for g, _ in poly_factor(psi)]
    d = (p - 1) // 2
    remaining = list(factors)
    out = []
    while remaining:
        g = remaining.pop(0)
        if g.degree > d:
            continue
        sub = _subgroup_from_factor(E, p, d, g)
        if sub is None:
            continue
        for other in list(remaining):
            if other.divides(sub.xpoly):
                remaining.remove(other)
        out.append(sub)
    out.sort(key=lambda s: s.xpoly.key())
    return out


def _subgroup_from_factor(E: Curve, p: int, d: int, g: Poly):
    """Try to grow an irreducible factor of the division polynomial into a
    rational order-p subgroup; None if the subgroup through it is not rational."""
    F = E.field
    for deg in (g.degree, 2 * g.degree):
        ext = ext_make(F, deg)
        E_ext = E.lift_to(ext) if deg > 1 else E
        g_ext = Poly(ext, [ext(c) for c in g.coeffs]) if deg > 1 else g
        roots = poly_roots(g_ext)
        if not roots:
            continue
        r = roots[0]
        y = sqrt_in_field(E_ext.rhs(r))
        if y is None:
            continue
        T = E_ext._pt((r.coeffs, y.coeffs))
        mults = [i * T for i in range(1, p)]
        if any(m.is_infinity for m in mults) or (p * T).raw is not None:
            raise InternalInvariantError("division polynomial root of wrong order")
        xs = []
        seen = set()
        for m in mults:
            if m.raw[0] not in seen:
                seen.add(m.raw[0])
                xs.append(m.x)
        if len(xs) != d:
            raise InternalInvariantError("wrong number of kernel x-coordinates")
        h = Poly(ext, [ext(1)])
        for x in xs:
            h = h * Poly(ext, [-x, ext(1)])
        coeffs_base = []
        for c in h.coeffs:
            if any(c.coeffs[1:]):
                return None  # x-set not Galois stable: subgroup not rational
            coeffs_base.append(FieldElem(F, (c.coeffs[0],)))
        # explicit Frobenius stability of the points themselves
        piT = T.frobenius()
        if piT not in mults:
            return None
        return Subgroup.from_xpoly(E, p, Poly(F, coeffs_base))
    raise InternalInvariantError("no usable root for a division-polynomial factor")


def isomorphic(E1: Curve, E2: Curve) -> bool:
    """F_q-isomorphism test for ordinary curves: equal trace and j-invariant."""
    if E1.field != E2.field:
        raise InvalidInputError("isomorphism test needs a common base field")
    if j_invariant(E1) != j_invariant(E2):
        return False
    return trace(E1).t == trace(E2).t
