"""Prime fields F_p (p > 3), extensions F_{p^k} as polynomial quotients, and
the polynomial arithmetic (gcd, modular exponentiation, factoring, roots)
used by the curve and isogeny layers.

Elements are immutable; the canonical ordering everywhere is lexicographic on
the little-endian coefficient vector. Extension moduli are chosen
deterministically (lexicographically least monic irreducible), so field
towers are reproducible across runs and machines.
"""

import itertools
import random
from functools import lru_cache

from . import backend
from .errors import InternalInvariantError, InvalidInputError
from .ntheory import derive_seed, is_prime

_POLY_RNG_SEED = derive_seed(0x454E444F, "polyfactor")


class PrimeField:
    """F_p for prime p > 3."""

    __slots__ = ("p", "kernel")

    def __init__(self, p: int):
        if p <= 3 or not is_prime(p):
            raise InvalidInputError(f"base field characteristic must be a prime > 3, got {p}")
        self.p = p
        self.kernel = backend.field_kernel(p, (0, 1))

    @property
    def char(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return 1

    @property
    def order(self) -> int:
        return self.p

    def __call__(self, v) -> "FieldElem":
        if isinstance(v, FieldElem):
            if v.field is not self and v.field != self:
                raise ValueError("element of a different field")
            return v
        return FieldElem(self, (int(v) % self.p,))

    def from_coeffs(self, coeffs) -> "FieldElem":
        return FieldElem(self, (coeffs[0] % self.p,))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, (0,))

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, (1,))

    def elements(self):
        """All elements in canonical (lexicographic) order."""
        for v in range(self.p):
            yield FieldElem(self, (v,))

    def random_element(self, rng: random.Random) -> "FieldElem":
        return FieldElem(self, (rng.randrange(self.p),))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class ExtField:
    """F_{p^k} = F_p[x]/(modulus), modulus monic irreducible of degree k."""

    __slots__ = ("base", "k", "modulus", "kernel", "_nonresidue")

    def __init__(self, base: PrimeField, modulus: tuple):
        self.base = base
        self.k = len(modulus) - 1
        self.modulus = tuple(c % base.p for c in modulus)
        self.kernel = backend.field_kernel(base.p, self.modulus)
        self._nonresidue = None

    @property
    def char(self) -> int:
        return self.base.p

    @property
    def degree(self) -> int:
        return self.k

    @property
    def order(self) -> int:
        return self.base.p**self.k

    def __call__(self, v) -> "FieldElem":
        if isinstance(v, FieldElem):
            if v.field == self:
                return v
            if v.field == self.base:
                return self.embed(v)
            raise ValueError("element of a different field")
        return FieldElem(self, self.kernel.from_int(int(v)))

    def from_coeffs(self, coeffs) -> "FieldElem":
        p = self.base.p
        c = tuple(int(x) % p for x in coeffs)
        if len(c) != self.k:
            c = (c + (0,) * self.k)[: self.k]
        return FieldElem(self, c)

    def embed(self, a: "FieldElem") -> "FieldElem":
        return FieldElem(self, (a.coeffs[0],) + (0,) * (self.k - 1))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, self.kernel.zero())

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, self.kernel.one())

    @property
    def gen(self) -> "FieldElem":
        return FieldElem(self, (0, 1) + (0,) * (self.k - 2))

    def elements(self):
        for coeffs in itertools.product(range(self.base.p), repeat=self.k):
            yield FieldElem(self, coeffs)

    def random_element(self, rng: random.Random) -> "FieldElem":
        p = self.base.p
        return FieldElem(self, tuple(rng.randrange(p) for _ in range(self.k)))

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ExtField", self.base.p, self.modulus))

    def __repr__(self):
        return f"F_{self.base.p}^{self.k}"


class FieldElem:
    """Immutable element of a PrimeField or ExtField."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field == self.field:
                return other
            if isinstance(self.field, ExtField) and other.field == self.field.base:
                return self.field.embed(other)
            if isinstance(other.field, ExtField) and self.field == other.field.base:
                return NotImplemented  # let the ext side handle it
            raise ValueError("elements of different fields")
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.kernel.add(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.kernel.sub(self.coeffs, o.coeffs))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.field.kernel.mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.field(other) / self

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.kernel.pow(self.coeffs, e))

    def __neg__(self):
        return FieldElem(self.field, self.field.kernel.neg(self.coeffs))

    def inv(self) -> "FieldElem":
        return FieldElem(self.field, self.field.kernel.inv(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.field(other)
        return (
            isinstance(other, FieldElem)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs)

    def __int__(self):
        if len(self.coeffs) != 1:
            raise ValueError("only prime-field elements convert to int")
        return self.coeffs[0]

    def __repr__(self):
        if len(self.coeffs) == 1:
            return str(self.coeffs[0])
        return str(list(self.coeffs))

    def sqrt(self):
        return sqrt_in_field(self)

    def frobenius(self) -> "FieldElem":
        """The p-power (base-field Frobenius) image."""
        return self ** self.field.char


@lru_cache(maxsize=None)
def _ext_field(p: int, k: int) -> ExtField:
    base = PrimeField(p)
    kernel_probe = backend.field_kernel
    # lexicographically least monic irreducible of degree k; constant term 0
    # would mean a root at 0, so that whole block is skipped outright
    for c0 in range(1, p):
        for rest in itertools.product(range(p), repeat=k - 1):
            modulus = (c0,) + rest + (1,)
            if _is_irreducible(p, modulus, kernel_probe):
                return ExtField(base, modulus)
    raise InternalInvariantError("no irreducible polynomial found")  # pragma: no cover


def _is_irreducible(p: int, modulus: tuple, kernel_factory) -> bool:
    """Rabin's test: x^(p^k) = x mod f, and gcd(x^(p^(k/r)) - x, f) = 1 for prime r | k.

    Quotient-ring arithmetic is well defined even when f is reducible, which
    is all the test needs.
    """
    k = len(modulus) - 1
    if k == 1:
        return True
    fk = kernel_factory(p, modulus)
    x = (0, 1) + (0,) * (k - 2)
    frob = [x]
    cur = x
    for _ in range(k):
        cur = fk.pow(cur, p)
        frob.append(cur)
    if frob[k] != x:
        return False
    kk = k
    prime_divs = []
    d = 2
    while d * d <= kk:
        if kk % d == 0:
            prime_divs.append(d)
            while kk % d == 0:
                kk //= d
        d += 1
    if kk > 1:
        prime_divs.append(kk)
    for r in prime_divs:
        h = fk.sub(frob[k // r], x)
        if _tuple_poly_gcd_is_one(p, h, modulus):
            continue
        return False
    return True


def _tuple_poly_gcd_is_one(p: int, h: tuple, modulus: tuple) -> bool:
    a = list(modulus)
    b = [c % p for c in h]
    while True:
        while b and b[-1] == 0:
            b.pop()
        if not b:
            return False  # gcd is the modulus itself (degree >= 1 here)
        if len(b) == 1:
            return True
        inv_lead = pow(b[-1], p - 2, p)
        r = list(a)
        while True:
            while r and r[-1] == 0:
                r.pop()
            if len(r) < len(b):
                break
            c = r[-1] * inv_lead % p
            d = len(r) - len(b)
            for j in range(len(b)):
                r[d + j] = (r[d + j] - c * b[j]) % p
        a, b = b, r


def ext_make(base: PrimeField, k: int):
    """F_{p^k} with the deterministic modulus choice; k = 1 returns base itself."""
    if k < 1:
        raise InvalidInputError("extension degree must be >= 1")
    if k == 1:
        return base
    return _ext_field(base.p, k)


def sqrt_in_field(a: FieldElem):
    """A square root of a, or None for a non-residue.

    Of the two roots the one with the canonically (lexicographically) smaller
    coefficient vector is returned. Deterministic: the Tonelli-Shanks
    non-residue is found by scanning elements in canonical order.
    """
    F = a.field
    if a.is_zero():
        return a
    s = F.order
    if pow_is_nonresidue(a, s):
        return None
    if s % 4 == 3:
        r = a ** ((s + 1) // 4)
    else:
        r = _tonelli(a, s)
    rr = -r
    return r if r.coeffs <= rr.coeffs else rr


def pow_is_nonresidue(a: FieldElem, order: int) -> bool:
    return a ** ((order - 1) // 2) != a.field(1)


def _field_nonresidue(F) -> FieldElem:
    if isinstance(F, ExtField) and F._nonresidue is not None:
        return F._nonresidue
    s = F.order
    for elem in F.elements():
        if elem.is_zero():
            continue
        if pow_is_nonresidue(elem, s):
            if isinstance(F, ExtField):
                F._nonresidue = elem
            return elem
    raise InternalInvariantError("no quadratic non-residue found")  # pragma: no cover


def _tonelli(a: FieldElem, s: int) -> FieldElem:
    F = a.field
    q = s - 1
    e = 0
    while q % 2 == 0:
        q //= 2
        e += 1
    z = _field_nonresidue(F)
    m, c, t, r = e, z**q, a**q, a ** ((q + 1) // 2)
    one = F(1)
    while t != one:
        i, t2 = 0, t
        while t2 != one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (m - i - 1))
        m, c = i, b * b
        t, r = t * c, r * b
    return r


# ---------------------------------------------------------------------------
# polynomials over a field
# ---------------------------------------------------------------------------


class Poly:
    """Dense univariate polynomial over a PrimeField or ExtField.

    Coefficients are little-endian FieldElems with no trailing zeros; the zero
    polynomial has an empty coefficient tuple.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = [field(c) if not isinstance(c, FieldElem) else c for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls, field) -> "Poly":
        return cls(field, [0, 1])

    @classmethod
    def const(cls, field, c) -> "Poly":
        return cls(field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial -> -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> FieldElem:
        return self.coeffs[-1]

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field, tuple(c.coeffs for c in self.coeffs)))

    def key(self):
        """Canonical sort key: (degree, coefficient vectors)."""
        return (self.degree, tuple(c.coeffs for c in self.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(self.field, out)

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly(self.field, [other])

    def __mul__(self, other):
        if isinstance(other, (FieldElem, int)):
            c = self.field(other)
            return Poly(self.field, [a * c for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(self.field, [])
        zero = self.field.zero
        out = [zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai.is_zero():
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Poly(self.field, []), self
        inv_lead = other.leading().inv()
        rem = list(self.coeffs)
        db = other.degree
        qs = [self.field.zero] * (len(rem) - db)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c.is_zero():
                continue
            c = c * inv_lead
            qs[i - db] = c
            for j, bc in enumerate(other.coeffs):
                rem[i - db + j] = rem[i - db + j] - c * bc
        return Poly(self.field, qs), Poly(self.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero() or self.leading() == self.field(1):
            return self
        inv = self.leading().inv()
        return Poly(self.field, [c * inv for c in self.coeffs])

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def derivative(self) -> "Poly":
        return Poly(self.field, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, v: FieldElem) -> FieldElem:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def pow_mod(self, e: int, modulus: "Poly") -> "Poly":
        result = Poly(self.field, [1])
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            e >>= 1
            if e:
                base = (base * base) % modulus
        return result

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                parts.append(f"{c}*x^{i}" if i else f"{c}")
        return "Poly(" + " + ".join(reversed(parts)) + ")"


def poly_roots(f: Poly, rng: random.Random | None = None) -> list[FieldElem]:
    """All roots of nonzero f in its coefficient field, multiplicity collapsed.

    Splits off the distinct-root part with gcd(f, x^|F| - x), then applies
    randomized equal-degree splitting; the output order is canonical
    (lexicographic on coefficient vectors) regardless of the RNG.
    """
    if f.is_zero():
        raise InvalidInputError("root finding needs a nonzero polynomial")
    F = f.field
    if rng is None:
        rng = random.Random(_POLY_RNG_SEED)
    if f.degree == 0:
        return []
    x = Poly.x(F)
    xq = x.pow_mod(F.order, f)
    g = f.gcd(xq - x)
    roots: list[FieldElem] = []
    _split_linear(g, rng, roots)
    roots.sort(key=lambda e: e.coeffs)
    return roots


def _split_linear(g: Poly, rng: random.Random, out: list[FieldElem]) -> None:
    """g = product of distinct monic linear factors; collect the roots."""
    if g.degree <= 0:
        return
    F = g.field
    if g.coeffs[0].is_zero():
        out.append(F.zero)
        g = g // Poly.x(F)
        if g.degree <= 0:
            return
    if g.degree == 1:
        out.append(-g.coeffs[0] / g.coeffs[1])
        return
    s = F.order
    stack = [g]
    while stack:
        h = stack.pop()
        if h.degree == 1:
            out.append(-h.coeffs[0] / h.coeffs[1])
            continue
        while True:
            r = Poly(F, [F.random_element(rng) for _ in range(h.degree)] + [F(1)])
            t = r.pow_mod((s - 1) // 2, h) - Poly(F, [1])
            d = h.gcd(t)
            if 0 < d.degree < h.degree:
                stack.append(d)
                stack.append(h // d)
                break


def poly_factor(f: Poly, rng: random.Random | None = None) -> list[tuple[Poly, int]]:
    """Factor f into monic irreducibles: [(g, multiplicity)], canonically sorted."""
    if f.is_zero():
        raise InvalidInputError("cannot factor the zero polynomial")
    F = f.field
    if rng is None:
        rng = random.Random(_POLY_RNG_SEED)
    found: dict = {}
    _factor_into(f.monic(), F, rng, found)
    items = [(g, e) for g, e in found.items()]
    items.sort(key=lambda t: t[0].key())
    return items


def _factor_into(f: Poly, F, rng, found: dict) -> None:
    if f.degree <= 0:
        return
    fp = f.derivative()
    if fp.is_zero():
        # f = g(x^p); p-th roots of coefficients via c^(order/p)
        p = F.char
        e = F.order // p
        g = Poly(F, [f.coeffs[i] ** e for i in range(0, len(f.coeffs), p)])
        sub: dict = {}
        _factor_into(g, F, rng, sub)
        for h, m in sub.items():
            found[h] = found.get(h, 0) + m * p
        return
    sq = f // f.gcd(fp)  # squarefree part
    for g in _factor_squarefree(sq, F, rng):
        m = 0
        r = f
        while True:
            q, rem = divmod(r, g)
            if not rem.is_zero():
                break
            m += 1
            r = q
        found[g] = found.get(g, 0) + m


def _factor_squarefree(f: Poly, F, rng) -> list[Poly]:
    out: list[Poly] = []
    x = Poly.x(F)
    h = x
    d = 0
    rem = f
    while rem.degree > 0:
        d += 1
        if rem.degree < 2 * d:
            out.append(rem.monic())
            break
        h = h.pow_mod(F.order, rem)
        g = rem.gcd(h - x)
        if g.degree > 0:
            out.extend(_equal_degree_split(g, d, F, rng))
            rem = rem // g
            h = h % rem
    return out


def _equal_degree_split(g: Poly, d: int, F, rng) -> list[Poly]:
    if g.degree == d:
        return [g.monic()]
    s = F.order
    stack = [g.monic()]
    out = []
    while stack:
        h = stack.pop()
        if h.degree == d:
            out.append(h)
            continue
        while True:
            r = Poly(F, [F.random_element(rng) for _ in range(h.degree)] + [F(1)])
            t = r.pow_mod((s**d - 1) // 2, h) - Poly(F, [1])
            w = h.gcd(t)
            if 0 < w.degree < h.degree:
                stack.append(w)
                stack.append(h // w)
                break
    return out
