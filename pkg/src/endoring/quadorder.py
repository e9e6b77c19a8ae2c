"""Imaginary quadratic orders Z + f*O_K, ideal classes as reduced binary
quadratic forms, factor bases of split primes with their Frobenius
eigenvalues, and smooth factorization of reduced forms over a base.

Form/ideal dictionary: the form (a, b, c) of discriminant D corresponds to
the ideal a*Z + ((-b + sqrt(D))/2)*Z; composition is realized as ideal
multiplication in the basis (1, delta), delta = (-(D mod 2) + sqrt(D))/2,
followed by classical Gauss reduction. The prime ideal above a split ell
with Frobenius eigenvalue lambda maps, in the order of conductor f, to the
form with b = (2*lambda - t) * (f_max/f)^{-1} (mod ell) lifted by parity
(the norm- and eigenvalue-preserving transport of ideals of Z[pi]).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

from .curve import FrobeniusData
from .errors import (
    EmptyFactorBaseError,
    InternalInvariantError,
    InvalidInputError,
)
from .ntheory import kronecker, primes_below, sqrt_mod_prime, squarefree_decompose


@dataclass(frozen=True)
class QuadOrder:
    """The order of conductor f in the field of discriminant d_k; f_max is the
    conductor of Z[pi], so orders containing Z[pi] are exactly f | f_max."""

    d_k: int
    f: int
    f_max: int

    def __post_init__(self):
        if self.d_k >= 0:
            raise InvalidInputError("d_K must be negative")
        if self.f_max % self.f != 0:
            raise InvalidInputError("conductor must divide the maximal conductor")

    @property
    def D(self) -> int:
        return self.f * self.f * self.d_k

    def with_conductor(self, f: int) -> "QuadOrder":
        return QuadOrder(self.d_k, f, self.f_max)

    def __repr__(self):
        return f"O(d_K={self.d_k}, f={self.f})"


@dataclass(frozen=True, order=True)
class QForm:
    """Primitive positive-definite binary quadratic form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def D(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if b < 0 and (abs(b) == a or a == c):
            return False
        return True

    def key(self):
        """Canonical tie-break key preferring b >= 0 among conjugates."""
        return (self.a, abs(self.b), 0 if self.b >= 0 else 1, self.c)

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"


def identity_form(D: int) -> QForm:
    b0 = D % 2
    return QForm(1, b0, (b0 * b0 - D) // 4)


def reduce_form(a: int, b: int, c: int) -> QForm:
    """Classical Gauss reduction of a positive-definite form."""
    while True:
        if a > c:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # normalize b into (-a, a]
            r = b % (2 * a)
            if r > a:
                r -= 2 * a
            c = c + (r * r - b * b) // (4 * a)
            b = r
            continue
        break
    if b < 0 and (b == -a or a == c):
        b = -b
    return QForm(a, b, c)


def inverse_form(f: QForm) -> QForm:
    return reduce_form(f.a, -f.b, f.c)


def _module_to_form(rows, D: int) -> QForm:
    """Reduced form of the primitive part of the Z-module spanned by ``rows``,
    given in coordinates over (1, delta) with delta = (-(D mod 2)+sqrt(D))/2.

    The module must be an ideal of the order of discriminant D; a 2-column HNF
    brings it to A*Z + (B + C*delta)*Z with C = content.
    """
    b0 = D % 2
    pure = []
    mixed = None
    for x, y in rows:
        if mixed is None:
            if y:
                mixed = (x, y)
            else:
                pure.append(x)
            continue
        while y:
            q = mixed[1] // y
            mixed, (x, y) = (x, y), (mixed[0] - q * x, mixed[1] - q * y)
        pure.append(x)
    if mixed is None or mixed[1] == 0:
        raise InternalInvariantError("ideal module degenerated")
    B, C = mixed
    if C < 0:
        B, C = -B, -C
    A = 0
    for x in pure:
        A = math.gcd(A, x)
    A = abs(A)
    if A == 0 or A % C or B % C:
        raise InternalInvariantError("module is not an ideal of the order")
    a = A // C
    bp = (B // C) % a
    b = b0 - 2 * bp
    c4 = b * b - D
    if c4 % (4 * a):
        raise InternalInvariantError("ideal module has broken discriminant")
    return QForm(a, b, c4 // (4 * a))


def compose(f1: QForm, f2: QForm) -> QForm:
    """Reduced composite of two forms of the same discriminant (class-group law),
    realized as ideal multiplication."""
    D = f1.D
    if f2.D != D:
        raise InvalidInputError("cannot compose forms of different discriminants")
    b0 = D % 2
    w = (D - b0 * b0) // 4  # delta^2 = w - b0*delta
    gens1 = ((f1.a, 0), ((b0 - f1.b) // 2, 1))
    gens2 = ((f2.a, 0), ((b0 - f2.b) // 2, 1))
    rows = []
    for x1, y1 in gens1:
        for x2, y2 in gens2:
            rows.append((x1 * x2 + y1 * y2 * w, x1 * y2 + x2 * y1 - y1 * y2 * b0))
    f = _module_to_form(rows, D)
    return reduce_form(f.a, f.b, f.c)


def form_pow(f: QForm, e: int) -> QForm:
    if e < 0:
        return form_pow(inverse_form(f), -e)
    result = identity_form(f.D)
    base = f
    while e:
        if e & 1:
            result = compose(result, base)
        e >>= 1
        if e:
            base = compose(base, base)
    return result


def form_order(f: QForm) -> int:
    ident = identity_form(f.D)
    cur = f
    n = 1
    while cur != ident:
        cur = compose(cur, f)
        n += 1
    return n


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------


def order_from_frobenius(fd: FrobeniusData) -> QuadOrder:
    """Z[pi] with Delta = f_max^2 * d_K split off (d_K fundamental)."""
    if fd.delta >= 0:
        raise InvalidInputError("discriminant must be negative (ordinary curve)")
    s, m = squarefree_decompose(-fd.delta)
    d0 = -m
    if d0 % 4 == 1:
        d_k, f_max = d0, s
    else:
        if s % 2:
            raise InvalidInputError("discriminant is not 0 or 1 mod 4")
        d_k, f_max = 4 * d0, s // 2
    return QuadOrder(d_k=d_k, f=f_max, f_max=f_max)


def orders_directly_above(O: QuadOrder) -> list[QuadOrder]:
    """Orders containing O with prime index: conductor O.f / ell per prime ell | O.f."""
    out = []
    f = O.f
    seen = set()
    d = 2
    while d * d <= f:
        if f % d == 0:
            seen.add(d)
            while f % d == 0:
                f //= d
        d += 1
    if f > 1:
        seen.add(f)
    for ell in sorted(seen):
        out.append(O.with_conductor(O.f // ell))
    return out


# ---------------------------------------------------------------------------
# prime ideals over a factor base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeIdealClass:
    """A split prime of Z[pi] of norm ell, labeled by the canonical Frobenius
    eigenvalue (the smaller root of chi_pi mod ell); the conjugate carries the
    other root."""

    ell: int
    lam: int
    conjugate: bool = False

    def eigenvalue(self, fd: FrobeniusData) -> int:
        if not self.conjugate:
            return self.lam
        return (fd.t - self.lam) % self.ell

    def conj(self) -> "PrimeIdealClass":
        return PrimeIdealClass(self.ell, self.lam, not self.conjugate)

    def form_in(self, O: QuadOrder, fd: FrobeniusData) -> QForm:
        return _prime_form(self.ell, self.eigenvalue(fd), O, fd)

    def __repr__(self):
        return f"p_{self.ell}{'~' if self.conjugate else ''}"


@lru_cache(maxsize=65536)
def _prime_form_raw(ell: int, lam: int, O: QuadOrder, fd: FrobeniusData) -> QForm:
    """Unreduced form (ell, b, c) of the ideal ell*O + (pi - lam)*O.

    pi = (t + F*sqrt(D))/2 with F = f_max/f, so pi - lam has coordinates
    ((t + F*b0 - 2*lam)/2, F) over (1, delta); the ideal is Z-spanned by
    {ell, ell*delta, pi-lam, (pi-lam)*delta}. For odd ell the resulting b
    satisfies b = (2*lam - t) * F^{-1} (mod ell).
    """
    D = O.D
    b0 = D % 2
    w = (D - b0 * b0) // 4
    big_f = O.f_max // O.f
    num = fd.t + big_f * b0 - 2 * lam
    if num % 2:
        raise InternalInvariantError("pi - lam is not integral over the order basis")
    x = num // 2
    rows = [
        (ell, 0),
        (0, ell),
        (x, big_f),
        (big_f * w, x - big_f * b0),
    ]
    form = _module_to_form(rows, D)
    # recover the unreduced representative with a = ell for b-residue matching
    if form.a != ell:
        raise InternalInvariantError("prime ideal does not have prime norm")
    return form


def _prime_form(ell: int, lam: int, O: QuadOrder, fd: FrobeniusData) -> QForm:
    return _prime_form_raw(ell, lam, O, fd)


def prime_ideal_above(O: QuadOrder, fd: FrobeniusData, ell: int):
    """The canonical prime ideal class of norm ell, or None if ell is not a
    usable split prime (ell | Delta, ell inert/ramified, or ell = char)."""
    delta = fd.delta
    if delta % ell == 0:
        return None
    if fd.char is not None and ell == fd.char:
        return None
    if kronecker(delta, ell) != 1:
        return None
    lam = _chi_roots(fd.t, fd.q, delta, ell)[0]
    pic = PrimeIdealClass(ell=ell, lam=lam)
    # sanity: the form really has norm ell and discriminant D
    form = pic.form_in(O, fd)
    if form.a != ell or form.D != O.D:
        raise InternalInvariantError("prime ideal form construction failed")
    return pic


def _chi_roots(t: int, q: int, delta: int, ell: int) -> tuple[int, int]:
    """Both roots of x^2 - t x + q mod ell (split ell), canonical (smaller) first."""
    if ell == 2:
        roots = [x for x in (0, 1) if (x * x - t * x + q) % 2 == 0]
        if len(roots) != 2:
            raise InternalInvariantError("ell = 2 is not split after all")
        return (0, 1)
    s = sqrt_mod_prime(delta % ell, ell)
    if s is None or s == 0:
        raise InternalInvariantError("chi_pi has no simple roots mod a split prime")
    inv2 = pow(2, -1, ell)
    r1 = (t + s) * inv2 % ell
    r2 = (t - s) * inv2 % ell
    lo, hi = min(r1, r2), max(r1, r2)
    return (lo, hi)


@dataclass(frozen=True)
class FactorBase:
    """Split primes of norm < N, coprime to Delta (and to the characteristic)."""

    order: QuadOrder
    fd: FrobeniusData
    N: int
    primes: tuple

    def __len__(self):
        return len(self.primes)

    def norms(self) -> list[int]:
        return [p.ell for p in self.primes]

    def by_norm(self, ell: int) -> PrimeIdealClass:
        for p in self.primes:
            if p.ell == ell:
                return p
        raise KeyError(ell)


def build_factor_base(O: QuadOrder, fd: FrobeniusData, N: int) -> FactorBase:
    if N < 2:
        raise EmptyFactorBaseError(f"norm bound {N} admits no primes")
    primes = []
    for ell in primes_below(N):
        pic = prime_ideal_above(O, fd, ell)
        if pic is not None:
            primes.append(pic)
    if not primes:
        raise EmptyFactorBaseError(f"no split prime below {N} for Delta = {fd.delta}")
    return FactorBase(order=O, fd=fd, N=N, primes=tuple(primes))


def sigma(O: QuadOrder, B: FactorBase, n: dict) -> QForm:
    """Reduced form of prod p^{n_p} in cl(O); negative exponents use conjugates."""
    result = identity_form(O.D)
    for pic in B.primes:
        e = n.get(pic.ell, 0)
        if e == 0:
            continue
        f = pic.form_in(O, B.fd)
        if e < 0:
            f = inverse_form(f)
            e = -e
        result = compose(result, form_pow(f, e))
    return result


def factor_form_over_base(g: QForm, B: FactorBase, fd: FrobeniusData):
    """Signed exponent vector y with sigma(y) in the class of g, or None when
    g's leading coefficient is not smooth over the base norms.

    The sign at each ell^e is settled by whether g.b matches the b-residue of
    the canonical prime above ell (+e) or of its conjugate (-e), mod 2*ell.
    """
    if g.D != B.order.D:
        raise InvalidInputError("form is not of the factor base's discriminant")
    a = g.a
    if a == 1:
        return {}
    out: dict[int, int] = {}
    for pic in B.primes:
        ell = pic.ell
        if a % ell:
            continue
        e = 0
        while a % ell == 0:
            a //= ell
            e += 1
        plus_b = pic.form_in(B.order, fd).b
        if (g.b - plus_b) % (2 * ell) == 0:
            out[ell] = e
        elif (g.b + plus_b) % (2 * ell) == 0:
            out[ell] = -e
        else:
            raise InternalInvariantError("form coefficient matches neither conjugate")
        if a == 1:
            break
    if a != 1:
        return None
    return out


# ---------------------------------------------------------------------------
# brute-force class-group oracles
# ---------------------------------------------------------------------------


def enumerate_classes(D: int) -> list[QForm]:
    """All reduced primitive forms of discriminant D, sorted by (a, b, c)."""
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidInputError("discriminant must be negative and 0 or 1 mod 4")
    if -D > 10**6:
        raise InvalidInputError("class enumeration capped at |D| <= 10^6")
    out = []
    amax = math.isqrt(-D // 3)
    b0 = D % 2
    for a in range(1, amax + 1):
        for b in range(b0, a + 1, 2):
            for bb in ((b, -b) if b else (0,)):
                num = bb * bb - D
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a:
                    continue
                if bb < 0 and (a == -bb or a == c):
                    continue
                if math.gcd(math.gcd(a, abs(bb)), c) != 1:
                    continue
                out.append(QForm(a, bb, c))
    out.sort()
    return out


@lru_cache(maxsize=4096)
def _classes_cached(D: int) -> tuple:
    return tuple(enumerate_classes(D))


def class_number(D: int) -> int:
    return len(_classes_cached(D))


def class_group_structure(D: int) -> list[tuple[QForm, int]]:
    """Elementary-divisor generators [(alpha_i, n_i)] with n_{i+1} | n_i,
    computed from the full enumeration (brute force; trivial group -> [])."""
    forms = list(_classes_cached(D))
    h = len(forms)
    ident = identity_form(D)
    if h == 1:
        return []
    span = {ident: ()}
    gens: list[tuple[QForm, int]] = []
    while len(span) < h:
        # element of maximal order in the quotient by the current span
        best_f, best_k = None, 0
        for f in forms:
            if f in span:
                continue
            k, cur = 1, f
            while cur not in span:
                cur = compose(cur, f)
                k += 1
            if k > best_k or (k == best_k and f.key() < best_f.key()):
                best_f, best_k = f, k
        # a representative of the coset with group order exactly best_k
        rep = None
        for s in span:
            cand = compose(best_f, s)
            if form_order(cand) == best_k:
                if rep is None or cand.key() < rep.key():
                    rep = cand
        if rep is None:
            raise InternalInvariantError("no clean lift for a quotient generator")
        gens.append((rep, best_k))
        new_span = {}
        for elem, vec in span.items():
            cur = elem
            for e in range(best_k):
                new_span[cur] = vec + (e,)
                cur = compose(cur, rep)
        if len(new_span) != len(span) * best_k:
            raise InternalInvariantError("generator span is not a direct product")
        span = new_span
    if math.prod(k for _, k in gens) != h:
        raise InternalInvariantError("structure orders do not multiply to h")
    return gens


def subgroup_span(D: int, gens) -> set[QForm]:
    """Subgroup of cl(D) generated by the given forms (closure under
    composition suffices: inverses are positive powers in a finite group)."""
    ident = identity_form(D)
    span = {ident}
    frontier = [ident]
    gen_forms = [g for g in gens if g != ident]
    while frontier:
        cur = frontier.pop()
        for g in gen_forms:
            nxt = compose(cur, g)
            if nxt not in span:
                span.add(nxt)
                frontier.append(nxt)
    return span
