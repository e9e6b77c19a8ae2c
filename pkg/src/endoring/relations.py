"""Random short relations over a factor base (the quasi-random relation
generator), relation verification in arbitrary orders of the lattice, the
relation-lattice oracle built from the class-group structure, and the
order-distinguishing containment predicate with its exceptional cases.
"""

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .curve import FrobeniusData
from .errors import InternalInvariantError, InvalidInputError, MaxTrialsExceeded
from .ntheory import derive_seed, kronecker
from .quadorder import (
    FactorBase,
    QuadOrder,
    build_factor_base,
    class_group_structure,
    _classes_cached,
    compose,
    identity_form,
    inverse_form,
    sigma,
    factor_form_over_base,
    subgroup_span,
)

# Desk-scale clamps for the paper's parameter formulas (see RelationParams).
DESK_COORD_FLOOR = 8
DESK_COORD_CAP = 12
DESK_SMALL_NORM_CAP = 16
ORACLE_DISC_CAP = 10**6


@dataclass(frozen=True)
class RelationParams:
    """Knobs of the relation generator.

    The defaults follow the source formulas -- norm bound N = max(12 log^2|Delta|,
    L(q)^z) with z = 1/(2 sqrt 2), per-coordinate bound ~ log^{4+eps}|D|, small-norm
    cutoff ~ log^{2+eps}|D| -- but the two walk-cost drivers are clamped to desk
    scale (bounds far above these make isogeny walks astronomically long for tiny q
    while adding nothing at these sizes). Every field can be overridden explicitly.
    """

    z: float = 1.0 / (2.0 * math.sqrt(2.0))
    epsilon: float = 1.0
    norm_bound: int | None = None  # N override
    small_norm_bound: int | None = None
    coord_bound: int | None = None
    r_min: int = 8
    max_trials: int = 10000

    def resolve_norm_bound(self, fd: FrobeniusData) -> int:
        if self.norm_bound is not None:
            return max(2, self.norm_bound)
        ln_d = math.log(max(3, -fd.delta))
        bach = 12.0 * ln_d * ln_d
        lqz = math.exp(self.z * math.sqrt(math.log(fd.q) * math.log(max(2.0, math.log(fd.q))))) if fd.q > 2 else 2.0
        return max(8, math.ceil(bach), math.ceil(lqz))

    def resolve_coord_bound(self, O: QuadOrder) -> int:
        if self.coord_bound is not None:
            return max(1, self.coord_bound)
        ln_d = math.log(max(3, -O.D))
        paper = math.ceil(ln_d ** (4 + self.epsilon))
        return max(DESK_COORD_FLOOR, min(paper, DESK_COORD_CAP))

    def resolve_small_norm_bound(self, O: QuadOrder) -> int:
        if self.small_norm_bound is not None:
            return max(2, self.small_norm_bound)
        ln_d = math.log(max(3, -O.D))
        paper = math.ceil(ln_d ** (2 + self.epsilon))
        return max(3, min(paper, DESK_SMALL_NORM_CAP))


@dataclass
class Relation:
    """A signed exponent vector over a factor base; when asserted "of O" it
    satisfies sigma(O, n) = identity."""

    base: FactorBase
    n: dict[int, int]
    trials: int = 0

    def norm1(self) -> int:
        return sum(abs(e) for e in self.n.values())

    def support(self) -> list[int]:
        return sorted(ell for ell, e in self.n.items() if e)

    def __repr__(self):
        return f"Relation({dict(sorted(self.n.items()))})"


def _draw_vector(primes, coord_bound: int, rng: random.Random) -> dict[int, int]:
    return {
        pic.ell: rng.randint(-(coord_bound - 1), coord_bound - 1) for pic in primes
    }


def _small_primes(B: FactorBase, bound: int):
    return _small_primes_cached(B, bound)


@lru_cache(maxsize=4096)
def _small_primes_cached(B: FactorBase, bound: int):
    """Base primes of norm below the small-norm cutoff, widened (in norm order)
    until their classes generate cl(Delta).

    The draws must reach every class of every order in the lattice jointly,
    which holds exactly when the support generates the class group of Z[pi];
    the source's GRH equidistribution over all primes below log^{2+eps}|D| is
    replaced at desk scale by this explicit enumeration-oracle check. At least
    two primes always qualify (one if the base is a singleton)."""
    small = [p for p in B.primes if p.ell < bound]
    want = min(2, len(B.primes))
    if len(small) < want:
        small = list(B.primes[: want])
    delta = B.fd.delta
    if -delta <= ORACLE_DISC_CAP:
        h = len(_classes_cached(delta))
        Opi = QuadOrder(B.order.d_k, B.order.f_max, B.order.f_max)
        classes = {_reduce(p.form_in(Opi, B.fd)) for p in small}
        rest = [p for p in B.primes if p not in small]
        while len(subgroup_span(delta, classes)) < h and rest:
            nxt = rest.pop(0)
            small.append(nxt)
            classes.add(_reduce(nxt.form_in(Opi, B.fd)))
    return tuple(small)


def _reduce(f):
    from .quadorder import reduce_form

    return reduce_form(f.a, f.b, f.c)


def find_relation(
    O: QuadOrder,
    fd: FrobeniusData,
    params: RelationParams,
    rng: random.Random,
    B: FactorBase | None = None,
) -> Relation:
    """A quasi-random nonzero relation of O: draw x on the small primes, reduce
    sigma(x), factor the reduction back over the base, return x - y.

    Trials are independent; each derives its own RNG from (seed, trial index),
    so the result is deterministic regardless of scheduling.
    """
    if B is None:
        B = build_factor_base(O, fd, params.resolve_norm_bound(fd))
    coord_bound = params.resolve_coord_bound(O)
    small = _small_primes(B, params.resolve_small_norm_bound(O))
    seed = rng.getrandbits(64)
    ident = identity_form(O.D)
    for trial in range(1, params.max_trials + 1):
        trng = random.Random(derive_seed(seed, "trial", trial))
        x = _draw_vector(small, coord_bound, trng)
        g = sigma(O, B, x)
        y = factor_form_over_base(g, B, fd)
        if y is None:
            continue
        n = {ell: e for ell, e in ((l, x.get(l, 0) - y.get(l, 0)) for l in set(x) | set(y)) if e}
        if not n:
            continue  # the zero relation holds everywhere and carries no information
        if sigma(O, B, n) != ident:
            raise InternalInvariantError("relation does not vanish in its own order")
        return Relation(base=B, n=n, trials=trial)
    raise MaxTrialsExceeded(
        f"no relation of disc {O.D} within {params.max_trials} trials "
        f"(N={B.N}, coord_bound={coord_bound})"
    )


def holds_in_order(R: Relation, O2: QuadOrder, fd: FrobeniusData | None = None) -> bool:
    """Whether the relation's ideal product is trivial in cl(O2)."""
    fd = fd if fd is not None else R.base.fd
    return sigma(O2, R.base, R.n) == identity_form(O2.D)


# ---------------------------------------------------------------------------
# relation-lattice oracle
# ---------------------------------------------------------------------------


def _sigma_inverse_table(O: QuadOrder, B: FactorBase):
    """BFS over exponent vectors by increasing 1-norm: a shortest-found base
    preimage for every ideal class (replaces the GRH short-preimage argument).
    Raises if the base does not generate cl(O).

    Expanding over every base prime is wasted work; the BFS grows a prefix of
    the base until it generates, which keeps the edge count small while the
    resulting vectors remain valid base preimages."""
    from collections import deque

    D = O.D
    h = len(_classes_cached(D))
    ident = identity_form(D)
    forms = [(pic.ell, pic.form_in(O, B.fd)) for pic in B.primes]
    n_gens = min(2, len(forms))
    while True:
        table = {ident: {}}
        queue = deque([ident])
        while queue:
            cur = queue.popleft()
            vec = table[cur]
            for ell, f in forms[:n_gens]:
                for sgn, ff in ((1, f), (-1, inverse_form(f))):
                    nxt = compose(cur, ff)
                    if nxt not in table:
                        nv = dict(vec)
                        nv[ell] = nv.get(ell, 0) + sgn
                        if nv[ell] == 0:
                            del nv[ell]
                        table[nxt] = nv
                        queue.append(nxt)
        if len(table) == h:
            return table
        if n_gens >= len(forms):
            raise InvalidInputError(
                f"factor base does not generate cl({D}): reached {len(table)} of {h} classes"
            )
        n_gens += 1


def _vec_add(a: dict, b: dict, scale: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
        if out[k] == 0:
            del out[k]
    return out


def relation_lattice_basis(O: QuadOrder, B: FactorBase) -> list[Relation]:
    """A generating set of the relation lattice of O over B, built from the
    class-group structure by double-and-add:

    (i)  v(alpha_i^(2^j)) - 2 v(alpha_i^(2^(j-1))),
    (ii) sum_j bit_j(ord alpha_i) * v(alpha_i^(2^j)),
    (iii) delta_p - sum_i sum_j bit_j(n_i) * v(alpha_i^(2^j)) for [p] = prod alpha_i^(n_i),

    where v = sigma^{-1} is the BFS preimage table."""
    D = O.D
    if -D > ORACLE_DISC_CAP:
        raise InvalidInputError("relation-lattice oracle capped at |D| <= 10^6")
    ident = identity_form(D)
    inv_table = _sigma_inverse_table(O, B)
    structure = class_group_structure(D)
    fd = B.fd
    out_vecs: list[dict] = []

    # discrete logs over the structure generators: class -> (n_1, ..., n_r)
    dlog = {ident: tuple(0 for _ in structure)}
    for i, (gen, order) in enumerate(structure):
        cur_items = list(dlog.items())
        step = ident
        for e in range(1, order):
            step = compose(step, gen)
            for cls, vec in cur_items:
                nxt = compose(cls, step)
                nv = list(vec)
                nv[i] = e
                dlog[nxt] = tuple(nv)

    # power tables v(alpha_i^(2^j))
    pow_vecs: list[list[dict]] = []
    for gen, order in structure:
        vecs = []
        cur = gen
        j = 0
        while (1 << j) <= order:
            vecs.append(inv_table[_reduced(cur)])
            cur = compose(cur, cur)
            j += 1
        pow_vecs.append(vecs)

    for i, (gen, order) in enumerate(structure):
        # (i) doubling relations
        for j in range(1, order.bit_length()):
            if (1 << j) > order:
                break
            vec = _vec_add(pow_vecs[i][j], pow_vecs[i][j - 1], scale=-2)
            out_vecs.append(vec)
        # (ii) the order relation via the bits of ord(alpha_i)
        vec: dict = {}
        for j in range(order.bit_length()):
            if (order >> j) & 1:
                vec = _vec_add(vec, pow_vecs[i][j])
        out_vecs.append(vec)

    # (iii) each base prime against its decomposition
    for pic in B.primes:
        cls = _reduced(pic.form_in(O, fd))
        exps = dlog[cls]
        vec = {pic.ell: 1}
        for i, n_i in enumerate(exps):
            for j in range(n_i.bit_length()):
                if (n_i >> j) & 1:
                    vec = _vec_add(vec, pow_vecs[i][j], scale=-1)
        out_vecs.append(vec)

    rels = []
    for vec in out_vecs:
        rel = Relation(base=B, n=vec)
        if sigma(O, B, vec) != ident:
            raise InternalInvariantError("lattice basis vector is not a relation")
        rels.append(rel)
    return rels


def _reduced(f):
    from .quadorder import reduce_form

    return reduce_form(f.a, f.b, f.c)


def lattice_index(rels: list[Relation], B: FactorBase) -> int:
    """[Z^B : <rels>] via the determinant of the Hermite normal form (0 when
    the rows do not span full rank)."""
    norms = B.norms()
    idx = {ell: i for i, ell in enumerate(norms)}
    dim = len(norms)
    rows = []
    for r in rels:
        row = [0] * dim
        for ell, e in r.n.items():
            row[idx[ell]] = e
        rows.append(row)
    # incremental row HNF; the triangular system is re-reduced after every
    # insertion, which keeps entries bounded by the pivots (naive insertion
    # suffers catastrophic coefficient growth even on tiny inputs)
    h: list[list[int] | None] = [None] * dim
    for row in rows:
        row = list(row)
        changed = False
        for c in range(dim):
            if row[c] == 0:
                continue
            if h[c] is None:
                if row[c] < 0:
                    row = [-v for v in row]
                h[c] = row
                changed = True
                break
            a, b = h[c][c], row[c]
            if b % a == 0:
                q = b // a
                piv = h[c]
                row = [y - q * x for x, y in zip(piv, row)]
                continue
            g, u, v = _xgcd(a, b)
            new_pivot = [u * x + v * y for x, y in zip(h[c], row)]
            row = [(a // g) * y - (b // g) * x for x, y in zip(h[c], row)]
            h[c] = new_pivot
            changed = True
        if changed:
            _hermite_reduce(h, dim)
    det = 1
    for c in range(dim):
        if h[c] is None:
            return 0
        det *= h[c][c]
    return abs(det)


def _hermite_reduce(h: list, dim: int) -> None:
    """Normalize pivots positive and reduce every entry above a pivot into
    [0, pivot); bounds all intermediate entries."""
    for c in range(dim):
        piv = h[c]
        if piv is None:
            continue
        if piv[c] < 0:
            h[c] = piv = [-v for v in piv]
        p = piv[c]
        for c2 in range(dim):
            other = h[c2]
            if c2 == c or other is None or other[c] == 0:
                continue
            q = other[c] // p
            if q:
                h[c2] = [y - q * x for x, y in zip(piv, other)]


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# order containment of relation lattices
# ---------------------------------------------------------------------------


def lattice_contains(O: QuadOrder, O2: QuadOrder) -> bool:
    """Whether the relation lattice of O2 contains that of O: true iff O2
    contains O, or one of the exceptional cases holds (unit discriminants -3,
    -4 at conductors 2, 3; index 2 below an odd-conductor order when 2 splits).
    """
    if O.d_k != O2.d_k:
        raise InvalidInputError("orders lie in different quadratic fields")
    d_k = O.d_k
    if O.f % O2.f == 0:
        return True
    if d_k == -4 and O2.f == 2:
        return True
    if d_k == -3 and O2.f in (2, 3):
        return True
    if kronecker(d_k, 2) == 1 and O2.f % 2 == 0:
        u = O2.f // 2
        if u % 2 == 1 and O.f % u == 0:
            return True
    return False


def subset_holding_probability_index(
    O: QuadOrder, O2: QuadOrder, B: FactorBase
) -> int:
    """[Lambda_O : Lambda_O  intersect Lambda_O2] = order of the subgroup of
    cl(O2) generated by the images of a basis of Lambda_O."""
    rels = relation_lattice_basis(O, B)
    images = {sigma(O2, B, r.n) for r in rels}
    return len(subgroup_span(O2.D, images))
