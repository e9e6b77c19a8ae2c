"""The order test (random relations walked through the isogeny graph plus
volcano checks at 2 and 3), blind volcano climbing, the lattice-ascent main
loop, and the deterministic all-primes volcano oracle used to verify it.
"""

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .curve import Curve, FrobeniusData, is_ordinary, j_invariant, rational_subgroups, velu
from .errors import InternalInvariantError, InvalidInputError
from .isogeny import holds_in_graph
from .ntheory import derive_seed
from .quadorder import QuadOrder, build_factor_base, order_from_frobenius, orders_directly_above
from .relations import RelationParams, find_relation

_ORACLE_PRIME_CAP = 13
_ORACLE_HEIGHT_CAP = 6


@dataclass
class OrderTestRecord:
    conductor: int
    passed: bool
    relations: list  # (exponent dict, held_in_graph)
    volcano_ok: bool


@dataclass
class EndRingResult:
    """The computed endomorphism ring with a full audit trail."""

    d_k: int
    f_max: int
    conductor: int
    lattice_path: list[int]
    volcano_levels: dict[int, int]
    transcripts: list[OrderTestRecord]
    method: str

    @property
    def discriminant(self) -> int:
        return self.conductor * self.conductor * self.d_k

    @property
    def valuations(self) -> dict[int, int]:
        out = {}
        c = self.conductor
        d = 2
        while d * d <= c:
            while c % d == 0:
                out[d] = out.get(d, 0) + 1
                c //= d
            d += 1
        if c > 1:
            out[c] = out.get(c, 0) + 1
        return out

    @property
    def relations_used(self) -> int:
        return sum(len(t.relations) for t in self.transcripts)


def _val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def volcano_level(E: Curve, fd: FrobeniusData, p: int) -> int:
    """val_p of the conductor of End E, by blind walking: start up to three
    pairwise-distinct non-backtracking p-isogeny walks and take the shortest
    distance to the floor (a curve with <= 1 rational p-subgroup)."""
    h_p = _val(_max_conductor(fd), p)
    if h_p == 0:
        return 0
    subs = rational_subgroups(E, p)
    if len(subs) <= 1:
        return h_p  # E itself is a floor curve
    best = None
    for first in subs[:3]:
        length = _walk_to_floor(E, fd, p, first, h_p)
        if length is not None and (best is None or length < best):
            best = length
    if best is None:
        raise InternalInvariantError("no volcano walk reached the floor in budget")
    return h_p - best


def _walk_to_floor(E: Curve, fd: FrobeniusData, p: int, first, h_p: int):
    """Steps until a floor curve, walking non-backtracking; None if the walk
    exceeds h_p steps (an ascending/crater walk)."""
    prev_j = j_invariant(E)
    cur = velu(E, first)
    steps = 1
    while steps <= h_p:
        subs = rational_subgroups(cur, p)
        if len(subs) <= 1:
            return steps
        cur_j = j_invariant(cur)
        nxt = None
        for s in subs:
            cand = velu(cur, s)
            if j_invariant(cand) != prev_j:
                nxt = cand
                break
        if nxt is None:
            # every edge returns to the parent (tiny crater); take it
            nxt = velu(cur, subs[0])
        prev_j = cur_j
        cur = nxt
        steps += 1
    return None


def _max_conductor(fd: FrobeniusData) -> int:
    return order_from_frobenius(fd).f_max


def order_contains_endring(
    E: Curve,
    fd: FrobeniusData,
    O: QuadOrder,
    params: RelationParams,
    rng: random.Random,
    record: OrderTestRecord | None = None,
    levels: dict[int, int] | None = None,
) -> bool:
    """Whether O is contained in End E: draw r relations of O and walk each
    through the isogeny graph, then compare conductor valuations against the
    volcano levels at 2 and 3."""
    r = max(math.ceil(3 * math.log(max(2.0, math.log(fd.q)))), params.r_min)
    B = build_factor_base(O, fd, params.resolve_norm_bound(fd))
    seed = rng.getrandbits(64)
    rels = []
    verdict = True
    for i in range(r):
        rel = find_relation(O, fd, params, random.Random(derive_seed(seed, "rel", i)), B=B)
        held = holds_in_graph(E, fd, rel, random.Random(derive_seed(seed, "walk", i)))
        rels.append((dict(rel.n), held))
        if not held:
            verdict = False
            break
    volcano_ok = True
    if verdict:
        for p in (2, 3):
            lvl = levels[p] if levels is not None else volcano_level(E, fd, p)
            if _val(O.f, p) < lvl:
                volcano_ok = False
                verdict = False
                break
    if record is not None:
        record.conductor = O.f
        record.passed = verdict
        record.relations = rels
        record.volcano_ok = volcano_ok
    return verdict


def ascend(
    E: Curve,
    fd: FrobeniusData,
    params: RelationParams | None = None,
    rng: random.Random | None = None,
    threads: int = 1,
) -> EndRingResult:
    """Locate End E by ascending the lattice of orders from Z[pi]: at each
    step scan the orders directly above (ascending prime order) and move to
    the first one the order test accepts; stop when none passes."""
    if not is_ordinary(fd):
        raise InvalidInputError("curve is supersingular (t = 0 mod p); not ordinary")
    params = params if params is not None else RelationParams()
    rng = rng if rng is not None else random.Random(0)
    master = rng.getrandbits(64)
    O = order_from_frobenius(fd)
    levels = {p: volcano_level(E, fd, p) for p in (2, 3)}
    path = [O.f]
    transcripts: list[OrderTestRecord] = []
    step = 0
    while True:
        candidates = orders_directly_above(O)
        if not candidates:
            break
        records = [OrderTestRecord(c.f, False, [], True) for c in candidates]

        def run(idx: int) -> bool:
            return order_contains_endring(
                E,
                fd,
                candidates[idx],
                params,
                random.Random(derive_seed(master, "step", step, candidates[idx].f)),
                record=records[idx],
                levels=levels,
            )

        accepted = None
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, range(len(candidates))))
            for idx, ok in enumerate(results):
                transcripts.append(records[idx])
                if ok:
                    accepted = idx
                    break
        else:
            for idx in range(len(candidates)):
                ok = run(idx)
                transcripts.append(records[idx])
                if ok:
                    accepted = idx
                    break
        if accepted is None:
            break
        O = candidates[accepted]
        path.append(O.f)
        step += 1
    return EndRingResult(
        d_k=O.d_k,
        f_max=O.f_max,
        conductor=O.f,
        lattice_path=path,
        volcano_levels=levels,
        transcripts=transcripts,
        method="ascend",
    )


def oracle_endring(E: Curve, fd: FrobeniusData) -> EndRingResult:
    """Deterministic all-primes volcano oracle: conductor = prod p^level_p."""
    if not is_ordinary(fd):
        raise InvalidInputError("curve is supersingular (t = 0 mod p); not ordinary")
    O = order_from_frobenius(fd)
    levels = {}
    conductor = 1
    for p, e in _factor(O.f_max):
        if p > _ORACLE_PRIME_CAP or e > _ORACLE_HEIGHT_CAP:
            raise InvalidInputError(
                f"volcano oracle capped at conductor primes <= {_ORACLE_PRIME_CAP} "
                f"with height <= {_ORACLE_HEIGHT_CAP}"
            )
        lvl = volcano_level(E, fd, p)
        levels[p] = lvl
        conductor *= p**lvl
    path = [O.f_max] if conductor == O.f_max else [O.f_max, conductor]
    return EndRingResult(
        d_k=O.d_k,
        f_max=O.f_max,
        conductor=conductor,
        lattice_path=path,
        volcano_levels=levels,
        transcripts=[],
        method="oracle",
    )


def _factor(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out
