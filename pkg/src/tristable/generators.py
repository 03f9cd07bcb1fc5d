"""Instance constructions: fixed gadgets, adversarial families, random
corpora, the matching-to-marriage embedding, and the marriage-to-assignment
lift.

Wherever a construction leaves an ordering free ("any order" regions and
list tails), it is completed lexicographically so instances are canonical
and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DmInstance,
    GsmInstance,
    Marriage,
    PsaInstance,
    build_gsm_instance,
    build_psa_instance,
    marriage_from_permutations,
    pair_index,
    pair_members,
    psa_pair_table,
    psa_pairs,
)
from .errors import NotDegree3Padded, OddN, ValidationError

# Seed-stream tags keep the GSM and PSA random families independent.
# Generator: numpy PCG64 via default_rng; rows are drawn gender by gender
# (women, men, dogs), player by player.
_GSM_STREAM = 0x35AB1
_PSA_STREAM = 0x35AB2


def _complete_row(n: int, prefix_pairs: Iterable[tuple[int, int]]) -> list[int]:
    """A full preference row: the given pairs first, the rest lexicographic."""
    row = []
    seen = set()
    for first, second in prefix_pairs:
        p = pair_index(n, first, second)
        if p not in seen:
            seen.add(p)
            row.append(p)
    row.extend(p for p in range(n * n) if p not in seen)
    return row


def _block(firsts: Iterable[int], seconds: Iterable[int]) -> list[tuple[int, int]]:
    return [(f, s) for f in firsts for s in seconds]


def gen_gadget2() -> GsmInstance:
    """The fixed n=2 instance in which every marriage has a blocking triple.

    Explicit list heads (0-based indices): a0: b0d0, b1d1; a1: b1d0;
    b0: a0d0; b1: a0d1, a1d0; d0: a1b1, a0b0; d1: a0b1.  Tails are
    lexicographic.
    """
    women = [_complete_row(2, [(0, 0), (1, 1)]),
             _complete_row(2, [(1, 0)])]
    men = [_complete_row(2, [(0, 0)]),
           _complete_row(2, [(0, 1), (1, 0)])]
    dogs = [_complete_row(2, [(1, 1), (0, 0)]),
            _complete_row(2, [(0, 1)])]
    return build_gsm_instance(2, women, men, dogs)


def _rot_block(firsts, seconds, q: int) -> list[tuple[int, int]]:
    """A half-by-half block in lexicographic order rotated right by q."""
    pairs = _block(firsts, seconds)
    k = (-q) % len(pairs)
    return pairs[k:] + pairs[:k]


def gen_adversarial(n: int) -> GsmInstance:
    """Block-structured preferences forcing many blocking triples.

    Each gender splits into halves (indices below and at/above n/2); the
    list head of every player is a sequence of half-by-half blocks with a
    lexicographic tail.  Within each block the lexicographic pair order is
    rotated right by the player's position inside its half; with the
    plain lexicographic order some marriages are stable at n >= 4, while
    the rotated order provably leaves none (checked exhaustively for
    n <= 6 in the tests).  At n=2 the rotation is vacuous and the
    instance is exactly the fixed two-player gadget.
    """
    if n < 2 or n % 2 != 0:
        raise OddN(f"adversarial construction needs even n >= 2, got {n}")
    half = n // 2
    lo = range(half)
    hi = range(half, n)
    women = [_complete_row(n, _rot_block(lo, lo, q) + _rot_block(hi, hi, q))
             for q in range(half)]
    women += [_complete_row(n, _rot_block(hi, lo, q)) for q in range(half)]
    men = [_complete_row(n, _rot_block(lo, lo, q)) for q in range(half)]
    men += [_complete_row(n, _rot_block(lo, hi, q) + _rot_block(hi, lo, q))
            for q in range(half)]
    dogs = [_complete_row(n, _rot_block(hi, hi, q) + _rot_block(lo, lo, q))
            for q in range(half)]
    dogs += [_complete_row(n, _rot_block(lo, hi, q)) for q in range(half)]
    return build_gsm_instance(n, women, men, dogs)


def gen_random(n: int, seed: int) -> GsmInstance:
    """Uniform random instance; identical (n, seed) gives identical output."""
    rng = np.random.default_rng(np.random.SeedSequence((_GSM_STREAM, n, seed)))
    tables = [[list(map(int, rng.permutation(n * n))) for _ in range(n)]
              for _ in range(3)]
    return build_gsm_instance(n, *tables)


def gen_random_psa(num_players: int, seed: int) -> PsaInstance:
    """Uniform random three-person assignment instance."""
    universe = (num_players - 1) * (num_players - 2) // 2
    rng = np.random.default_rng(
        np.random.SeedSequence((_PSA_STREAM, num_players, seed)))
    rows = [list(map(int, rng.permutation(universe)))
            for _ in range(num_players)]
    return build_psa_instance(num_players, rows)


# ---------------------------------------------------------------------------
# 3DM-3 -> 3GSM embedding


@dataclass(frozen=True)
class GsmEmbedding:
    """Index bookkeeping for an embedded matching instance.

    ``incident[i]`` holds element i's three incident edges as (x, y) pairs,
    padded by repeating the last edge.  Women are occurrence copies a[i][k];
    men and dogs carry one problem element plus two helper players each.
    """

    m: int
    incident: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n(self) -> int:
        return 6 * self.m

    # Global player indices.  Half j is 0 or 1; i indexes problem elements.
    def a_idx(self, j: int, i: int, k: int) -> int:
        return j * 3 * self.m + 3 * i + k

    def b_idx(self, j: int, i: int) -> int:
        return j * 3 * self.m + i

    def w_idx(self, j: int, i: int) -> int:
        return j * 3 * self.m + self.m + i

    def y_idx(self, j: int, i: int) -> int:
        return j * 3 * self.m + 2 * self.m + i

    def d_idx(self, j: int, i: int) -> int:
        return j * 3 * self.m + i

    def x_idx(self, j: int, i: int) -> int:
        return j * 3 * self.m + self.m + i

    def z_idx(self, j: int, i: int) -> int:
        return j * 3 * self.m + 2 * self.m + i


def embed_3dm(dm: DmInstance) -> tuple[GsmInstance, GsmEmbedding]:
    """Embed a degree-bounded matching instance into a marriage instance.

    Requires every element of the first part to have between one and three
    incident edges; shorter lists are padded by duplicating the last edge.
    The embedded instance has n = 6m players per gender split into halves,
    with list heads that make perfect matchings correspond to stable
    marriages (see :func:`witness_marriage`).
    """
    m = dm.m
    incident: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for w, x, y in dm.edges:
        incident[w].append((x, y))
    for part, degs in enumerate(dm.degrees()):
        if max(degs, default=0) > 3:
            raise NotDegree3Padded(
                f"part {part} has an element in more than 3 edges")
    for i, edges in enumerate(incident):
        if not edges:
            raise NotDegree3Padded(f"element {i} has no incident edge to pad")
        while len(edges) < 3:
            edges.append(edges[-1])
    emb = GsmEmbedding(m=m, incident=tuple(tuple(e) for e in incident))
    n = emb.n
    half = 3 * m

    lo = range(half)
    hi = range(half, n)

    women_rows = []
    for j in (0, 1):
        tail = (_block(lo, lo) + _block(hi, hi)) if j == 0 else _block(hi, lo)
        for i in range(m):
            for k in range(3):
                kx, ly = emb.incident[i][k]
                head = [(emb.w_idx(j, i), emb.x_idx(j, i)),
                        (emb.y_idx(j, i), emb.z_idx(j, i)),
                        (emb.b_idx(j, kx), emb.d_idx(j, ly))]
                women_rows.append(
                    (emb.a_idx(j, i, k), _complete_row(n, head + tail)))
    women_rows.sort()
    women = [row for _, row in women_rows]

    half1_tail = _block(lo, lo)
    half2_tail = _block(lo, hi) + _block(hi, lo)

    men_rows = []
    for j in (0, 1):
        tail = half1_tail if j == 0 else half2_tail
        for i in range(m):
            men_rows.append((emb.b_idx(j, i), _complete_row(n, tail)))
            head_w = [(emb.a_idx(j, i, k), emb.x_idx(j, i)) for k in (0, 1, 2)]
            men_rows.append((emb.w_idx(j, i), _complete_row(n, head_w + tail)))
            head_y = [(emb.a_idx(j, i, k), emb.z_idx(j, i)) for k in (0, 1, 2)]
            men_rows.append((emb.y_idx(j, i), _complete_row(n, head_y + tail)))
    men_rows.sort()
    men = [row for _, row in men_rows]

    dog_tail_1 = _block(hi, hi) + _block(lo, lo)
    dog_tail_2 = _block(lo, hi)
    dogs_rows = []
    for j in (0, 1):
        tail = dog_tail_1 if j == 0 else dog_tail_2
        for i in range(m):
            dogs_rows.append((emb.d_idx(j, i), _complete_row(n, tail)))
            head_x = [(emb.a_idx(j, i, k), emb.w_idx(j, i)) for k in (2, 1, 0)]
            dogs_rows.append((emb.x_idx(j, i), _complete_row(n, head_x + tail)))
            head_z = [(emb.a_idx(j, i, k), emb.y_idx(j, i)) for k in (2, 1, 0)]
            dogs_rows.append((emb.z_idx(j, i), _complete_row(n, head_z + tail)))
    dogs_rows.sort()
    dogs = [row for _, row in dogs_rows]

    return build_gsm_instance(n, women, men, dogs), emb


def witness_marriage(emb: GsmEmbedding,
                     matching: Sequence[Sequence[int]]) -> Marriage:
    """The stable marriage induced by a perfect matching of the source.

    For each element i, the occurrence copy whose incident edge was matched
    marries the corresponding (man, dog) problem pair; the remaining two
    copies marry the helper pairs (w, x) and (y, z) in that order.  Applied
    in both halves.
    """
    matched: dict[int, tuple[int, int]] = {}
    for w, x, y in matching:
        if w in matched:
            raise ValidationError(f"element {w} matched twice")
        matched[w] = (x, y)
    if sorted(matched) != list(range(emb.m)):
        raise ValidationError("matching is not perfect on the first part")
    n = emb.n
    sigma = [0] * n
    tau = [0] * n
    for j in (0, 1):
        for i in range(emb.m):
            pair = matched[i]
            if pair not in emb.incident[i]:
                raise ValidationError(
                    f"edge {(i,) + pair} is not incident to element {i}")
            c = emb.incident[i].index(pair)
            rest = [k for k in range(3) if k != c]
            sigma[emb.a_idx(j, i, c)] = emb.b_idx(j, pair[0])
            tau[emb.a_idx(j, i, c)] = emb.d_idx(j, pair[1])
            sigma[emb.a_idx(j, i, rest[0])] = emb.w_idx(j, i)
            tau[emb.a_idx(j, i, rest[0])] = emb.x_idx(j, i)
            sigma[emb.a_idx(j, i, rest[1])] = emb.y_idx(j, i)
            tau[emb.a_idx(j, i, rest[1])] = emb.z_idx(j, i)
    return marriage_from_permutations(sigma, tau)


def gen_planted_dm(m: int, seed: int, extra_edges: int = 2) -> tuple[DmInstance, tuple]:
    """A random degree-bounded instance with a planted perfect matching.

    Returns the instance and the planted matching's edges.
    """
    from .core import build_dm_instance

    rng = np.random.default_rng(np.random.SeedSequence((0x35AB3, m, seed)))
    perm_x = list(map(int, rng.permutation(m)))
    perm_y = list(map(int, rng.permutation(m)))
    planted = [(i, perm_x[i], perm_y[i]) for i in range(m)]
    edges = list(planted)
    degs = [[1] * m for _ in range(3)]
    attempts = 0
    while len(edges) < m + extra_edges and attempts < 50 * (extra_edges + 1):
        attempts += 1
        e = tuple(int(v) for v in rng.integers(0, m, size=3))
        if e in edges:
            continue
        if all(degs[p][e[p]] < 3 for p in range(3)):
            edges.append(e)
            for p in range(3):
                degs[p][e[p]] += 1
    return (build_dm_instance(m, edges, degree_bounded_3=True),
            tuple(planted))


# ---------------------------------------------------------------------------
# 3GSM -> 3PSA lift


def lift_gsm_to_psa(gsm: GsmInstance) -> PsaInstance:
    """View a marriage instance as an assignment instance on 3n players.

    Players are ordered women, men, dogs.  Each player keeps their
    cross-gender pairs in the source order at the head of their list; all
    remaining pairs are appended in lexicographic order.
    """
    n = gsm.n
    num = 3 * n
    rows = []
    for u in range(num):
        gender, idx = divmod(u, n)
        offsets = {0: (n, 2 * n), 1: (0, 2 * n), 2: (0, n)}[gender]
        head = []
        for p in gsm.prefs[gender][idx]:
            f, s = pair_members(n, p)
            head.append(tuple(sorted((offsets[0] + f, offsets[1] + s))))
        head_set = set(head)
        table = psa_pair_table(num, u)
        order = head + [pr for pr in psa_pairs(num, u) if pr not in head_set]
        rows.append([table[pr] for pr in order])
    return build_psa_instance(num, rows)


def lift_marriage_to_matching(n: int, marriage: Marriage):
    """The 3n-player matching corresponding to a marriage under the lift."""
    from .core import build_matching

    triples = [(a, n + b, 2 * n + d) for a, b, d in marriage.families]
    return build_matching(3 * n, triples)
