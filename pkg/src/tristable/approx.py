"""Greedy constant-factor approximations for maximally stable marriages
and matchings, built on stable-set size maximization.

A family's stable set is the set of triples that share a member with it and
that the shared member weakly disprefers to the family; such triples can
never block a solution containing the family.  The greedy algorithms pick a
family maximizing the stable-set size, remove its members, and recurse.

Per-step floor for the marriage greedy with k players per gender left:
``|S| >= ceil(4k^2/3 - k - 1)``.  For the matching greedy the analogous
pigeonhole argument over the C(3k-1, 2)-pair universe (mark threshold
``floor(P/3) + 1``) yields ``|S| >= 2*(P - P//3) - 3k + 2``; summing the
per-step accounting gives the cumulative slack constant
``ASA_QUADRATIC_SLACK`` below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .core import (
    DOGS,
    GsmInstance,
    Marriage,
    Matching,
    MEN,
    PsaInstance,
    StabilityReport,
    WOMEN,
    build_gsm_instance,
    build_matching,
    marriage_from_permutations,
    pair_index,
    pair_members,
    psa_pair_table,
)
from .errors import IndexOutOfRange
from .stability import stability_report_gsm, stability_report_psa

# stab(ASA) >= 2n^3 - ASA_QUADRATIC_SLACK * n^2 for every instance: the
# summed per-step bound gives 2n^3 - 1.5n^2 + O(n), and the constant 2
# absorbs the linear term for all n >= 1 (checked exhaustively in tests
# for 3n <= 12 and by the closed-form sum beyond).
ASA_QUADRATIC_SLACK = 2


@dataclass(frozen=True)
class StableSetStats:
    """A triple together with the size of its stable set."""

    triple: tuple[int, int, int]
    size: int


@dataclass(frozen=True)
class GreedyStep:
    """One greedy selection: the chosen triple, its stable-set size over the
    surviving players, the per-gender (or per-triple) count k remaining at
    selection time, and the guaranteed floor for that step."""

    triple: tuple[int, int, int]
    stable_set_size: int
    remaining: int
    floor: int


@dataclass(frozen=True)
class GreedyResult:
    solution: object
    report: StabilityReport
    steps: tuple[GreedyStep, ...]


def gsm_step_floor(k: int) -> int:
    """Guaranteed stable-set size with k players per gender remaining."""
    return -((-(4 * k * k - 3 * k - 3)) // 3)  # ceil((4k^2 - 3k - 3) / 3)


def psa_step_floor(k: int) -> int:
    """Guaranteed stable-set size with 3k players remaining."""
    pairs = comb(3 * k - 1, 2)
    return 2 * (pairs - pairs // 3) - 3 * k + 2


def amsm_instability_bound(n: int) -> Fraction:
    """Closed-form cumulative bound on ins() of the marriage greedy."""
    return (Fraction(5 * n * (n + 1) * (2 * n + 1), 18)
            + Fraction(n * (n + 3), 2))


def asa_instability_bound(n: int) -> int:
    """Cumulative per-step bound on ins() of the matching greedy."""
    total = 0
    for k in range(1, n + 1):
        pairs = comb(3 * k - 1, 2)
        intersecting = 3 * pairs - 3 * (3 * k - 2) + 1
        total += intersecting - psa_step_floor(k)
    return total


def _stable_set_size_gsm(instance: GsmInstance, women, men, dogs,
                         pos_a, pos_b, pos_d,
                         i: int, j: int, k: int) -> int:
    """|S_ijk| over the surviving universe, by inclusion-exclusion.

    Counts triples sharing a member with (i, j, k) that the shared member
    weakly disprefers; the pairwise overlaps are O(k) scans and the triple
    itself is the only member of all three parts.
    """
    n = instance.n
    ra = instance.ranks[WOMEN][i]
    rb = instance.ranks[MEN][j]
    rd = instance.ranks[DOGS][k]
    lim_a = ra[pair_index(n, j, k)]
    lim_b = rb[pair_index(n, i, k)]
    lim_d = rd[pair_index(n, i, j)]
    sq = len(men) * len(dogs)  # == len(women) * len(dogs) etc. (equal sizes)
    c_a = sq - pos_a[i][pair_index(n, j, k)]
    c_b = sq - pos_b[j][pair_index(n, i, k)]
    c_d = sq - pos_d[k][pair_index(n, i, j)]
    o_ab = sum(1 for d in dogs
               if ra[pair_index(n, j, d)] >= lim_a
               and rb[pair_index(n, i, d)] >= lim_b)
    o_ad = sum(1 for b in men
               if ra[pair_index(n, b, k)] >= lim_a
               and rd[pair_index(n, i, b)] >= lim_d)
    o_bd = sum(1 for a in women
               if rb[pair_index(n, a, k)] >= lim_b
               and rd[pair_index(n, a, j)] >= lim_d)
    return c_a + c_b + c_d - o_ab - o_ad - o_bd + 1


def _position_tables(instance, women, men, dogs):
    """Per surviving player: pair index -> position in the rank order of the
    surviving pairs.  Lets restricted "weakly worse" counts be O(1)."""
    n = instance.n

    def table(gender, players, firsts, seconds):
        out = {}
        for p in players:
            ranks = instance.ranks[gender][p]
            pairs = sorted((pair_index(n, f, s) for f in firsts for s in seconds),
                           key=ranks.__getitem__)
            out[p] = {pr: pos for pos, pr in enumerate(pairs)}
        return out

    return (table(WOMEN, women, men, dogs),
            table(MEN, men, women, dogs),
            table(DOGS, dogs, women, men))


def stable_set_size(instance: GsmInstance,
                    triple: tuple[int, int, int]) -> StableSetStats:
    """Stable-set size of a triple over the full n^3 universe."""
    n = instance.n
    for v in triple:
        if not 0 <= v < n:
            raise IndexOutOfRange(f"index {v} out of range [0, {n})")
    players = list(range(n))
    pos_a, pos_b, pos_d = _position_tables(instance, players, players, players)
    size = _stable_set_size_gsm(instance, players, players, players,
                                pos_a, pos_b, pos_d, *triple)
    return StableSetStats(triple=tuple(triple), size=size)


def amsm_detailed(instance: GsmInstance) -> GreedyResult:
    """Greedy maximally-stable-marriage approximation with a step trace.

    Ties in the stable-set maximization break to the lexicographically
    smallest (woman, man, dog), so runs are deterministic.
    """
    n = instance.n
    women = list(range(n))
    men = list(range(n))
    dogs = list(range(n))
    sigma = [0] * n
    tau = [0] * n
    steps = []
    while women:
        k = len(women)
        pos_a, pos_b, pos_d = _position_tables(instance, women, men, dogs)
        best = None
        best_size = -1
        for i in women:
            for j in men:
                for d in dogs:
                    size = _stable_set_size_gsm(instance, women, men, dogs,
                                                pos_a, pos_b, pos_d, i, j, d)
                    if size > best_size:
                        best_size = size
                        best = (i, j, d)
        floor = gsm_step_floor(k)
        if best_size < floor:
            raise AssertionError(
                f"greedy step violated its floor: |S|={best_size} < {floor}")
        steps.append(GreedyStep(triple=best, stable_set_size=best_size,
                                remaining=k, floor=floor))
        i, j, d = best
        sigma[i] = j
        tau[i] = d
        women.remove(i)
        men.remove(j)
        dogs.remove(d)
    marriage = marriage_from_permutations(sigma, tau)
    report = stability_report_gsm(instance, marriage)
    return GreedyResult(solution=marriage, report=report, steps=tuple(steps))


def amsm(instance: GsmInstance) -> tuple[Marriage, StabilityReport]:
    """Greedy 4/9-factor approximation for maximally stable marriage."""
    result = amsm_detailed(instance)
    return result.solution, result.report


# ---------------------------------------------------------------------------
# Three-person variant


def _psa_positions(instance: PsaInstance, survivors):
    """Per survivor: sorted-pair -> position among surviving pairs by rank."""
    out = {}
    surv = sorted(survivors)
    for u in surv:
        table = psa_pair_table(instance.num_players, u)
        pairs = [(v, w) for v, w in combinations(surv, 2) if u not in (v, w)]
        pairs.sort(key=lambda pr: instance.ranks[u][table[pr]])
        out[u] = {pr: pos for pos, pr in enumerate(pairs)}
    return out


def psa_stable_set_size(instance: PsaInstance, survivors,
                        triple: tuple[int, int, int],
                        positions=None) -> int:
    """Stable-set size of a player triple over the surviving universe."""
    surv = sorted(survivors)
    if positions is None:
        positions = _psa_positions(instance, surv)
    a, b, c = sorted(triple)
    restricted_pairs = comb(len(surv) - 1, 2)
    lim = {}
    total = 0
    others = {a: (b, c), b: (a, c), c: (a, b)}
    for u, pr in others.items():
        lim[u] = instance.rank_of(u, pr)
        total += restricted_pairs - positions[u][pr]
    for u, v in combinations((a, b, c), 2):
        for w in surv:
            if w in (u, v):
                continue
            if (instance.rank_of(u, tuple(sorted((v, w)))) >= lim[u]
                    and instance.rank_of(v, tuple(sorted((u, w)))) >= lim[v]):
                total -= 1
    return total + 1


def asa_detailed(instance: PsaInstance) -> GreedyResult:
    """Greedy maximally-stable-matching approximation with a step trace."""
    survivors = list(range(instance.num_players))
    chosen = []
    steps = []
    while survivors:
        k = len(survivors) // 3
        positions = _psa_positions(instance, survivors)
        best = None
        best_size = -1
        for triple in combinations(survivors, 3):
            size = psa_stable_set_size(instance, survivors, triple, positions)
            if size > best_size:
                best_size = size
                best = triple
        floor = psa_step_floor(k)
        if best_size < floor:
            raise AssertionError(
                f"greedy step violated its floor: |S|={best_size} < {floor}")
        steps.append(GreedyStep(triple=best, stable_set_size=best_size,
                                remaining=k, floor=floor))
        chosen.append(best)
        for v in best:
            survivors.remove(v)
    matching = build_matching(instance.num_players, chosen)
    report = stability_report_psa(instance, matching)
    return GreedyResult(solution=matching, report=report, steps=tuple(steps))


def asa(instance: PsaInstance) -> tuple[Matching, StabilityReport]:
    """Greedy 4/9-factor approximation for maximally stable matching."""
    result = asa_detailed(instance)
    return result.solution, result.report


# ---------------------------------------------------------------------------
# Restriction (used by consistency oracles)


def restrict_gsm(instance: GsmInstance, keep_women, keep_men,
                 keep_dogs) -> GsmInstance:
    """The induced sub-instance on the kept players, ranks renumbered but
    relative order preserved."""
    kw, km, kd = sorted(keep_women), sorted(keep_men), sorted(keep_dogs)
    if not len(kw) == len(km) == len(kd):
        raise IndexOutOfRange("kept sets must have equal sizes")
    n = instance.n
    k = len(kw)

    def rows(gender, players, firsts, seconds):
        fpos = {v: i for i, v in enumerate(firsts)}
        spos = {v: i for i, v in enumerate(seconds)}
        out = []
        for p in players:
            surviving = [pr for pr in instance.prefs[gender][p]
                         if pair_members(n, pr)[0] in fpos
                         and pair_members(n, pr)[1] in spos]
            out.append([pair_index(k, fpos[pair_members(n, pr)[0]],
                                   spos[pair_members(n, pr)[1]])
                        for pr in surviving])
        return out

    return build_gsm_instance(
        k,
        rows(WOMEN, kw, km, kd),
        rows(MEN, km, kw, kd),
        rows(DOGS, kd, kw, km))
