"""Blocking-triple detection and stability reports.

A triple blocks a (sub)solution when each of its three members strictly
prefers the triple to their assigned family or triple.  For proper
submarriages and submatchings the triple universe is restricted to the
covered players; unmatched players never block.
"""

from __future__ import annotations

from itertools import combinations

from .core import (
    DOGS,
    GsmInstance,
    Marriage,
    MEN,
    PsaInstance,
    StabilityReport,
    Submarriage,
    Submatching,
    WOMEN,
    pair_index,
)
from .errors import UncoveredPlayer


def _as_submarriage(solution) -> Submarriage:
    if isinstance(solution, Marriage):
        return solution.as_submarriage()
    return solution


def _partner_pairs(sub: Submarriage) -> tuple[dict, dict, dict]:
    """Per gender: covered player -> pair index of the assigned partners."""
    n = sub.n
    by_a: dict[int, int] = {}
    by_b: dict[int, int] = {}
    by_d: dict[int, int] = {}
    for a, b, d in sub.families:
        by_a[a] = pair_index(n, b, d)
        by_b[b] = pair_index(n, a, d)
        by_d[d] = pair_index(n, a, b)
    return by_a, by_b, by_d


def is_unstable_triple_gsm(instance: GsmInstance, solution,
                          triple: tuple[int, int, int]) -> bool:
    """Does (a, b, d) block the given marriage or submarriage?

    All three players must be covered; querying an unmatched player raises
    ``UncoveredPlayer`` since instability is only assessed among married
    players.
    """
    sub = _as_submarriage(solution)
    by_a, by_b, by_d = _partner_pairs(sub)
    a, b, d = triple
    n = instance.n
    for gender, player, table in ((WOMEN, a, by_a), (MEN, b, by_b), (DOGS, d, by_d)):
        if player not in table:
            raise UncoveredPlayer(
                f"{player} ({gender}) has no family in the submarriage")
    ra = instance.ranks[WOMEN][a]
    rb = instance.ranks[MEN][b]
    rd = instance.ranks[DOGS][d]
    return (ra[pair_index(n, b, d)] < ra[by_a[a]]
            and rb[pair_index(n, a, d)] < rb[by_b[b]]
            and rd[pair_index(n, a, b)] < rd[by_d[d]])


def stability_report_gsm(instance: GsmInstance, solution,
                         list_unstable: bool = False) -> StabilityReport:
    """Count stable/unstable triples over the covered players' universe.

    For a full marriage the universe is all n^3 triples; for a proper
    submarriage it is the product of the covered women, men, and dogs.
    """
    sub = _as_submarriage(solution)
    n = instance.n
    by_a, by_b, by_d = _partner_pairs(sub)
    women = sorted(by_a)
    men = sorted(by_b)
    dogs = sorted(by_d)
    ranks_a = instance.ranks[WOMEN]
    ranks_b = instance.ranks[MEN]
    ranks_d = instance.ranks[DOGS]
    ins = 0
    listed = [] if list_unstable else None
    for a in women:
        ra = ranks_a[a]
        lim_a = ra[by_a[a]]
        for b in men:
            rb = ranks_b[b]
            lim_b = rb[by_b[b]]
            base_ad = a * n
            for d in dogs:
                if (ra[b * n + d] < lim_a
                        and rb[base_ad + d] < lim_b
                        and ranks_d[d][a * n + b] < ranks_d[d][by_d[d]]):
                    ins += 1
                    if listed is not None:
                        listed.append((a, b, d))
    universe = len(women) * len(men) * len(dogs)
    return StabilityReport(stab=universe - ins, ins=ins,
                           unstable=tuple(listed) if listed is not None else None)


def is_unstable_triple_psa(instance: PsaInstance, solution,
                           triple: tuple[int, int, int]) -> bool:
    """Does the player triple block the given (sub)matching?"""
    sub: Submatching = solution
    assigned = {}
    for t in sub.triples:
        for v in t:
            assigned[v] = tuple(w for w in t if w != v)
    u, v, w = sorted(triple)
    for p in (u, v, w):
        if p not in assigned:
            raise UncoveredPlayer(f"player {p} has no triple in the submatching")
    return (instance.rank_of(u, (v, w)) < instance.rank_of(u, assigned[u])
            and instance.rank_of(v, (u, w)) < instance.rank_of(v, assigned[v])
            and instance.rank_of(w, (u, v)) < instance.rank_of(w, assigned[w]))


def stability_report_psa(instance: PsaInstance, solution,
                         list_unstable: bool = False) -> StabilityReport:
    """Count stable/unstable triples among the covered players.

    The universe is all C(k, 3) player triples over the k covered players;
    matched triples are always stable.
    """
    sub: Submatching = solution
    limit = {}
    for t in sub.triples:
        for p in t:
            limit[p] = instance.rank_of(p, tuple(v for v in t if v != p))
    covered = sorted(limit)
    ins = 0
    listed = [] if list_unstable else None
    for u, v, w in combinations(covered, 3):
        if (instance.rank_of(u, (v, w)) < limit[u]
                and instance.rank_of(v, (u, w)) < limit[v]
                and instance.rank_of(w, (u, v)) < limit[w]):
            ins += 1
            if listed is not None:
                listed.append((u, v, w))
    k = len(covered)
    universe = k * (k - 1) * (k - 2) // 6
    return StabilityReport(stab=universe - ins, ins=ins,
                           unstable=tuple(listed) if listed is not None else None)
