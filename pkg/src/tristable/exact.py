"""Brute-force and branch-and-bound exact solvers.

These are the ground-truth oracles for everything else: optimal marriages
and submarriages, optimal matchings and submatchings, and an exact
three-dimensional matcher.  All enumerations visit candidates in
lexicographic order, so optima tie-break deterministically.

Size limits are hard by default; pass a larger limit explicitly to go
beyond them.
"""

from __future__ import annotations

from itertools import combinations, permutations
from typing import Iterator, Sequence

import numpy as np

from .core import (
    DOGS,
    DmInstance,
    GsmInstance,
    Marriage,
    Matching,
    MEN,
    PsaInstance,
    Submarriage,
    Submatching,
    WOMEN,
    build_matching,
    build_submarriage,
    build_submatching,
    marriage_from_permutations,
)
from .errors import InstanceTooLarge, SolverTimeout
from .stability import stability_report_gsm, stability_report_psa

DEFAULT_MSM_LIMIT = 6
DEFAULT_MSS_LIMIT = 4
DEFAULT_PSA_MSM_LIMIT = 9   # players
DEFAULT_PSA_MSS_LIMIT = 6   # players


def iter_marriages(n: int) -> Iterator[Marriage]:
    """All (n!)^2 marriages, lexicographic in (sigma, tau)."""
    for sigma in permutations(range(n)):
        for tau in permutations(range(n)):
            yield Marriage(sigma=sigma, tau=tau)


def _rank_cubes(instance: GsmInstance):
    """Rank tables reshaped so all three index as [woman, man, dog]."""
    n = instance.n
    ra = np.array(instance.ranks[WOMEN], dtype=np.int32).reshape(n, n, n)
    rb = np.array(instance.ranks[MEN], dtype=np.int32).reshape(n, n, n)
    rd = np.array(instance.ranks[DOGS], dtype=np.int32).reshape(n, n, n)
    return ra, np.swapaxes(rb, 0, 1), np.transpose(rd, (1, 2, 0))


def msm_opt(instance: GsmInstance,
            n_limit: int = DEFAULT_MSM_LIMIT) -> tuple[Marriage, int]:
    """A stability-maximizing marriage and its stab value.

    Enumerates all (n!)^2 marriages (vectorized over tau); ties break to
    the lexicographically smallest (sigma, tau).
    """
    n = instance.n
    if n > n_limit:
        raise InstanceTooLarge(
            f"n={n} exceeds the marriage-enumeration limit {n_limit}")
    ra, rb, rd = _rank_cubes(instance)
    taus = np.array(list(permutations(range(n))), dtype=np.intp)
    num_tau = len(taus)
    idx = np.arange(n)
    row = np.arange(num_tau)[:, None]
    best_ins = n ** 3 + 1
    best = None
    for sigma in permutations(range(n)):
        sig = np.array(sigma, dtype=np.intp)
        ra_sig = ra[idx, sig, :]            # [i, d]
        rb_sig = rb[idx, sig, :]            # [i, d]
        rd_sig = rd[idx, sig, :]            # [i, d]
        thr_a = ra_sig[idx[None, :], taus]  # [tau, i]
        thr_b = np.empty((num_tau, n), dtype=np.int32)
        thr_b[:, sig] = rb_sig[idx[None, :], taus]
        thr_d = np.empty((num_tau, n), dtype=np.int32)
        np.put_along_axis(thr_d, taus, rd_sig[idx[None, :], taus], axis=1)
        unstable = ((ra[None, :, :, :] < thr_a[:, :, None, None])
                    & (rb[None, :, :, :] < thr_b[:, None, :, None])
                    & (rd[None, :, :, :] < thr_d[:, None, None, :]))
        ins_all = unstable.sum(axis=(1, 2, 3))
        t = int(np.argmin(ins_all))
        if ins_all[t] < best_ins:
            best_ins = int(ins_all[t])
            best = (sigma, tuple(int(v) for v in taus[t]))
    marriage = marriage_from_permutations(*best)
    return marriage, n ** 3 - best_ins


def mss_opt(instance: GsmInstance,
            n_limit: int = DEFAULT_MSS_LIMIT) -> tuple[Submarriage, int]:
    """A maximum-cardinality stable submarriage and its size.

    Enumerates submarriages by size, largest first, lexicographically;
    returns the first stable one found.
    """
    n = instance.n
    if n > n_limit:
        raise InstanceTooLarge(
            f"n={n} exceeds the submarriage-enumeration limit {n_limit}")
    for k in range(n, 0, -1):
        for women in combinations(range(n), k):
            for men_set in combinations(range(n), k):
                for men in permutations(men_set):
                    for dogs_set in combinations(range(n), k):
                        for dogs in permutations(dogs_set):
                            fams = tuple(zip(women, men, dogs))
                            sub = build_submarriage(n, fams)
                            if stability_report_gsm(instance, sub).ins == 0:
                                return sub, k
    return build_submarriage(n, ()), 0


def iter_matchings(players: Sequence[int]) -> Iterator[tuple]:
    """All partitions of the players into unordered triples, lexicographic."""
    players = tuple(players)
    if not players:
        yield ()
        return
    first = players[0]
    rest = players[1:]
    for v, w in combinations(rest, 2):
        remaining = tuple(p for p in rest if p not in (v, w))
        for tail in iter_matchings(remaining):
            yield ((first, v, w),) + tail


def _iter_submatchings(players: tuple, start: int = 0) -> Iterator[tuple]:
    """All sets of disjoint triples (players may stay uncovered)."""
    if start >= len(players):
        yield ()
        return
    # player[start] uncovered
    yield from _iter_submatchings(players, start + 1)
    first = players[start]
    rest = players[start + 1:]
    for v, w in combinations(rest, 2):
        remaining = tuple(p for p in rest if p not in (v, w))
        for tail in _iter_submatchings(remaining, 0):
            yield ((first, v, w),) + tail


def psa_opt(instance: PsaInstance, mode: str = "msm",
            limit: int | None = None):
    """Optimal matching (mode "msm") or stable submatching (mode "mss").

    Returns (Matching, stab) or (Submatching, size).
    """
    p = instance.num_players
    if mode == "msm":
        cap = DEFAULT_PSA_MSM_LIMIT if limit is None else limit
        if p > cap:
            raise InstanceTooLarge(
                f"{p} players exceed the matching-enumeration limit {cap}")
        best = None
        best_stab = -1
        for triples in iter_matchings(range(p)):
            matching = Matching(p, tuple(sorted(triples)))
            stab = stability_report_psa(instance, matching).stab
            if stab > best_stab:
                best_stab = stab
                best = matching
        return best, best_stab
    if mode == "mss":
        cap = DEFAULT_PSA_MSS_LIMIT if limit is None else limit
        if p > cap:
            raise InstanceTooLarge(
                f"{p} players exceed the submatching-enumeration limit {cap}")
        best = Submatching(p, ())
        best_size = 0
        for triples in _iter_submatchings(tuple(range(p))):
            if len(triples) <= best_size:
                continue
            sub = Submatching(p, tuple(sorted(triples)))
            if stability_report_psa(instance, sub).ins == 0:
                best = sub
                best_size = len(sub.triples)
        return best, best_size
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Exact three-dimensional matching


def max_3dm(dm: DmInstance, node_budget: int = 5_000_000
            ) -> tuple[tuple[tuple[int, int, int], ...], int]:
    """A maximum matching in a three-dimensional matching instance.

    Branch and bound: repeatedly pick an uncovered element with the fewest
    available edges, branch on covering it with each of them or leaving it
    uncovered forever, and prune on a per-part covering bound.  Raises
    ``SolverTimeout`` when the node budget is exhausted.
    """
    m = dm.m
    edges = list(dict.fromkeys(dm.edges))  # duplicates never help a matching
    num_v = 3 * m

    def vid(part: int, idx: int) -> int:
        return part * m + idx

    incident: list[list[int]] = [[] for _ in range(num_v)]
    for e_id, e in enumerate(edges):
        for part, v in enumerate(e):
            incident[vid(part, v)].append(e_id)

    covered = bytearray(num_v)
    abandoned = bytearray(num_v)  # decided to stay uncovered

    def edge_available(e_id: int) -> bool:
        e = edges[e_id]
        return all(not covered[vid(p, v)] and not abandoned[vid(p, v)]
                   for p, v in enumerate(e))

    # Greedy incumbent: scan edges in order, keep the disjoint ones.
    best: list[tuple[int, int, int]] = []
    taken = [False] * num_v
    for e in edges:
        ids = [vid(p, v) for p, v in enumerate(e)]
        if not any(taken[i] for i in ids):
            best.append(e)
            for i in ids:
                taken[i] = True
    best_size = len(best)
    best = sorted(best)

    chosen: list[int] = []
    nodes = 0

    def upper_bound() -> int:
        # Per part, elements that can still be covered by some edge.
        avail = [0, 0, 0]
        coverable = set()
        for e_id, e in enumerate(edges):
            if edge_available(e_id):
                for p, v in enumerate(e):
                    coverable.add(vid(p, v))
        for p in range(3):
            avail[p] = sum(1 for v in coverable if v // m == p)
        return len(chosen) + min(avail)

    def choose_edge(e_id: int):
        chosen.append(e_id)
        for p, v in enumerate(edges[e_id]):
            covered[vid(p, v)] = 1

    def unchoose_edge(e_id: int):
        chosen.pop()
        for p, v in enumerate(edges[e_id]):
            covered[vid(p, v)] = 0

    def search():
        nonlocal nodes, best, best_size
        nodes += 1
        if nodes > node_budget:
            raise SolverTimeout(f"node budget {node_budget} exhausted")
        if len(chosen) > best_size:
            best_size = len(chosen)
            best = sorted(edges[e] for e in chosen)
        if upper_bound() <= best_size:
            return
        # Pick the most constrained live element.
        pick = -1
        pick_edges: list[int] = []
        for v in range(num_v):
            if covered[v] or abandoned[v]:
                continue
            avail = [e for e in incident[v] if edge_available(e)]
            if not avail:
                continue
            if pick < 0 or len(avail) < len(pick_edges):
                pick = v
                pick_edges = avail
                if len(avail) == 1:
                    break
        if pick < 0:
            return
        for e_id in pick_edges:
            choose_edge(e_id)
            search()
            unchoose_edge(e_id)
        abandoned[pick] = 1
        search()
        abandoned[pick] = 0

    search()
    return tuple(best), best_size


def max_3dm_oracle(dm: DmInstance) -> int:
    """Subset enumeration; only sensible for a handful of edges."""
    edges = dm.edges
    if len(edges) > 20:
        raise InstanceTooLarge(f"{len(edges)} edges is too many to enumerate")
    best = 0
    for r in range(len(edges), 0, -1):
        if r <= best:
            break
        for subset in combinations(edges, r):
            used = (set(), set(), set())
            ok = True
            for e in subset:
                for p, v in enumerate(e):
                    if v in used[p]:
                        ok = False
                        break
                    used[p].add(v)
                if not ok:
                    break
            if ok:
                best = max(best, r)
                break
    return best
