from itertools import combinations, product

import pytest

from tristable.core import build_submarriage, build_submatching
from tristable.errors import UncoveredPlayer
from tristable.exact import iter_marriages
from tristable.generators import gen_gadget2, gen_random, gen_random_psa
from tristable.stability import (
    is_unstable_triple_gsm,
    is_unstable_triple_psa,
    stability_report_gsm,
    stability_report_psa,
)


def naive_gsm_unstable(inst, families):
    """Independent blocking-triple scan used as an oracle."""
    n = inst.n
    by_a = {a: (b, d) for a, b, d in families}
    by_b = {b: (a, d) for a, b, d in families}
    by_d = {d: (a, b) for a, b, d in families}
    out = []
    for a, b, d in product(sorted(by_a), sorted(by_b), sorted(by_d)):
        if (inst.ranks[0][a][b * n + d] < inst.ranks[0][a][by_a[a][0] * n + by_a[a][1]]
                and inst.ranks[1][b][a * n + d] < inst.ranks[1][b][by_b[b][0] * n + by_b[b][1]]
                and inst.ranks[2][d][a * n + b] < inst.ranks[2][d][by_d[d][0] * n + by_d[d][1]]):
            out.append((a, b, d))
    return out


def test_gadget_marriage_reports():
    g = gen_gadget2()
    expected = {
        ((0, 1), (0, 1)): ((1, 1, 0),),
        ((0, 1), (1, 0)): ((0, 1, 1),),
        ((1, 0), (0, 1)): ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 0)),
        ((1, 0), (1, 0)): ((0, 0, 0),),
    }
    for m in iter_marriages(2):
        r = stability_report_gsm(g, m, list_unstable=True)
        assert r.unstable == expected[(m.sigma, m.tau)]
        assert r.ins == len(r.unstable)
        assert r.stab + r.ins == 8


def test_report_matches_naive_oracle_random():
    for seed in range(5):
        inst = gen_random(3, seed)
        for m in iter_marriages(3):
            r = stability_report_gsm(inst, m, list_unstable=True)
            assert list(r.unstable) == naive_gsm_unstable(inst, m.families)
            assert r.stab + r.ins == 27


def test_submarriage_universe_is_covered_product():
    inst = gen_random(4, 0)
    sub = build_submarriage(4, [(0, 1, 2), (3, 2, 0)])
    r = stability_report_gsm(inst, sub, list_unstable=True)
    assert r.universe == 8
    assert list(r.unstable) == naive_gsm_unstable(inst, sub.families)


def test_is_unstable_triple_gsm():
    g = gen_gadget2()
    m = next(iter_marriages(2))  # sigma=(0,1), tau=(0,1)
    assert is_unstable_triple_gsm(g, m, (1, 1, 0))
    assert not is_unstable_triple_gsm(g, m, (0, 0, 0))
    sub = build_submarriage(2, [(0, 0, 0)])
    with pytest.raises(UncoveredPlayer):
        is_unstable_triple_gsm(g, sub, (0, 1, 0))


def test_removal_never_creates_blockers():
    # dropping a family cannot make a disjoint triple start blocking
    inst = gen_random(4, 3)
    fams = [(0, 1, 2), (3, 2, 0), (1, 0, 3)]
    full = build_submarriage(4, fams)
    reduced = build_submarriage(4, fams[:-1])
    removed = set(fams[-1])
    before = {t for t in stability_report_gsm(inst, full, True).unstable
              if not (t[0] == fams[-1][0] or t[1] == fams[-1][1]
                      or t[2] == fams[-1][2])}
    after = set(stability_report_gsm(inst, reduced, True).unstable)
    assert after == before


def test_extension_adds_at_most_3n2_blockers():
    for seed in range(4):
        n = 4
        inst = gen_random(n, seed)
        base = [(0, 1, 2), (3, 2, 0)]
        extra = (1, 0, 3)
        small = stability_report_gsm(inst, build_submarriage(n, base)).ins
        big = stability_report_gsm(inst, build_submarriage(n, base + [extra])).ins
        assert big - small <= 3 * n * n


def naive_psa_unstable(inst, triples):
    limit = {}
    for t in triples:
        for p in t:
            limit[p] = inst.rank_of(p, tuple(v for v in t if v != p))
    out = []
    for u, v, w in combinations(sorted(limit), 3):
        if (inst.rank_of(u, (v, w)) < limit[u]
                and inst.rank_of(v, (u, w)) < limit[v]
                and inst.rank_of(w, (u, v)) < limit[w]):
            out.append((u, v, w))
    return out


def test_psa_report_matches_naive():
    from tristable.exact import iter_matchings

    for seed in range(3):
        inst = gen_random_psa(6, seed)
        for triples in iter_matchings(range(6)):
            sub = build_submatching(6, triples)
            r = stability_report_psa(inst, sub, list_unstable=True)
            assert list(r.unstable) == naive_psa_unstable(inst, triples)
            assert r.universe == 20


def test_psa_submatching_universe_and_uncovered():
    inst = gen_random_psa(9, 1)
    sub = build_submatching(9, [(0, 4, 7), (1, 2, 8)])
    r = stability_report_psa(inst, sub)
    assert r.universe == 20  # C(6, 3)
    assert is_unstable_triple_psa(inst, sub, (0, 1, 2)) in (True, False)
    with pytest.raises(UncoveredPlayer):
        is_unstable_triple_psa(inst, sub, (0, 1, 3))


def test_matched_triples_are_stable():
    inst = gen_random_psa(6, 4)
    sub = build_submatching(6, [(0, 1, 2), (3, 4, 5)])
    listed = stability_report_psa(inst, sub, True).unstable
    assert (0, 1, 2) not in listed and (3, 4, 5) not in listed
