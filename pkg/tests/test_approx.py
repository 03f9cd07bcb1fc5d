from fractions import Fraction
from itertools import combinations, product
from math import comb

import pytest

from tristable.approx import (
    ASA_QUADRATIC_SLACK,
    amsm,
    amsm_detailed,
    amsm_instability_bound,
    asa,
    asa_detailed,
    asa_instability_bound,
    gsm_step_floor,
    psa_stable_set_size,
    psa_step_floor,
    restrict_gsm,
    stable_set_size,
)
from tristable.core import prefers
from tristable.errors import IndexOutOfRange
from tristable.generators import (
    gen_adversarial,
    gen_gadget2,
    gen_random,
    gen_random_psa,
)


def naive_stable_set_size(inst, triple):
    """Count triples sharing a member that weakly disprefers them."""
    n = inst.n
    i, j, k = triple
    lim_a = inst.ranks[0][i][j * n + k]
    lim_b = inst.ranks[1][j][i * n + k]
    lim_d = inst.ranks[2][k][i * n + j]
    count = 0
    for a, b, d in product(range(n), repeat=3):
        hits = ((a == i and inst.ranks[0][i][b * n + d] >= lim_a)
                or (b == j and inst.ranks[1][j][a * n + d] >= lim_b)
                or (d == k and inst.ranks[2][k][a * n + b] >= lim_d))
        if hits:
            count += 1
    return count


def test_gadget_stable_set_sizes():
    g = gen_gadget2()
    expected = {(0, 0, 0): 6, (0, 0, 1): 5, (0, 1, 0): 3, (0, 1, 1): 6,
                (1, 0, 0): 3, (1, 0, 1): 2, (1, 1, 0): 6, (1, 1, 1): 1}
    for triple, size in expected.items():
        assert stable_set_size(g, triple).size == size
        assert naive_stable_set_size(g, triple) == size


def test_stable_set_size_matches_naive_random():
    for seed in range(3):
        inst = gen_random(3, seed)
        for triple in product(range(3), repeat=3):
            assert (stable_set_size(inst, triple).size
                    == naive_stable_set_size(inst, triple))
    with pytest.raises(IndexOutOfRange):
        stable_set_size(gen_gadget2(), (0, 0, 2))


def test_step_floors():
    # ceil((4k^2 - 3k - 3) / 3) spot values
    assert [gsm_step_floor(k) for k in (1, 2, 3, 4)] == [0, 3, 8, 17]
    for k in (1, 2, 3, 4, 5):
        pairs = comb(3 * k - 1, 2)
        assert psa_step_floor(k) == 2 * (pairs - pairs // 3) - 3 * k + 2
    assert psa_step_floor(1) == 1


def test_amsm_gadget_trace():
    res = amsm_detailed(gen_gadget2())
    assert [s.triple for s in res.steps] == [(0, 0, 0), (1, 1, 1)]
    assert [s.stable_set_size for s in res.steps] == [6, 1]
    assert (res.report.stab, res.report.ins) == (7, 1)
    marriage, report = amsm(gen_gadget2())
    assert marriage == res.solution and report == res.report


def test_amsm_goldens():
    cases = {
        (4, None): (63, 1),   # adversarial n=4
        (6, None): (209, 7),  # adversarial n=6
        (5, 3): (124, 1),     # random n=5 seed=3
    }
    for (n, seed), (stab, ins) in cases.items():
        inst = gen_random(n, seed) if seed is not None else gen_adversarial(n)
        _, report = amsm(inst)
        assert (report.stab, report.ins) == (stab, ins)


def test_amsm_floors_and_bound_random():
    for seed in range(4):
        for n in (3, 5, 7):
            inst = gen_random(n, seed)
            res = amsm_detailed(inst)
            for step in res.steps:
                assert step.stable_set_size >= step.floor
                assert step.floor == gsm_step_floor(step.remaining)
            assert res.report.ins <= amsm_instability_bound(n)
            assert res.report.stab + res.report.ins == n ** 3


def test_amsm_bound_closed_form():
    assert amsm_instability_bound(2) == Fraction(5 * 2 * 3 * 5, 18) + 5
    for n in (1, 2, 3, 10):
        assert (amsm_instability_bound(n)
                == Fraction(5 * n * (n + 1) * (2 * n + 1), 18)
                + Fraction(n * (n + 3), 2))


def naive_psa_stable_set(inst, survivors, triple):
    surv = sorted(survivors)
    a, b, c = sorted(triple)
    lim = {a: inst.rank_of(a, (b, c)), b: inst.rank_of(b, (a, c)),
           c: inst.rank_of(c, (a, b))}
    count = 0
    for t in combinations(surv, 3):
        shared = set(t) & {a, b, c}
        if any(inst.rank_of(u, tuple(v for v in t if v != u)) >= lim[u]
               for u in shared):
            count += 1
    return count


def test_psa_stable_set_matches_naive():
    inst = gen_random_psa(9, 5)
    surv = list(range(9))
    for triple in [(0, 1, 2), (3, 7, 8), (2, 4, 6)]:
        assert (psa_stable_set_size(inst, surv, triple)
                == naive_psa_stable_set(inst, surv, triple))
    # restricted survivor set
    surv = [0, 2, 3, 5, 6, 8]
    for triple in [(0, 2, 3), (5, 6, 8)]:
        assert (psa_stable_set_size(inst, surv, triple)
                == naive_psa_stable_set(inst, surv, triple))


def test_asa_golden_and_floors():
    res = asa_detailed(gen_random_psa(9, 2))
    assert [s.triple for s in res.steps] == [(0, 3, 8), (2, 4, 7), (1, 5, 6)]
    assert (res.report.stab, res.report.ins) == (84, 0)
    for seed in range(4):
        for players in (3, 6, 9, 12):
            n = players // 3
            inst = gen_random_psa(players, seed)
            res = asa_detailed(inst)
            for step in res.steps:
                assert step.stable_set_size >= step.floor
            assert res.report.ins <= asa_instability_bound(n)
            assert (res.report.stab
                    >= 2 * n ** 3 - ASA_QUADRATIC_SLACK * n ** 2)
            matching, report = asa(inst)
            assert report == res.report


def test_asa_bound_dominated_by_quadratic_slack():
    for n in range(1, 30):
        universe = comb(3 * n, 3)
        assert (universe - asa_instability_bound(n)
                >= 2 * n ** 3 - ASA_QUADRATIC_SLACK * n ** 2)


def test_restrict_gsm_preserves_order():
    inst = gen_random(4, 1)
    sub = restrict_gsm(inst, [0, 2, 3], [1, 2, 3], [0, 1, 3])
    assert sub.n == 3
    keep_w, keep_m, keep_d = [0, 2, 3], [1, 2, 3], [0, 1, 3]
    for wi, w in enumerate(keep_w):
        for (b1, d1) in product(range(3), repeat=2):
            for (b2, d2) in product(range(3), repeat=2):
                if (b1, d1) == (b2, d2):
                    continue
                assert prefers(sub, 0, wi, (b1, d1), (b2, d2)) == prefers(
                    inst, 0, w, (keep_m[b1], keep_d[d1]),
                    (keep_m[b2], keep_d[d2]))
    with pytest.raises(IndexOutOfRange):
        restrict_gsm(inst, [0], [0, 1], [0])
