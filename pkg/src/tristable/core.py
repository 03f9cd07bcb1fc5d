"""Domain types, validation, and instance/solution file formats.

Three problem kinds are represented:

* 3GSM -- three-gender stable marriage: n women, men, and dogs, each player
  ranking all n^2 pairs of the two opposite genders.
* 3PSA -- three-person stable assignment: 3n players, each ranking all
  C(3n-1, 2) unordered pairs of other players.
* 3DM  -- three-dimensional matching over tripartite ground sets W, X, Y.

Rank conventions: rank 0 is the most preferred pair.  Being unmatched is
never stored explicitly; every ranked pair beats it.  All instances are
immutable after construction and safe to share across threads.

Pair indexing is flat: a woman's pair (man b, dog d) has index b*n + d,
and symmetrically for the other genders.  A 3PSA player's pairs are the
unordered pairs of other players in lexicographic order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatch,
    DuplicateRank,
    FormatError,
    IndexOutOfRange,
    NotAPermutation,
    PlayerCountNotMultipleOf3,
    ValidationError,
)

WOMEN, MEN, DOGS = 0, 1, 2
GENDERS = (WOMEN, MEN, DOGS)
GENDER_NAMES = ("women", "men", "dogs")


def pair_index(n: int, first: int, second: int) -> int:
    """Flat index of an opposite-gender pair (row-major)."""
    return first * n + second


def pair_members(n: int, pair: int) -> tuple[int, int]:
    """Inverse of :func:`pair_index`."""
    return divmod(pair, n)


def _check_rank_row(row: Sequence[int], universe: int, what: str) -> tuple[int, ...]:
    row = tuple(int(v) for v in row)
    if len(row) != universe:
        raise DimensionMismatch(
            f"{what}: expected {universe} entries, got {len(row)}")
    seen = [False] * universe
    for v in row:
        if not 0 <= v < universe:
            raise DimensionMismatch(f"{what}: entry {v} out of range [0, {universe})")
        if seen[v]:
            raise DuplicateRank(f"{what}: pair {v} listed twice")
        seen[v] = True
    return row


def _inverse_row(row: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(row)
    for rank, v in enumerate(row):
        inv[v] = rank
    return tuple(inv)


@dataclass(frozen=True)
class GsmInstance:
    """A three-gender stable marriage instance.

    ``prefs[g][p]`` lists player p's pair indices from most to least
    preferred; ``ranks[g][p][pair]`` is the inverse lookup.
    """

    n: int
    prefs: tuple[tuple[tuple[int, ...], ...], ...]
    ranks: tuple[tuple[tuple[int, ...], ...], ...]

    def rank_of(self, gender: int, player: int, pair: int | tuple[int, int]) -> int:
        if isinstance(pair, tuple):
            pair = pair_index(self.n, *pair)
        return self.ranks[gender][player][pair]


def build_gsm_instance(n: int,
                       women_rows: Sequence[Sequence[int]],
                       men_rows: Sequence[Sequence[int]],
                       dogs_rows: Sequence[Sequence[int]]) -> GsmInstance:
    """Validate three n x n^2 preference tables and build an instance.

    Each row must list every pair index exactly once (a strict total order).
    """
    if n < 1:
        raise DimensionMismatch(f"n must be positive, got {n}")
    tables = (women_rows, men_rows, dogs_rows)
    universe = n * n
    prefs = []
    for g, table in enumerate(tables):
        if len(table) != n:
            raise DimensionMismatch(
                f"{GENDER_NAMES[g]}: expected {n} rows, got {len(table)}")
        prefs.append(tuple(
            _check_rank_row(row, universe, f"{GENDER_NAMES[g]}[{p}]")
            for p, row in enumerate(table)))
    ranks = tuple(tuple(_inverse_row(row) for row in table) for table in prefs)
    return GsmInstance(n=n, prefs=tuple(prefs), ranks=ranks)


def prefers(instance: GsmInstance, gender: int, player: int,
            pair_x: int | tuple[int, int], pair_y: int | tuple[int, int]) -> bool:
    """True iff the player ranks pair_x strictly better than pair_y."""
    n = instance.n
    if gender not in GENDERS:
        raise IndexOutOfRange(f"unknown gender {gender}")
    if not 0 <= player < n:
        raise IndexOutOfRange(f"player {player} out of range [0, {n})")

    def norm(pair):
        if isinstance(pair, tuple):
            a, b = pair
            if not (0 <= a < n and 0 <= b < n):
                raise IndexOutOfRange(f"pair {pair} out of range")
            return pair_index(n, a, b)
        if not 0 <= pair < n * n:
            raise IndexOutOfRange(f"pair index {pair} out of range")
        return pair

    px, py = norm(pair_x), norm(pair_y)
    return instance.ranks[gender][player][px] < instance.ranks[gender][player][py]


@dataclass(frozen=True)
class Marriage:
    """A perfect marriage: family i is (woman i, man sigma[i], dog tau[i])."""

    sigma: tuple[int, ...]
    tau: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def families(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((i, self.sigma[i], self.tau[i]) for i in range(self.n))

    def as_submarriage(self) -> "Submarriage":
        return build_submarriage(self.n, self.families)


def _check_permutation(seq: Sequence[int], n: int, what: str) -> tuple[int, ...]:
    seq = tuple(int(v) for v in seq)
    if len(seq) != n or sorted(seq) != list(range(n)):
        raise NotAPermutation(f"{what} is not a permutation of [0, {n})")
    return seq


def marriage_from_permutations(sigma: Sequence[int], tau: Sequence[int]) -> Marriage:
    """Build a marriage from two bijections on [n]."""
    n = len(sigma)
    if len(tau) != n:
        raise NotAPermutation("sigma and tau have different lengths")
    return Marriage(sigma=_check_permutation(sigma, n, "sigma"),
                    tau=_check_permutation(tau, n, "tau"))


@dataclass(frozen=True)
class Submarriage:
    """A set of pairwise-disjoint families over an n-per-gender instance."""

    n: int
    families: tuple[tuple[int, int, int], ...]

    def covered(self, gender: int) -> tuple[int, ...]:
        return tuple(sorted(f[gender] for f in self.families))

    def partner(self, gender: int, player: int) -> tuple[int, int] | None:
        """The pair married to the player, or None if unmatched."""
        for f in self.families:
            if f[gender] == player:
                return tuple(f[g] for g in GENDERS if g != gender)
        return None


def build_submarriage(n: int, families: Iterable[Sequence[int]]) -> Submarriage:
    fams = tuple(tuple(int(v) for v in f) for f in families)
    if len(fams) > n:
        raise ValidationError(f"{len(fams)} families exceed n={n}")
    for f in fams:
        if len(f) != 3:
            raise ValidationError(f"family {f} is not a triple")
        for g, v in enumerate(f):
            if not 0 <= v < n:
                raise IndexOutOfRange(f"family {f}: {GENDER_NAMES[g]} index {v} "
                                      f"out of range [0, {n})")
    for g in GENDERS:
        members = [f[g] for f in fams]
        if len(set(members)) != len(members):
            raise ValidationError(f"a {GENDER_NAMES[g][:-1]} appears in two families")
    return Submarriage(n=n, families=tuple(sorted(fams)))


# ---------------------------------------------------------------------------
# 3PSA


@lru_cache(maxsize=None)
def psa_pairs(num_players: int, player: int) -> tuple[tuple[int, int], ...]:
    """All unordered pairs of players other than ``player``, lexicographic."""
    others = [u for u in range(num_players) if u != player]
    return tuple(combinations(others, 2))


@lru_cache(maxsize=None)
def psa_pair_table(num_players: int, player: int) -> dict[tuple[int, int], int]:
    """Pair -> dense index, inverse of :func:`psa_pairs`."""
    return {p: i for i, p in enumerate(psa_pairs(num_players, player))}


@dataclass(frozen=True)
class PsaInstance:
    """A three-person stable assignment instance with 3n players.

    ``prefs[u]`` lists dense pair indices (into ``psa_pairs``) from most to
    least preferred; ``ranks[u]`` is the inverse.
    """

    num_players: int
    prefs: tuple[tuple[int, ...], ...]
    ranks: tuple[tuple[int, ...], ...]

    def rank_of(self, player: int, pair: tuple[int, int]) -> int:
        v, w = sorted(pair)
        return self.ranks[player][psa_pair_table(self.num_players, player)[(v, w)]]


def build_psa_instance(num_players: int,
                       rows: Sequence[Sequence[int]]) -> PsaInstance:
    """Validate per-player preference rows over all pairs of other players."""
    if num_players < 3 or num_players % 3 != 0:
        raise PlayerCountNotMultipleOf3(
            f"player count must be a positive multiple of 3, got {num_players}")
    if len(rows) != num_players:
        raise DimensionMismatch(
            f"expected {num_players} rows, got {len(rows)}")
    universe = comb(num_players - 1, 2)
    prefs = tuple(_check_rank_row(row, universe, f"player[{u}]")
                  for u, row in enumerate(rows))
    ranks = tuple(_inverse_row(row) for row in prefs)
    return PsaInstance(num_players=num_players, prefs=prefs, ranks=ranks)


def _check_triples(num_players: int,
                   triples: Iterable[Sequence[int]]) -> tuple[tuple[int, int, int], ...]:
    trs = tuple(tuple(sorted(int(v) for v in t)) for t in triples)
    seen: set[int] = set()
    for t in trs:
        if len(t) != 3 or len(set(t)) != 3:
            raise ValidationError(f"{t} is not a triple of distinct players")
        for v in t:
            if not 0 <= v < num_players:
                raise IndexOutOfRange(f"player {v} out of range [0, {num_players})")
            if v in seen:
                raise ValidationError(f"player {v} appears in two triples")
            seen.add(v)
    return tuple(sorted(trs))


@dataclass(frozen=True)
class Submatching:
    """A set of pairwise-disjoint triples of players."""

    num_players: int
    triples: tuple[tuple[int, int, int], ...]

    def covered(self) -> tuple[int, ...]:
        return tuple(sorted(v for t in self.triples for v in t))

    def assigned_pair(self, player: int) -> tuple[int, int] | None:
        for t in self.triples:
            if player in t:
                return tuple(v for v in t if v != player)
        return None


@dataclass(frozen=True)
class Matching(Submatching):
    """A submatching covering all players."""


def build_submatching(num_players: int,
                      triples: Iterable[Sequence[int]]) -> Submatching:
    return Submatching(num_players, _check_triples(num_players, triples))


def build_matching(num_players: int, triples: Iterable[Sequence[int]]) -> Matching:
    trs = _check_triples(num_players, triples)
    if 3 * len(trs) != num_players:
        raise ValidationError(
            f"matching covers {3 * len(trs)} of {num_players} players")
    return Matching(num_players, trs)


# ---------------------------------------------------------------------------
# 3DM


@dataclass(frozen=True)
class DmInstance:
    """A three-dimensional matching instance over parts of size m.

    Edges are (w, x, y) index triples.  When ``degree_bounded_3`` is set,
    every element lies in at most three edges (counting multiplicity).
    """

    m: int
    edges: tuple[tuple[int, int, int], ...]
    degree_bounded_3: bool = False

    def degrees(self) -> tuple[list[int], list[int], list[int]]:
        degs = tuple([0] * self.m for _ in range(3))
        for e in self.edges:
            for part, v in enumerate(e):
                degs[part][v] += 1
        return degs


def build_dm_instance(m: int, edges: Iterable[Sequence[int]],
                      degree_bounded_3: bool = False) -> DmInstance:
    if m < 1:
        raise ValidationError(f"ground-set size must be positive, got {m}")
    edge_list = tuple(tuple(int(v) for v in e) for e in edges)
    for e in edge_list:
        if len(e) != 3:
            raise ValidationError(f"edge {e} is not a triple")
        for v in e:
            if not 0 <= v < m:
                raise IndexOutOfRange(f"edge {e}: index {v} out of range [0, {m})")
    inst = DmInstance(m=m, edges=edge_list, degree_bounded_3=degree_bounded_3)
    if degree_bounded_3:
        for part, degs in enumerate(inst.degrees()):
            worst = max(degs, default=0)
            if worst > 3:
                raise ValidationError(
                    f"part {part} has an element in {worst} > 3 edges")
    return inst


def dm_check_matching(dm: DmInstance,
                      edges: Iterable[Sequence[int]]) -> tuple[tuple[int, int, int], ...]:
    """Validate that the given edges form a matching in the instance."""
    chosen = tuple(tuple(int(v) for v in e) for e in edges)
    available = set(dm.edges)
    used: tuple[set[int], ...] = (set(), set(), set())
    for e in chosen:
        if e not in available:
            raise ValidationError(f"edge {e} is not in the instance")
        for part, v in enumerate(e):
            if v in used[part]:
                raise ValidationError(f"element {v} of part {part} covered twice")
            used[part].add(v)
    return tuple(sorted(chosen))


def dm_uncovered_count(dm: DmInstance, matching: Sequence[Sequence[int]]) -> int:
    """Number of ground-set elements not covered by the matching."""
    return 3 * dm.m - 3 * len(matching)


# ---------------------------------------------------------------------------
# Stability reports


@dataclass(frozen=True)
class StabilityReport:
    """Counts of stable and unstable triples over a solution's triple universe."""

    stab: int
    ins: int
    unstable: tuple | None = None

    @property
    def universe(self) -> int:
        return self.stab + self.ins


# ---------------------------------------------------------------------------
# File formats
#
# Text format (line-oriented):
#   3GSM n      then 3n rows of n^2 pair indices in preference order
#   3PSA p      then p rows of C(p-1, 2) pair indices in preference order
#   3DM m       then one line per edge: "w x y" (1-based)
#   3SATB n m B then m clause lines of signed 1-based literals
# A file ending in .json carries the same content as a JSON document.


def _instance_document(obj) -> dict:
    from . import reductions

    if isinstance(obj, GsmInstance):
        rows = [list(row) for table in obj.prefs for row in table]
        return {"kind": "3GSM", "n": obj.n, "rows": rows}
    if isinstance(obj, PsaInstance):
        return {"kind": "3PSA", "players": obj.num_players,
                "rows": [list(row) for row in obj.prefs]}
    if isinstance(obj, DmInstance):
        return {"kind": "3DM", "m": obj.m,
                "degree_bounded_3": obj.degree_bounded_3,
                "edges": [list(e) for e in obj.edges]}
    if isinstance(obj, reductions.SatBFormula):
        return {"kind": "3SATB", "num_vars": obj.num_vars, "bound": obj.bound,
                "clauses": [list(c) for c in obj.clauses]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _instance_from_document(doc: dict):
    from . import reductions

    kind = doc.get("kind")
    if kind == "3GSM":
        n = doc["n"]
        rows = doc["rows"]
        if len(rows) != 3 * n:
            raise FormatError(f"3GSM: expected {3 * n} rows, got {len(rows)}")
        return build_gsm_instance(n, rows[:n], rows[n:2 * n], rows[2 * n:])
    if kind == "3PSA":
        return build_psa_instance(doc["players"], doc["rows"])
    if kind == "3DM":
        return build_dm_instance(doc["m"], doc["edges"],
                                 degree_bounded_3=doc.get("degree_bounded_3", False))
    if kind == "3SATB":
        return reductions.build_satb_formula(doc["num_vars"], doc["clauses"],
                                             bound=doc["bound"])
    raise FormatError(f"unknown instance kind {kind!r}")


def _instance_text(obj) -> str:
    from . import reductions

    lines = []
    if isinstance(obj, GsmInstance):
        lines.append(f"3GSM {obj.n}")
        for table in obj.prefs:
            for row in table:
                lines.append(" ".join(map(str, row)))
    elif isinstance(obj, PsaInstance):
        lines.append(f"3PSA {obj.num_players}")
        for row in obj.prefs:
            lines.append(" ".join(map(str, row)))
    elif isinstance(obj, DmInstance):
        flag = " D3" if obj.degree_bounded_3 else ""
        lines.append(f"3DM {obj.m}{flag}")
        for w, x, y in obj.edges:
            lines.append(f"{w + 1} {x + 1} {y + 1}")
    elif isinstance(obj, reductions.SatBFormula):
        lines.append(f"3SATB {obj.num_vars} {len(obj.clauses)} {obj.bound}")
        for clause in obj.clauses:
            lines.append(" ".join(map(str, clause)))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return "\n".join(lines) + "\n"


def _parse_instance_text(text: str):
    from . import reductions

    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise FormatError("empty instance file")
    header = lines[0].split()
    body = lines[1:]
    try:
        if header[0] == "3GSM":
            n = int(header[1])
            if len(body) != 3 * n:
                raise FormatError(f"3GSM: expected {3 * n} rows, got {len(body)}")
            rows = [[int(v) for v in ln.split()] for ln in body]
            return build_gsm_instance(n, rows[:n], rows[n:2 * n], rows[2 * n:])
        if header[0] == "3PSA":
            p = int(header[1])
            if len(body) != p:
                raise FormatError(f"3PSA: expected {p} rows, got {len(body)}")
            return build_psa_instance(p, [[int(v) for v in ln.split()] for ln in body])
        if header[0] == "3DM":
            m = int(header[1])
            flag = "D3" in header[2:]
            edges = [[int(v) - 1 for v in ln.split()] for ln in body]
            return build_dm_instance(m, edges, degree_bounded_3=flag)
        if header[0] == "3SATB":
            num_vars, num_clauses, bound = map(int, header[1:4])
            if len(body) != num_clauses:
                raise FormatError(
                    f"3SATB: expected {num_clauses} clauses, got {len(body)}")
            clauses = [[int(v) for v in ln.split()] for ln in body]
            return reductions.build_satb_formula(num_vars, clauses, bound=bound)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed instance file: {exc}") from exc
    raise FormatError(f"unknown instance header {lines[0]!r}")


def write_instance(path, obj) -> None:
    """Write an instance (text, or JSON for .json paths)."""
    path = str(path)
    with open(path, "w") as fh:
        if path.endswith(".json"):
            json.dump(_instance_document(obj), fh, indent=1)
            fh.write("\n")
        else:
            fh.write(_instance_text(obj))


def read_instance(path):
    """Read any instance kind, dispatching on the header or JSON document."""
    path = str(path)
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        try:
            return _instance_from_document(json.loads(text))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise FormatError(f"malformed JSON instance: {exc}") from exc
    return _parse_instance_text(text)


def _solution_text(obj) -> str:
    lines = []
    if isinstance(obj, Marriage):
        lines.append(f"MARRIAGE {obj.n}")
        for a, b, d in obj.families:
            lines.append(f"{a + 1} {b + 1} {d + 1}")
    elif isinstance(obj, Submarriage):
        lines.append(f"SUBMARRIAGE {obj.n}")
        for a, b, d in obj.families:
            lines.append(f"{a + 1} {b + 1} {d + 1}")
    elif isinstance(obj, Matching):
        lines.append(f"MATCHING {obj.num_players}")
        for t in obj.triples:
            lines.append(" ".join(str(v + 1) for v in t))
    elif isinstance(obj, Submatching):
        lines.append(f"SUBMATCHING {obj.num_players}")
        for t in obj.triples:
            lines.append(" ".join(str(v + 1) for v in t))
    elif isinstance(obj, tuple) or isinstance(obj, list):
        lines.append("DMMATCHING")
        for w, x, y in obj:
            lines.append(f"{w + 1} {x + 1} {y + 1}")
    else:
        raise TypeError(f"cannot serialize solution {type(obj).__name__}")
    return "\n".join(lines) + "\n"


def write_solution(path, obj) -> None:
    with open(str(path), "w") as fh:
        fh.write(_solution_text(obj))


def read_solution(path):
    """Read a solution file; the header determines the returned type."""
    with open(str(path)) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise FormatError("empty solution file")
    header = lines[0].split()
    try:
        rows = [[int(v) - 1 for v in ln.split()] for ln in lines[1:]]
        if header[0] == "MARRIAGE":
            n = int(header[1])
            by_woman = {a: (b, d) for a, b, d in rows}
            if sorted(by_woman) != list(range(n)):
                raise FormatError("marriage must contain one family per woman")
            return marriage_from_permutations(
                [by_woman[a][0] for a in range(n)],
                [by_woman[a][1] for a in range(n)])
        if header[0] == "SUBMARRIAGE":
            return build_submarriage(int(header[1]), rows)
        if header[0] == "MATCHING":
            return build_matching(int(header[1]), rows)
        if header[0] == "SUBMATCHING":
            return build_submatching(int(header[1]), rows)
        if header[0] == "DMMATCHING":
            return tuple(tuple(r) for r in rows)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed solution file: {exc}") from exc
    raise FormatError(f"unknown solution header {lines[0]!r}")
