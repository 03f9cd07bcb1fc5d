"""Bounded-occurrence SAT to degree-bounded three-dimensional matching.

The construction maps each variable to K rings of 2d edges (d = number of
clauses touching the variable); an alternating matching on a ring encodes a
truth value.  For each occurrence and polarity, the ring tips are the
leaves of a complete binary tree whose root attaches to clause vertices via
clause edges.  The whole structure is then triplicated, with one extra edge
per root tying its three copies together, so satisfiable formulas map to
instances with perfect matchings and each unsatisfied clause costs exactly
six uncovered vertices (two clause vertices in each copy).

Tripartition scheme (the ground sets W, X, Y): tree nodes are classed
top-down -- the root gets class 0 and the children of a class-c node get
classes c+1 and c+2 (mod 3) -- which makes every tree edge tripartite and
fixes each ring's tip class; ring partners take the two remaining classes.
Clause vertices take classes 1 and 2 (roots have class 0).  Copy c rotates
all classes by c, so the cross-copy root edges are tripartite too.

Clause edges attach to the root whose polarity equals the literal's when
the tree depth log2(K) is odd, and to the opposite root when it is even;
this is exactly the parity for which the attachment root is left uncovered
by the tree matching precisely when the literal is satisfied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .core import DmInstance, build_dm_instance, dm_check_matching
from .errors import (
    EmptyClause,
    NonCanonicalMatching,
    ValidationError,
)


@dataclass(frozen=True)
class SatBFormula:
    """A CNF formula with at most 3 literals per clause and at most
    ``bound`` clauses touching any variable.

    Literals are signed 1-based variable numbers.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    bound: int

    def occurrence_counts(self) -> tuple[int, ...]:
        counts = [0] * self.num_vars
        for clause in self.clauses:
            for lit in clause:
                counts[abs(lit) - 1] += 1
        return tuple(counts)

    def occurrences(self) -> tuple[tuple[int, ...], ...]:
        """Per variable: indices of the clauses it appears in, in order."""
        occ: list[list[int]] = [[] for _ in range(self.num_vars)]
        for j, clause in enumerate(self.clauses):
            for lit in clause:
                occ[abs(lit) - 1].append(j)
        return tuple(tuple(o) for o in occ)


def build_satb_formula(num_vars: int, clauses: Iterable[Sequence[int]],
                       bound: int) -> SatBFormula:
    if num_vars < 1:
        raise ValidationError(f"need at least one variable, got {num_vars}")
    if bound < 1:
        raise ValidationError(f"occurrence bound must be positive, got {bound}")
    clean = []
    for j, clause in enumerate(clauses):
        lits = tuple(int(v) for v in clause)
        if not lits:
            raise EmptyClause(f"clause {j} is empty")
        if len(lits) > 3:
            raise ValidationError(f"clause {j} has {len(lits)} > 3 literals")
        seen_vars = set()
        for lit in lits:
            var = abs(lit)
            if lit == 0 or not 1 <= var <= num_vars:
                raise ValidationError(f"clause {j}: bad literal {lit}")
            if var in seen_vars:
                raise ValidationError(f"clause {j}: variable {var} repeated")
            seen_vars.add(var)
        clean.append(lits)
    formula = SatBFormula(num_vars=num_vars, clauses=tuple(clean), bound=bound)
    worst = max(formula.occurrence_counts(), default=0)
    if worst > bound:
        raise ValidationError(
            f"a variable occurs in {worst} clauses, exceeding the bound {bound}")
    return formula


def evaluate(formula: SatBFormula, assignment: Sequence[bool]) -> int:
    """Number of satisfied clauses."""
    return sum(
        1 for clause in formula.clauses
        if any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in clause))


def max_satisfiable(formula: SatBFormula) -> tuple[int, tuple[bool, ...]]:
    """Brute force over all assignments; first maximizer in lex order."""
    best = -1
    best_asg: tuple[bool, ...] = ()
    for bits in product((False, True), repeat=formula.num_vars):
        score = evaluate(formula, bits)
        if score > best:
            best = score
            best_asg = bits
    return best, best_asg


def enumerate_small_formulas(max_vars: int = 3, max_clauses: int = 3,
                             bound: int = 3) -> list[SatBFormula]:
    """All formulas up to the given sizes, one per equivalence class.

    Classes are taken under variable renaming and polarity flips; clauses
    are distinct within a formula and every variable must occur.
    """
    from itertools import combinations as icombs, permutations, product as iprod

    def all_clauses(nv):
        out = []
        for size in (1, 2, 3):
            if size > nv:
                continue
            for vs in icombs(range(1, nv + 1), size):
                for signs in iprod((1, -1), repeat=size):
                    out.append(tuple(s * v for s, v in zip(signs, vs)))
        return out

    def canon(nv, clauses):
        best = None
        for perm in permutations(range(1, nv + 1)):
            for flips in iprod((1, -1), repeat=nv):
                mapped = tuple(sorted(
                    tuple(sorted((1 if lit > 0 else -1) * flips[abs(lit) - 1]
                                 * perm[abs(lit) - 1] for lit in cl))
                    for cl in clauses))
                if best is None or mapped < best:
                    best = mapped
        return best

    seen = set()
    corpus = []
    for nv in range(1, max_vars + 1):
        cls = all_clauses(nv)
        for m in range(1, max_clauses + 1):
            for combo in icombs(cls, m):
                used = {abs(lit) for c in combo for lit in c}
                if used != set(range(1, nv + 1)):
                    continue
                occ = [0] * nv
                for c in combo:
                    for lit in c:
                        occ[abs(lit) - 1] += 1
                if max(occ) > bound:
                    continue
                key = (nv, canon(nv, combo))
                if key in seen:
                    continue
                seen.add(key)
                corpus.append(build_satb_formula(nv, combo, max(occ)))
    return corpus


def rings_per_variable(bound: int) -> int:
    """K = 2^floor(log2(3B/2 + 1)); always a power of two."""
    target = 3 * bound // 2 + 1  # floor is harmless: log2 crosses at powers
    k = 1
    while 2 * k <= target:
        k *= 2
    return k


# ---------------------------------------------------------------------------
# Layout


@dataclass
class ReductionLayout:
    """Labeled vertex and edge registries for a reduced instance.

    Vertex base names (within one copy):
      ("tip", i, pol, g, k)           ring tip, also tree leaf k
      ("ra"|"rb", i, k, g)            ring partners
      ("tn", i, pol, g, level, pos)   tree internal node; the root is
                                      level = depth, pos = 0
      ("s1"|"s2", j)                  clause vertices
    Full names are (copy, base_name).  Edge keys:
      ("ring", copy, i, k, g, pol), ("tree", copy, i, pol, g, level, pos),
      ("clause", copy, j, li), ("rootedge", i, pol, g).
    """

    formula: SatBFormula
    K: int
    depth: int
    occ: tuple[tuple[int, ...], ...]
    vertex_index: dict = field(default_factory=dict)
    part_names: tuple = (None, None, None)
    edge_vertices_by_key: dict = field(default_factory=dict)
    dm_edge_by_key: dict = field(default_factory=dict)
    key_by_dm_edge: dict = field(default_factory=dict)
    attach_pol_by_literal: dict = field(default_factory=dict)

    @property
    def num_vertices_per_copy(self) -> int:
        return len(self.vertex_index) // 3

    def root_base(self, i: int, pol: bool, g: int):
        return ("tn", i, pol, g, self.depth, 0) if self.depth > 0 \
            else ("tip", i, pol, g, 0)

    def all_roots(self):
        counts = self.formula.occurrence_counts()
        for i in range(self.formula.num_vars):
            for pol in (False, True):
                for g in range(counts[i]):
                    yield (i, pol, g)

    def translate_key(self, key, copy: int):
        """The corresponding edge key in another copy."""
        if key[0] == "rootedge":
            return key
        return (key[0], copy) + key[2:]


def _tree_classes(depth: int) -> dict[tuple[int, int], int]:
    classes = {(depth, 0): 0}
    for level in range(depth, 0, -1):
        for pos in range(1 << (depth - level)):
            c = classes[(level, pos)]
            classes[(level - 1, 2 * pos)] = (c + 1) % 3
            classes[(level - 1, 2 * pos + 1)] = (c + 2) % 3
    return classes


def sat_to_3dm3(formula: SatBFormula) -> tuple[DmInstance, ReductionLayout]:
    """The triplicated reduction to degree-bounded 3-dimensional matching.

    Every ring and tree vertex lies in exactly two edges, clause vertices in
    at most three, and roots in at most three (tree, clause, cross-copy).
    """
    K = rings_per_variable(formula.bound)
    depth = K.bit_length() - 1
    occ = formula.occurrences()
    counts = formula.occurrence_counts()
    layout = ReductionLayout(formula=formula, K=K, depth=depth, occ=occ)
    tree_cls = _tree_classes(depth)
    leaf_cls = [tree_cls[(0, k)] for k in range(K)]

    def base_class(name) -> int:
        kind = name[0]
        if kind == "tip":
            return leaf_cls[name[4]]
        if kind == "ra":
            return (leaf_cls[name[2]] + 1) % 3
        if kind == "rb":
            return (leaf_cls[name[2]] + 2) % 3
        if kind == "tn":
            return tree_cls[(name[4], name[5])]
        if kind == "s1":
            return 1
        if kind == "s2":
            return 2
        raise ValueError(name)

    base_vertices = []
    for i in range(formula.num_vars):
        d = counts[i]
        for pol in (False, True):
            for g in range(d):
                for k in range(K):
                    base_vertices.append(("tip", i, pol, g, k))
        for k in range(K):
            for g in range(d):
                base_vertices.append(("ra", i, k, g))
                base_vertices.append(("rb", i, k, g))
        if depth > 0:
            for pol in (False, True):
                for g in range(d):
                    for level in range(1, depth + 1):
                        for pos in range(1 << (depth - level)):
                            base_vertices.append(("tn", i, pol, g, level, pos))
    for j in range(len(formula.clauses)):
        base_vertices.append(("s1", j))
        base_vertices.append(("s2", j))

    part_names: tuple[list, list, list] = ([], [], [])
    for copy in range(3):
        for name in base_vertices:
            part = (base_class(name) + copy) % 3
            layout.vertex_index[(copy, name)] = (part, len(part_names[part]))
            part_names[part].append((copy, name))
    layout.part_names = part_names
    sizes = {len(p) for p in part_names}
    if len(sizes) != 1:
        raise AssertionError(f"ground sets are unbalanced: "
                             f"{[len(p) for p in part_names]}")
    m = sizes.pop()

    def child(i, pol, g, level, pos):
        if level == 0:
            return ("tip", i, pol, g, pos)
        return ("tn", i, pol, g, level, pos)

    def add_edge(key, names, copy):
        full = tuple((copy, nm) for nm in names) if key[0] != "rootedge" \
            else tuple(names)
        triple = [None, None, None]
        for fn in full:
            part, idx = layout.vertex_index[fn]
            if triple[part] is not None:
                raise AssertionError(f"edge {key} is not tripartite")
            triple[part] = idx
        layout.edge_vertices_by_key[key] = full
        layout.dm_edge_by_key[key] = tuple(triple)
        layout.key_by_dm_edge[tuple(triple)] = key

    for copy in range(3):
        for i in range(formula.num_vars):
            d = counts[i]
            for k in range(K):
                for g in range(d):
                    add_edge(("ring", copy, i, k, g, False),
                             (("tip", i, False, g, k),
                              ("ra", i, k, g), ("rb", i, k, g)), copy)
                    add_edge(("ring", copy, i, k, g, True),
                             (("tip", i, True, g, k),
                              ("ra", i, k, (g + 1) % d), ("rb", i, k, g)), copy)
            for pol in (False, True):
                for g in range(d):
                    for level in range(1, depth + 1):
                        for pos in range(1 << (depth - level)):
                            add_edge(("tree", copy, i, pol, g, level, pos),
                                     (child(i, pol, g, level - 1, 2 * pos),
                                      child(i, pol, g, level - 1, 2 * pos + 1),
                                      ("tn", i, pol, g, level, pos)), copy)
        for j, clause in enumerate(formula.clauses):
            for li, lit in enumerate(clause):
                i = abs(lit) - 1
                lit_pol = lit > 0
                attach_pol = lit_pol if depth % 2 == 1 else not lit_pol
                layout.attach_pol_by_literal[(j, li)] = attach_pol
                g = occ[i].index(j)
                add_edge(("clause", copy, j, li),
                         (layout.root_base(i, attach_pol, g),
                          ("s1", j), ("s2", j)), copy)

    for i, pol, g in layout.all_roots():
        root = layout.root_base(i, pol, g)
        add_edge(("rootedge", i, pol, g),
                 ((0, root), (1, root), (2, root)), 0)

    dm_edges = [layout.dm_edge_by_key[key]
                for key in layout.edge_vertices_by_key]
    dm = build_dm_instance(m, dm_edges, degree_bounded_3=True)
    return dm, layout


# ---------------------------------------------------------------------------
# Encoding assignments as matchings and back


def assignment_to_matching(formula: SatBFormula, layout: ReductionLayout,
                           assignment: Sequence[bool]
                           ) -> tuple[tuple[int, int, int], ...]:
    """The canonical matching encoding a truth assignment.

    Ring edges follow the assigned polarity; trees are covered greedily
    leaf to root; each satisfied clause contributes one clause edge through
    its first satisfied literal; remaining free roots are tied across
    copies.  Exactly six vertices per unsatisfied clause stay uncovered.
    """
    if len(assignment) != formula.num_vars:
        raise ValidationError(
            f"assignment covers {len(assignment)} of {formula.num_vars} variables")
    counts = formula.occurrence_counts()
    K, depth = layout.K, layout.depth
    covered: set = set()
    keys: list = []

    def take(key):
        verts = layout.edge_vertices_by_key[key]
        for v in verts:
            if v in covered:
                raise AssertionError(f"edge {key} collides at {v}")
        covered.update(verts)
        keys.append(key)

    for copy in range(3):
        for i in range(formula.num_vars):
            pol = bool(assignment[i])
            for k in range(K):
                for g in range(counts[i]):
                    take(("ring", copy, i, k, g, pol))
        for i in range(formula.num_vars):
            for pol in (False, True):
                for g in range(counts[i]):
                    for level in range(1, depth + 1):
                        for pos in range(1 << (depth - level)):
                            key = ("tree", copy, i, pol, g, level, pos)
                            verts = layout.edge_vertices_by_key[key]
                            if all(v not in covered for v in verts):
                                take(key)
        for j, clause in enumerate(formula.clauses):
            for li, lit in enumerate(clause):
                if (lit > 0) == bool(assignment[abs(lit) - 1]):
                    take(("clause", copy, j, li))
                    break

    for i, pol, g in layout.all_roots():
        root = layout.root_base(i, pol, g)
        states = [(c, root) in covered for c in range(3)]
        if any(states) != all(states):
            raise AssertionError(f"root {root} covered asymmetrically")
        if not states[0]:
            take(("rootedge", i, pol, g))

    return tuple(sorted(layout.dm_edge_by_key[key] for key in keys))


def decode_matching_to_assignment(formula: SatBFormula,
                                  layout: ReductionLayout,
                                  matching: Iterable[Sequence[int]]
                                  ) -> tuple[bool, ...]:
    """Read the truth assignment off the first copy's ring edges.

    Requires the ring-consistent structure: within each variable, every
    ring follows one polarity.  Variables with no occurrences decode to
    False.
    """
    keys = set()
    for e in matching:
        key = layout.key_by_dm_edge.get(tuple(int(v) for v in e))
        if key is None:
            raise ValidationError(f"edge {tuple(e)} is not in the instance")
        keys.add(key)
    counts = formula.occurrence_counts()
    assignment = []
    for i in range(formula.num_vars):
        d = counts[i]
        if d == 0:
            assignment.append(False)
            continue
        expected = [(k, g) for k in range(layout.K) for g in range(d)]
        pos = {kg for kg in expected if ("ring", 0, i) + kg + (True,) in keys}
        neg = {kg for kg in expected if ("ring", 0, i) + kg + (False,) in keys}
        if pos == set(expected) and not neg:
            assignment.append(True)
        elif neg == set(expected) and not pos:
            assignment.append(False)
        else:
            raise NonCanonicalMatching(
                f"variable {i}: ring edges are not polarity-consistent")
    return tuple(assignment)


def layout_document(layout: ReductionLayout) -> dict:
    """A JSON-ready labeled listing of the reduced instance.

    Carries the formula plus every edge's key and vertex labels, enough to
    decode matchings later via :func:`layout_from_document`.
    """
    f = layout.formula
    return {
        "kind": "3DM-LAYOUT",
        "formula": {"num_vars": f.num_vars, "bound": f.bound,
                    "clauses": [list(c) for c in f.clauses]},
        "rings_per_variable": layout.K,
        "tree_depth": layout.depth,
        "edges": [{"key": list(key), "edge": list(layout.dm_edge_by_key[key]),
                   "vertices": [[c, list(nm)] for c, nm in
                                layout.edge_vertices_by_key[key]]}
                  for key in layout.edge_vertices_by_key],
    }


def layout_from_document(doc: dict) -> tuple[DmInstance, ReductionLayout]:
    """Rebuild the instance and layout from a layout document.

    The construction is deterministic, so the layout is regenerated from
    the embedded formula and checked against the recorded edge listing.
    """
    if doc.get("kind") != "3DM-LAYOUT":
        raise ValidationError(f"not a layout document: kind={doc.get('kind')!r}")
    f = doc["formula"]
    formula = build_satb_formula(f["num_vars"], f["clauses"], bound=f["bound"])
    dm, layout = sat_to_3dm3(formula)
    recorded = {tuple(_freeze(entry["key"])): tuple(entry["edge"])
                for entry in doc["edges"]}
    if recorded != dict(layout.dm_edge_by_key):
        raise ValidationError("layout document does not match its formula")
    return dm, layout


def _freeze(key: list):
    return tuple(tuple(v) if isinstance(v, list) else v for v in key)


def symmetrize_matching(layout: ReductionLayout, dm: DmInstance,
                        matching: Iterable[Sequence[int]]
                        ) -> tuple[tuple[int, int, int], ...]:
    """Replace all copies by the largest copy's restriction and re-tie roots.

    Never decreases the matching size, because copies only interact through
    the root edges.
    """
    by_copy: dict[int, list] = {0: [], 1: [], 2: []}
    for e in matching:
        key = layout.key_by_dm_edge.get(tuple(int(v) for v in e))
        if key is None:
            raise ValidationError(f"edge {tuple(e)} is not in the instance")
        if key[0] != "rootedge":
            by_copy[key[1]].append(key)
    best_copy = max(range(3), key=lambda c: (len(by_copy[c]), -c))
    keys = [layout.translate_key(key, c)
            for key in by_copy[best_copy] for c in range(3)]
    covered = set()
    for key in keys:
        covered.update(layout.edge_vertices_by_key[key])
    for i, pol, g in layout.all_roots():
        root = layout.root_base(i, pol, g)
        if all((c, root) not in covered for c in range(3)):
            keys.append(("rootedge", i, pol, g))
    edges = [layout.dm_edge_by_key[key] for key in keys]
    return dm_check_matching(dm, edges)
