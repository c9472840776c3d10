"""Finitely presented groups, words, and homomorphism enumeration.

A word is a tuple of nonzero ints: ``+k`` is generator k (1-based) and
``-k`` its inverse. Presentations are never enumerated as groups; every
algorithm works from generator images and relator checks only.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from ._config import resolve_budget
from ._search import HomChecker, search_assignments
from .errors import InvariantError
from .graphs import Graph, SpanningTree
from .groups import FiniteGroup

Word = tuple[int, ...]


def reduce_word(letters: Sequence[int]) -> Word:
    """Free reduction with a stack."""
    out: list[int] = []
    for x in letters:
        x = int(x)
        if x == 0:
            raise InvariantError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*words: Sequence[int]) -> Word:
    return reduce_word([x for w in words for x in w])


def commutator(a: int, b: int) -> Word:
    return (a, b, -a, -b)


@dataclass(frozen=True)
class Presentation:
    ngens: int
    relators: tuple[Word, ...] = ()
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.ngens < 0:
            raise InvariantError("number of generators must be >= 0")
        rels = []
        for r in self.relators:
            w = reduce_word(r)
            if not w:
                raise InvariantError(f"relator {list(r)} reduces to the empty word")
            for x in w:
                if abs(x) > self.ngens:
                    raise InvariantError(f"relator {list(r)} uses generator {abs(x)} of {self.ngens}")
            rels.append(w)
        object.__setattr__(self, "relators", tuple(rels))
        if self.names is not None and len(self.names) != self.ngens:
            raise InvariantError("one name per generator")

    def gen_name(self, k: int) -> str:
        return self.names[k] if self.names else f"g{k + 1}"

    def format_word(self, w: Sequence[int]) -> str:
        if not w:
            return "e"
        return " ".join(self.gen_name(abs(x) - 1) + ("^-1" if x < 0 else "") for x in w)

    def __str__(self):
        gens = " ".join(self.gen_name(k) for k in range(self.ngens))
        rels = ", ".join(self.format_word(r) for r in self.relators)
        return f"<{gens} | {rels}>"


def free_presentation(rank: int) -> Presentation:
    return Presentation(rank, (), tuple(f"x{k + 1}" for k in range(rank)))


def cyclic_presentation(n: int) -> Presentation:
    return Presentation(1, ((1,) * n,), ("s",))


def surface_presentation(genus: int) -> Presentation:
    """<a1 b1 ... ag bg | [a1,b1]...[ag,bg]>"""
    if genus < 1:
        raise InvariantError("surface presentation needs genus >= 1")
    rel: list[int] = []
    names = []
    for i in range(genus):
        rel += commutator(2 * i + 1, 2 * i + 2)
        names += [f"a{i + 1}", f"b{i + 1}"] if genus > 1 else ["a", "b"]
    return Presentation(2 * genus, (tuple(rel),), tuple(names))


def klein_four_presentation() -> Presentation:
    return Presentation(2, ((1, 1), (2, 2), commutator(1, 2)), ("a", "b"))


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(\^(-?\d+))?$")


def parse_presentation(text: str) -> Presentation:
    """Parse ``gens a b; rel a b a^-1 b^-1; rel ...;``.

    Letters are whitespace separated; ``x^k`` with any nonzero integer k is
    accepted as shorthand for k copies of x (or of x^-1).
    """
    names: list[str] | None = None
    rels: list[list[int]] = []
    for clause in (c.strip() for c in text.split(";")):
        if not clause:
            continue
        head, _, body = clause.partition(" ")
        if head == "gens":
            names = body.split()
            if len(set(names)) != len(names):
                raise InvariantError("duplicate generator names")
        elif head == "rel":
            if names is None:
                raise InvariantError("'rel' before 'gens'")
            rels.append(_parse_word(body, names))
        else:
            raise InvariantError(f"unknown presentation clause {head!r}")
    if names is None:
        names = []
    return Presentation(len(names), tuple(tuple(r) for r in rels), tuple(names))


def _parse_word(body: str, names: Sequence[str]) -> list[int]:
    index = {n: i + 1 for i, n in enumerate(names)}
    out: list[int] = []
    for tok in body.split():
        m = _TOKEN.match(tok)
        if not m or m.group(1) not in index:
            raise InvariantError(f"unknown letter {tok!r}")
        k = index[m.group(1)]
        e = int(m.group(3)) if m.group(3) else 1
        if e == 0:
            raise InvariantError(f"zero exponent in {tok!r}")
        out += [k if e > 0 else -k] * abs(e)
    return out


def abelianization(P: Presentation) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion invariant factors) of P^ab via Smith normal form."""
    if not P.relators or P.ngens == 0:
        return P.ngens, ()
    rows = []
    for r in P.relators:
        row = [0] * P.ngens
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    factors = [abs(int(f)) for f in invariant_factors(Matrix(rows), domain=ZZ)]
    nonzero = [f for f in factors if f != 0]
    return P.ngens - len(nonzero), tuple(f for f in nonzero if f > 1)


# -- graphs ------------------------------------------------------------------

@dataclass(frozen=True)
class GraphPi1:
    """Free presentation of a graph's fundamental group at the tree root.

    Generator k is the loop through the k-th non-tree edge; ``edge_words``
    gives, for every oriented edge, its word after collapsing the tree.
    """
    presentation: Presentation
    tree: SpanningTree
    generator_edges: tuple[int, ...]
    edge_words: tuple[Word, ...]

    def path_word(self, steps) -> Word:
        letters: list[int] = []
        for edge, d in steps:
            w = self.edge_words[edge]
            letters += w if d > 0 else invert_word(w)
        return reduce_word(letters)


def graph_pi1(graph: Graph, root: int = 0) -> GraphPi1:
    tree = graph.spanning_tree(root)  # raises on disconnected graphs
    cotree = tree.cotree_edges
    gen_of = {e: k + 1 for k, e in enumerate(cotree)}
    words = tuple((gen_of[e],) if e in gen_of else () for e in range(graph.nedges))
    names = tuple(f"e{e}" for e in cotree)
    return GraphPi1(Presentation(len(cotree), (), names), tree, cotree, words)


# -- homomorphisms -----------------------------------------------------------

def evaluate_hom(values: Sequence[int], G: FiniteGroup, w: Sequence[int]) -> int:
    acc = G.identity
    table, inv = G.table, G.inverse
    for x in w:
        v = values[x - 1] if x > 0 else inv[values[-x - 1]]
        acc = table[acc][v]
    return acc


def enumerate_homs(P: Presentation, G: FiniteGroup, budget: int | None = None,
                   workers: int = 1) -> list[tuple[int, ...]]:
    """Generator-image tuples of all homomorphisms P -> G, in lexicographic order.

    Depth-first over generators; each relator is checked as soon as every
    generator it mentions has a value.
    """
    checker = HomChecker(G.table, G.inverse)
    cands = [tuple(range(G.order))] * P.ngens
    return search_assignments(cands, P.relators, checker, resolve_budget(budget), workers)


def enumerate_homs_naive(P: Presentation, G: FiniteGroup) -> list[tuple[int, ...]]:
    """Full-grid scan without pruning; test oracle for enumerate_homs."""
    import itertools

    return [vals for vals in itertools.product(range(G.order), repeat=P.ngens)
            if all(evaluate_hom(vals, G, r) == G.identity for r in P.relators)]


# -- finite groups as presentations ------------------------------------------

@dataclass(frozen=True)
class CayleyPresentation:
    """A presentation of a finite group read off its Cayley graph.

    ``normal_words[x]`` is the BFS-tree word for element x, and relators are
    w_x g w_{xg}^-1 for every non-tree Cayley edge.
    """
    group: FiniteGroup
    presentation: Presentation
    generators: tuple[int, ...]
    normal_words: tuple[Word, ...]

    def element_of(self, w: Sequence[int]) -> int:
        return evaluate_hom(self.generators, self.group, w)


def cayley_presentation(G: FiniteGroup) -> CayleyPresentation:
    gens = G.generators
    words: list[Word | None] = [None] * G.order
    words[G.identity] = ()
    tree_edges = set()
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        for k, g in enumerate(gens):
            y = G.table[x][g]
            if words[y] is None:
                words[y] = words[x] + (k + 1,)
                tree_edges.add((x, k))
                queue.append(y)
    rels = []
    for x in range(G.order):
        for k, g in enumerate(gens):
            if (x, k) in tree_edges:
                continue
            r = concat(words[x], (k + 1,), invert_word(words[G.table[x][g]]))
            if r and r not in rels:
                rels.append(r)
    names = tuple(f"t{k + 1}" for k in range(len(gens)))
    return CayleyPresentation(G, Presentation(len(gens), tuple(rels), names), gens, tuple(words))
