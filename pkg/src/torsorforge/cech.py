"""Nonabelian Cech H^1 over finite nerves, optionally with twisted coefficients.

A cocycle stores one value per overlap (i, j) with i < j. The reversed pair
is implied: g_ji = k_ji(g_ij^-1) where k_ji = k_ij^-1. On triples i < j < k
the cocycle law reads g_ik = g_ij * k_ij(g_jk).

Every patch and every overlap is assumed connected (a good cover), so
locally constant sections are single group elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from ._config import resolve_budget
from ._search import search_assignments, search_size
from .cohomology import ClassificationResult, PiGroup, h1_classes, orbit_partition
from .errors import CapacityError, InvariantError
from .fpgroups import GraphPi1, Presentation, concat, graph_pi1, invert_word
from .graphs import Graph
from .groups import FiniteGroup, compose_maps, invert_map, is_automorphism

GOOD_COVER_NOTE = "assumes every patch and overlap is connected (good cover)"

Map = tuple[int, ...]


@dataclass(frozen=True)
class Nerve:
    npatches: int
    overlaps: tuple[tuple[int, int], ...]
    triples: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        pairs = sorted({tuple(sorted((int(i), int(j)))) for i, j in self.overlaps})
        for i, j in pairs:
            if i == j:
                raise InvariantError(f"overlap ({i}, {j}) is diagonal")
            if not (0 <= i < self.npatches and 0 <= j < self.npatches):
                raise InvariantError(f"overlap ({i}, {j}) references a missing patch")
        triples = sorted({tuple(sorted(int(x) for x in t)) for t in self.triples})
        pairset = set(pairs)
        for i, j, k in triples:
            if len({i, j, k}) != 3:
                raise InvariantError(f"triple {(i, j, k)} repeats a patch")
            for p in ((i, j), (j, k), (i, k)):
                if p not in pairset:
                    raise InvariantError(f"triple {(i, j, k)} needs overlap {p}")
        object.__setattr__(self, "overlaps", tuple(pairs))
        object.__setattr__(self, "triples", tuple(triples))
        if not self.graph.is_connected():
            raise InvariantError("nerve 1-skeleton is disconnected")

    @cached_property
    def graph(self) -> Graph:
        return Graph(self.npatches, self.overlaps)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {p: k for k, p in enumerate(self.overlaps)}

    def edge(self, i: int, j: int) -> int:
        try:
            return self.edge_index[(min(i, j), max(i, j))]
        except KeyError:
            raise InvariantError(f"no overlap between patches {i} and {j}") from None

    @classmethod
    def circle(cls, n: int = 3) -> Nerve:
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> Nerve:
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def full_triangle(cls) -> Nerve:
        return cls(3, ((0, 1), (1, 2), (0, 2)), ((0, 1, 2),))

    @classmethod
    def two_triangles(cls, with_triples: bool = True) -> Nerve:
        """Triangles 012 and 123 glued along the overlap (1, 2)."""
        pairs = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))
        return cls(4, pairs, ((0, 1, 2), (1, 2, 3)) if with_triples else ())


def parse_nerve(text: str) -> Nerve:
    """``patches N; overlap i j; triple i j k;``"""
    n = None
    pairs, triples = [], []
    for clause in (c.strip() for c in text.replace("\n", ";").split(";")):
        if not clause:
            continue
        head, *args = clause.split()
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise InvariantError(f"non-integer argument in nerve clause {clause!r}") from None
        if head == "patches" and len(nums) == 1:
            n = nums[0]
        elif head == "overlap" and len(nums) == 2:
            pairs.append(tuple(nums))
        elif head == "triple" and len(nums) == 3:
            triples.append(tuple(nums))
        else:
            raise InvariantError(f"malformed nerve clause {clause!r}")
    if n is None:
        raise InvariantError("nerve needs a 'patches N' clause")
    return Nerve(n, tuple(pairs), tuple(triples))


def _identity_twist(nerve: Nerve, gamma: FiniteGroup) -> tuple[Map, ...]:
    ident = tuple(range(gamma.order))
    return (ident,) * len(nerve.overlaps)


def normalize_twist(nerve: Nerve, gamma: FiniteGroup, twist) -> tuple[Map, ...]:
    """Twist as one automorphism image array per stored overlap.

    Accepts None, a sequence aligned with ``nerve.overlaps``, or a dict
    keyed by ordered pairs (a key (j, i) with j > i is inverted).
    """
    if twist is None:
        return _identity_twist(nerve, gamma)
    if isinstance(twist, dict):
        out = list(_identity_twist(nerve, gamma))
        for (i, j), a in twist.items():
            a = tuple(a)
            out[nerve.edge(i, j)] = a if i < j else invert_map(a)
        twist = out
    twist = tuple(tuple(a) for a in twist)
    if len(twist) != len(nerve.overlaps):
        raise InvariantError("twist needs one automorphism per overlap")
    for (i, j), a in zip(nerve.overlaps, twist):
        if not is_automorphism(gamma, a):
            raise InvariantError(f"twist on overlap ({i}, {j}) is not an automorphism")
    return twist


@dataclass(frozen=True)
class CechCocycle:
    nerve: Nerve
    gamma: FiniteGroup
    values: tuple[int, ...]
    twist: tuple[Map, ...] | None = None

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if len(vals) != len(self.nerve.overlaps) or any(not 0 <= v < self.gamma.order for v in vals):
            raise InvariantError("cocycle needs one group element per overlap")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "twist", normalize_twist(self.nerve, self.gamma, self.twist))

    def kappa(self, i: int, j: int) -> Map:
        a = self.twist[self.nerve.edge(i, j)]
        return a if i < j else invert_map(a)

    def g(self, i: int, j: int) -> int:
        v = self.values[self.nerve.edge(i, j)]
        if i < j:
            return v
        return self.kappa(i, j)[self.gamma.inverse[v]]


def check_cocycle(c: CechCocycle) -> list[str]:
    """Every violated law, as readable messages; empty iff valid."""
    G = c.gamma
    problems = []
    for i, j, k in c.nerve.triples:
        kij, kjk, kik = c.kappa(i, j), c.kappa(j, k), c.kappa(i, k)
        if compose_maps(kij, kjk) != kik:
            problems.append(f"twist law k_ik = k_ij o k_jk fails on triple {(i, j, k)}")
        if G.mul(c.g(i, j), kij[c.g(j, k)]) != c.g(i, k):
            problems.append(f"cocycle law g_ik = g_ij * k_ij(g_jk) fails on triple {(i, j, k)}")
    for i, j in c.nerve.overlaps:
        if c.g(j, i) != c.kappa(j, i)[G.inverse[c.g(i, j)]]:
            problems.append(f"antisymmetry fails on pair {(i, j)}")
    return problems


def check_twist(nerve: Nerve, gamma: FiniteGroup, twist) -> list[str]:
    twist = normalize_twist(nerve, gamma, twist)
    c = CechCocycle(nerve, gamma, (0,) * len(nerve.overlaps), twist)
    return [p for p in check_cocycle(c) if p.startswith("twist")]


def _gauge(gamma: FiniteGroup, nerve: Nerve, twist: Sequence[Map], u: Sequence[int],
           values: Sequence[int]) -> tuple[int, ...]:
    """h_ij = u_i * g_ij * k_ij(u_j^-1) on every stored overlap."""
    t, inv = gamma.table, gamma.inverse
    return tuple(t[t[u[i]][g]][a[inv[u[j]]]]
                 for (i, j), g, a in zip(nerve.overlaps, values, twist))


def coboundary_act(u: Sequence[int], c: CechCocycle) -> CechCocycle:
    if len(u) != c.nerve.npatches:
        raise InvariantError("gauge needs one element per patch")
    return CechCocycle(c.nerve, c.gamma, _gauge(c.gamma, c.nerve, c.twist, u, c.values), c.twist)


def coboundary_equivalent(c: CechCocycle, d: CechCocycle, budget: int | None = None
                          ) -> tuple[int, ...] | None:
    """A gauge u with d = u . c, or None.

    The value at the tree root is searched over all of Gamma; the rest is
    forced along the spanning tree by u_j = k_ij^-1(h_ij^-1 * u_i * g_ij)
    and the remaining overlaps are verified.
    """
    if c.nerve != d.nerve or c.gamma != d.gamma or c.twist != d.twist:
        raise InvariantError("cocycles live over different nerves, groups, or twists")
    G, nerve = c.gamma, c.nerve
    if G.order > resolve_budget(budget):
        raise CapacityError(f"gauge search needs {G.order} root values", required=G.order)
    tree = nerve.graph.spanning_tree(0)
    steps = [(tree.graph.endpoints(tree.parent[v]), v) for v in tree.bfs_order[1:]]
    for root_value in range(G.order):
        u = [0] * nerve.npatches
        u[tree.root] = root_value
        for (i, j), _ in steps:
            inner = G.mul(G.mul(G.inv(d.g(i, j)), u[i]), c.g(i, j))
            u[j] = c.kappa(j, i)[inner]
        if _gauge(G, nerve, c.twist, u, c.values) == d.values:
            return tuple(u)
    return None


@dataclass(frozen=True)
class CechClassification:
    nerve: Nerve
    gamma: FiniteGroup
    twist: tuple[Map, ...]
    result: ClassificationResult
    note: str = GOOD_COVER_NOTE

    @property
    def class_count(self) -> int:
        return self.result.class_count

    def representatives(self) -> list[CechCocycle]:
        return [CechCocycle(self.nerve, self.gamma, v, self.twist)
                for v in self.result.representative_values()]


class _TripleChecker:
    """Evaluates g_ik^-1 * g_ij * k_ij(g_jk) for a triple encoded as edge numbers (1-based)."""

    def __init__(self, gamma: FiniteGroup, twist):
        self.table = gamma.table
        self.inverse = gamma.inverse
        self.twist = twist

    def __call__(self, r, values) -> int:
        ij, jk, ik = r
        t = self.table
        return t[self.inverse[values[ik - 1]]][t[values[ij - 1]][self.twist[ij - 1][values[jk - 1]]]]


def enumerate_cocycles(nerve: Nerve, gamma: FiniteGroup, twist=None, budget: int | None = None,
                       workers: int = 1) -> list[tuple[int, ...]]:
    """All valid cocycle value tuples in lexicographic order."""
    twist = normalize_twist(nerve, gamma, twist)
    problems = check_twist(nerve, gamma, twist)
    if problems:
        raise InvariantError("; ".join(problems))
    rels = []
    for i, j, k in nerve.triples:
        rels.append((nerve.edge(i, j) + 1, nerve.edge(j, k) + 1, nerve.edge(i, k) + 1))
    # relators here are edge triples, grouped by their largest edge
    cands = [tuple(range(gamma.order))] * len(nerve.overlaps)
    return search_assignments(cands, rels, _TripleChecker(gamma, twist), resolve_budget(budget), workers)


def cech_h1(nerve: Nerve, gamma: FiniteGroup, twist=None, budget: int | None = None,
            workers: int = 1) -> CechClassification:
    twist = normalize_twist(nerve, gamma, twist)
    cocycles = enumerate_cocycles(nerve, gamma, twist, budget, workers)
    gens = gamma.generators
    moves = []
    for p in range(nerve.npatches):
        for g in gens:
            u = [0] * nerve.npatches
            u[p] = g
            moves.append(u)

    def orbit_of(v):
        seen = {v}
        stack = [v]
        while stack:
            w = stack.pop()
            for u in moves:
                x = _gauge(gamma, nerve, twist, u, w)
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return seen

    result = orbit_partition(cocycles, orbit_of)
    size = search_size([range(gamma.order)] * len(nerve.overlaps))
    result = ClassificationResult(result.cocycles, result.orbits, result.representatives, size)
    return CechClassification(nerve, gamma, twist, result)


# -- bridge to group cohomology ----------------------------------------------

@dataclass(frozen=True)
class NervePi1:
    """Edge-path group of a nerve: free on non-tree overlaps modulo one
    relator w(ij) w(jk) w(ik)^-1 per triple i < j < k."""

    nerve: Nerve
    presentation: Presentation
    graph_data: GraphPi1

    @property
    def generator_edges(self) -> tuple[int, ...]:
        return self.graph_data.generator_edges


def nerve_pi1(nerve: Nerve) -> NervePi1:
    data = graph_pi1(nerve.graph, 0)
    words = data.edge_words
    rels = []
    for i, j, k in nerve.triples:
        r = concat(words[nerve.edge(i, j)], words[nerve.edge(j, k)], invert_word(words[nerve.edge(i, k)]))
        if r and r not in rels:
            rels.append(r)
    base = data.presentation
    return NervePi1(nerve, Presentation(base.ngens, tuple(rels), base.names), data)


def _edge_element(c: CechCocycle, i: int, j: int) -> tuple[int, Map]:
    return c.g(i, j), c.kappa(i, j)


def _sd_mul(G: FiniteGroup, x: tuple[int, Map], y: tuple[int, Map]) -> tuple[int, Map]:
    """(a, A)(b, B) = (a A(b), A B) in Gamma x| Aut(Gamma)."""
    return G.mul(x[0], x[1][y[0]]), compose_maps(x[1], y[1])


def _sd_inv(G: FiniteGroup, x: tuple[int, Map]) -> tuple[int, Map]:
    ainv = invert_map(x[1])
    return ainv[G.inv(x[0])], ainv


def holonomy(c: CechCocycle, pi1: NervePi1) -> tuple[tuple[int, ...], tuple[Map, ...]]:
    """Crossed-morphism values and twist monodromy on the generator loops.

    Each overlap (i, j) is the element (g_ij, k_ij) of Gamma x| Aut(Gamma);
    the cocycle law makes the ordered product along a path multiplicative.
    """
    G, nerve = c.gamma, c.nerve
    tree = pi1.graph_data.tree
    ident = (G.identity, tuple(range(G.order)))
    transport = {tree.root: ident}
    for v in tree.bfs_order[1:]:
        u, _ = tree.graph.endpoints(tree.parent[v])
        transport[v] = _sd_mul(G, transport[u], _edge_element(c, u, v))
    rho, phi = [], []
    for e in pi1.generator_edges:
        i, j = nerve.overlaps[e]
        loop = _sd_mul(G, _sd_mul(G, transport[i], _edge_element(c, i, j)), _sd_inv(G, transport[j]))
        rho.append(loop[0])
        phi.append(loop[1])
    return tuple(rho), tuple(phi)


@dataclass(frozen=True)
class ComparisonReport:
    cech: CechClassification
    group: ClassificationResult
    coefficients: PiGroup
    mapping: dict[int, int]  # cech class -> group class
    matched: bool
    problems: tuple[str, ...] = ()

    @property
    def counts(self) -> tuple[int, int]:
        return self.cech.class_count, self.group.class_count


def compare_cech_group_cohomology(nerve: Nerve, gamma: FiniteGroup, twist=None,
                                  budget: int | None = None, workers: int = 1) -> ComparisonReport:
    """Compute both classifications independently and match them by holonomy."""
    twist = normalize_twist(nerve, gamma, twist)
    cech = cech_h1(nerve, gamma, twist, budget, workers)
    pi1 = nerve_pi1(nerve)
    zero = CechCocycle(nerve, gamma, (0,) * len(nerve.overlaps), twist)
    _, phi = holonomy(zero, pi1)
    coeffs = PiGroup(pi1.presentation, gamma, phi)
    group = h1_classes(coeffs, budget, workers)
    problems = []
    if cech.class_count != group.class_count:
        problems.append(f"class counts differ: cech {cech.class_count} != group {group.class_count}")
    mapping: dict[int, int] = {}
    for k, values in enumerate(cech.result.cocycles):
        rho, mono = holonomy(CechCocycle(nerve, gamma, values, twist), pi1)
        if mono != phi:
            problems.append(f"twist monodromy of cocycle {values} differs from the induced action")
            break
        try:
            target = group.class_of(rho)
        except InvariantError:
            problems.append(f"holonomy {rho} of cocycle {values} is not a crossed morphism")
            break
        source = cech.result.class_of(values)
        if mapping.setdefault(source, target) != target:
            problems.append(f"cech class {source} maps to two group classes")
            break
    if not problems and sorted(mapping.values()) != list(range(group.class_count)):
        problems.append("holonomy map on classes is not a bijection")
    return ComparisonReport(cech, group, coeffs, mapping, not problems, tuple(problems))
