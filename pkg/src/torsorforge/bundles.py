"""Explicit finite bundles over graphs.

Base spaces are finite connected multigraphs. A Galois cover Y -> X with
deck group pi is built from voltages; group coverings and torsors are
materialized as orbit sets of pi acting on (vertices of Y) x Gamma, and
then carried as fibrewise data: one finite set (or group) per base vertex
and one transport bijection per oriented edge.

Loop convention: a loop at the base root maps to the deck element f when
its lift starting at the canonical root lift ends at f applied to that lift.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .cohomology import FinitePiGroup, PiGroup, finite_pi_group
from .errors import InvariantError
from .fpgroups import GraphPi1, graph_pi1
from .graphs import Graph, Step
from .groups import (FiniteGroup, GroupMorphism, compose_maps, group_from_elements, invert_map,
                     is_automorphism, symmetric_group)

Map = tuple[int, ...]


def _is_perm(m: Sequence[int], n: int) -> bool:
    return len(m) == n and sorted(m) == list(range(n))


# -- coverings ---------------------------------------------------------------

@dataclass(frozen=True)
class CoveringModel:
    """A connected Galois cover of graphs with its deck group.

    ``vertex_action[f]`` and ``edge_action[f]`` give the deck element f
    acting on cover vertices and edges.
    """

    base: Graph
    cover: Graph
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    deck: FiniteGroup
    vertex_action: tuple[Map, ...]
    edge_action: tuple[Map, ...]

    def __post_init__(self):
        X, Y, G = self.base, self.cover, self.deck
        if len(self.vertex_map) != Y.nvertices or len(self.edge_map) != Y.nedges:
            raise InvariantError("projection must cover every vertex and edge of the cover graph")
        for k, (u, v) in enumerate(Y.edges):
            if X.edges[self.edge_map[k]] != (self.vertex_map[u], self.vertex_map[v]):
                raise InvariantError(f"projection does not respect the endpoints of cover edge {k}")
        for y in range(Y.nvertices):
            down = sorted((self.edge_map[e], d) for e, d in Y.incidence[y])
            if down != sorted(X.incidence[self.vertex_map[y]]):
                raise InvariantError(f"projection is not a bijection on the star of cover vertex {y}")
        if not Y.is_connected():
            raise InvariantError("cover graph is disconnected (not a Galois cover)")
        if len(self.vertex_action) != G.order or len(self.edge_action) != G.order:
            raise InvariantError("deck action needs one map per deck element")
        for f in range(G.order):
            va, ea = self.vertex_action[f], self.edge_action[f]
            if not _is_perm(va, Y.nvertices) or not _is_perm(ea, Y.nedges):
                raise InvariantError(f"deck element {f} does not permute the cover")
            for k, (u, v) in enumerate(Y.edges):
                if Y.edges[ea[k]] != (va[u], va[v]):
                    raise InvariantError(f"deck element {f} is not a graph automorphism")
            if any(self.vertex_map[va[y]] != self.vertex_map[y] for y in range(Y.nvertices)):
                raise InvariantError(f"deck element {f} does not commute with the projection")
            if any(self.edge_map[ea[k]] != self.edge_map[k] for k in range(Y.nedges)):
                raise InvariantError(f"deck element {f} does not commute with the projection")
            if f != G.identity and any(va[y] == y for y in range(Y.nvertices)):
                raise InvariantError(f"deck element {f} fixes a vertex (action is not free)")
        for f in range(G.order):
            for g in range(G.order):
                if self.vertex_action[G.table[f][g]] != compose_maps(self.vertex_action[f],
                                                                     self.vertex_action[g]):
                    raise InvariantError("deck action is not a group action")
        for x in range(X.nvertices):
            if len(self.fibre(x)) != G.order:
                raise InvariantError(f"deck group is not transitive on the fibre over {x}")

    def fibre(self, x: int) -> list[int]:
        return [y for y in range(self.cover.nvertices) if self.vertex_map[y] == x]

    @cached_property
    def canonical_lifts(self) -> tuple[int, ...]:
        return tuple(min(self.fibre(x)) for x in range(self.base.nvertices))

    @cached_property
    def _lift_table(self) -> tuple[dict[Step, int], ...]:
        out = []
        for y in range(self.cover.nvertices):
            out.append({(self.edge_map[e], d): self.cover.endpoints((e, d))[1]
                        for e, d in self.cover.incidence[y]})
        return tuple(out)

    def lift_step(self, y: int, step: Step) -> int:
        return self._lift_table[y][step]

    def lift_path(self, y: int, steps: Sequence[Step]) -> int:
        for s in steps:
            y = self.lift_step(y, s)
        return y

    def deck_element_taking(self, source: int, target: int) -> int:
        for f in range(self.deck.order):
            if self.vertex_action[f][source] == target:
                return f
        raise InvariantError(f"no deck element takes {source} to {target}")


def voltage_cover(base: Graph, deck: FiniteGroup, voltages: Sequence[int]) -> CoveringModel:
    """The derived cover: vertex (x, h) at x*|pi| + h, edge u->v with voltage a
    lifting to (u, h) -> (v, h a); deck f acts by (x, h) -> (x, f h)."""
    n = deck.order
    if len(voltages) != base.nedges:
        raise InvariantError("one voltage per base edge")
    edges = []
    for (u, v), a in zip(base.edges, voltages):
        for h in range(n):
            edges.append((u * n + h, v * n + deck.table[h][a]))
    cover = Graph(base.nvertices * n, tuple(edges))
    vmap = tuple(y // n for y in range(cover.nvertices))
    emap = tuple(k // n for k in range(cover.nedges))
    vact = tuple(tuple((y // n) * n + deck.table[f][y % n] for y in range(cover.nvertices))
                 for f in range(n))
    eact = tuple(tuple((k // n) * n + deck.table[f][k % n] for k in range(cover.nedges))
                 for f in range(n))
    return CoveringModel(base, cover, vmap, emap, deck, vact, eact)


def trivial_cover(base: Graph) -> CoveringModel:
    from .groups import cyclic_group

    return voltage_cover(base, cyclic_group(1), (0,) * base.nedges)


@dataclass(frozen=True)
class DeckPresentation:
    pi1: GraphPi1
    images: tuple[int, ...]  # deck element of each generator loop
    root_lift: int

    @property
    def presentation(self):
        return self.pi1.presentation


def cover_deck_presentation(c: CoveringModel, root: int = 0) -> DeckPresentation:
    """Free presentation of the base's pi_1 with its surjection onto the deck group."""
    pi1 = graph_pi1(c.base, root)
    start = c.canonical_lifts[root]
    images = []
    for e in pi1.generator_edges:
        end = c.lift_path(start, pi1.tree.loop(e))
        images.append(c.deck_element_taking(start, end))
    if len(c.deck.closure(images)) != c.deck.order:
        raise InvariantError("lifted loops do not generate the deck group")
    return DeckPresentation(pi1, tuple(images), start)


# -- group coverings ---------------------------------------------------------

@dataclass(frozen=True)
class CoveringData:
    """How a group covering was built: cover, fibre group, and deck action on it."""

    covering: CoveringModel
    coefficients: FinitePiGroup


@dataclass(frozen=True)
class GroupCoveringModel:
    """A group bundle over a graph: a group per vertex and a group
    isomorphism per edge (forward direction)."""

    base: Graph
    fibres: tuple[FiniteGroup, ...]
    transports: tuple[Map, ...]
    provenance: CoveringData | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.fibres) != self.base.nvertices or len(self.transports) != self.base.nedges:
            raise InvariantError("group covering needs one fibre per vertex and one transport per edge")
        for k, (u, v) in enumerate(self.base.edges):
            t = self.transports[k]
            src, dst = self.fibres[u], self.fibres[v]
            if src.order != dst.order or not _is_perm(t, src.order):
                raise InvariantError(f"transport on edge {k} is not a bijection of fibres")
            if any(t[src.table[a][b]] != dst.table[t[a]][t[b]]
                   for a in range(src.order) for b in range(src.order)):
                raise InvariantError(f"transport on edge {k} is not a group isomorphism")

    __hash__ = object.__hash__

    def step_map(self, step: Step) -> Map:
        t = self.transports[step[0]]
        return t if step[1] > 0 else invert_map(t)

    def path_map(self, steps: Sequence[Step], x: int) -> Map:
        acc = tuple(range(self.fibres[x].order))
        for s in steps:
            acc = compose_maps(self.step_map(s), acc)
        return acc


def _orbit_labels(c: CoveringModel, gamma: FiniteGroup, move) -> list[list[int]]:
    """Materialize orbits of pi on (cover vertices) x Gamma.

    ``move(f, g)`` is the Gamma-part of f acting on (xi, g). Each orbit is
    labelled by its Gamma-coordinate at the canonical lift of its base vertex;
    returns ``label[xi][g]``.
    """
    Y = c.cover
    label = [[-1] * gamma.order for _ in range(Y.nvertices)]
    for x, xt in enumerate(c.canonical_lifts):
        for g in range(gamma.order):
            for f in range(c.deck.order):
                xi, h = c.vertex_action[f][xt], move(f, g)
                if label[xi][h] != -1:
                    raise InvariantError("deck action on the product is not free")
                label[xi][h] = g
    if any(-1 in row for row in label):
        raise InvariantError("orbits do not exhaust the product")
    return label


def build_group_covering(c: CoveringModel, gamma: FiniteGroup, phi) -> GroupCoveringModel:
    """zeta = pi \\ (Y x Gamma) under (xi, g) -> (f xi, phi_f(g)).

    ``phi`` is a GroupMorphism deck -> Aut(Gamma).as_group paired with its
    AutomorphismGroup, or one image array per deck element.
    """
    coeffs = finite_pi_group(c.deck, gamma, _phi_maps(phi))
    label = _orbit_labels(c, gamma, lambda f, g: coeffs.phi[f][g])
    transports = []
    for k, (u, v) in enumerate(c.base.edges):
        end = c.lift_step(c.canonical_lifts[u], (k, 1))
        transports.append(tuple(label[end][g] for g in range(gamma.order)))
    fibres = (gamma,) * c.base.nvertices
    return GroupCoveringModel(c.base, fibres, tuple(transports), CoveringData(c, coeffs))


def _phi_maps(phi) -> tuple[Map, ...]:
    if isinstance(phi, tuple) and len(phi) == 2 and isinstance(phi[0], GroupMorphism):
        morphism, auts = phi
        return tuple(auts.maps[k] for k in morphism.image)
    return tuple(tuple(m) for m in phi)


def constant_group_covering(base: Graph, gamma: FiniteGroup) -> GroupCoveringModel:
    ident = tuple(range(gamma.order))
    return GroupCoveringModel(base, (gamma,) * base.nvertices, (ident,) * base.nedges)


def group_sections(G: GroupCoveringModel) -> list[tuple[int, ...]]:
    """Global sections of a group covering (edge-compatible vertex values)."""
    return _compatible_assignments(G.base, [f.order for f in G.fibres], G.transports)


def _compatible_assignments(base: Graph, sizes: Sequence[int], transports: Sequence[Map]
                            ) -> list[tuple[int, ...]]:
    """Vertex values with transport[e](value[u]) = value[v] on every edge.

    Depth-first over vertices; an edge is checked once both ends are set.
    """
    n = base.nvertices
    checks: list[list[int]] = [[] for _ in range(n)]
    for k, (u, v) in enumerate(base.edges):
        checks[max(u, v)].append(k)
    values = [0] * n
    out = []

    def rec(x):
        if x == n:
            out.append(tuple(values))
            return
        for p in range(sizes[x]):
            values[x] = p
            if all(transports[k][values[base.edges[k][0]]] == values[base.edges[k][1]]
                   for k in checks[x]):
                rec(x + 1)

    rec(0)
    return out


# -- torsors -----------------------------------------------------------------

@dataclass(frozen=True)
class TorsorModel:
    """A torsor under a group covering: a finite set per vertex with a right
    action of the fibre group, and an equivariant bijection per edge.

    ``action[x][p][g]`` is p.g; ``transports[e]`` maps the fibre over the
    source of e to the fibre over its target.
    """

    group: GroupCoveringModel
    action: tuple[tuple[tuple[int, ...], ...], ...]
    transports: tuple[Map, ...]
    labels: tuple[tuple[str, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        G = self.group
        if len(self.action) != G.base.nvertices or len(self.transports) != G.base.nedges:
            raise InvariantError("torsor needs one fibre per vertex and one transport per edge")
        for x, (grp, act) in enumerate(zip(G.fibres, self.action)):
            _check_simply_transitive(x, grp, act)
        for k, (u, v) in enumerate(G.base.edges):
            t, tg = self.transports[k], G.transports[k]
            if not _is_perm(t, len(self.action[u])):
                raise InvariantError(f"torsor transport on edge {k} is not a bijection")
            for p in range(len(t)):
                for g in range(len(tg)):
                    if t[self.action[u][p][g]] != self.action[v][t[p]][tg[g]]:
                        raise InvariantError(f"torsor transport on edge {k} is not equivariant")

    __hash__ = object.__hash__

    @property
    def base(self) -> Graph:
        return self.group.base

    def fibre_size(self, x: int) -> int:
        return len(self.action[x])

    def act(self, x: int, p: int, g: int) -> int:
        return self.action[x][p][g]

    def step_map(self, step: Step) -> Map:
        t = self.transports[step[0]]
        return t if step[1] > 0 else invert_map(t)

    def path_map(self, steps: Sequence[Step], x: int) -> Map:
        acc = tuple(range(self.fibre_size(x)))
        for s in steps:
            acc = compose_maps(self.step_map(s), acc)
        return acc

    def divide(self, x: int, p: int, q: int) -> int:
        """The unique g with p.g = q."""
        return self.action[x][p].index(q)


def _check_simply_transitive(x: int, grp: FiniteGroup, act) -> None:
    n = len(act)
    if n != grp.order:
        raise InvariantError(f"fibre over {x} has {n} points but its group has order {grp.order}")
    for p in range(n):
        row = act[p]
        if len(row) != grp.order or sorted(row) != list(range(n)):
            raise InvariantError(f"fibre over {x}: (p, g) -> (p, p.g) is not a bijection (not simply transitive)")
        if row[grp.identity] != p:
            raise InvariantError(f"fibre over {x}: identity does not act trivially")
        for g in range(grp.order):
            for h in range(grp.order):
                if act[row[g]][h] != row[grp.table[g][h]]:
                    raise InvariantError(f"fibre over {x}: action is not a right action")


def trivial_torsor(G: GroupCoveringModel) -> TorsorModel:
    """The group covering acting on itself by right translation."""
    return twisted_torsor(G, [f.identity for f in _edge_targets(G)])


def _edge_targets(G: GroupCoveringModel) -> list[FiniteGroup]:
    return [G.fibres[v] for _, v in G.base.edges]


def twisted_torsor(G: GroupCoveringModel, twist: Sequence[int]) -> TorsorModel:
    """Fibres G_x acting on themselves, transport p -> c_e * t_e(p) along edge e."""
    action = tuple(tuple(tuple(f.table[p][g] for g in range(f.order)) for p in range(f.order))
                   for f in G.fibres)
    transports = []
    for k, (_, v) in enumerate(G.base.edges):
        tgt = G.fibres[v]
        transports.append(tuple(tgt.table[twist[k]][G.transports[k][p]] for p in range(tgt.order)))
    return TorsorModel(G, action, tuple(transports))


def all_twisted_torsors(G: GroupCoveringModel) -> list[tuple[tuple[int, ...], TorsorModel]]:
    ranges = [range(f.order) for f in _edge_targets(G)]
    return [(c, twisted_torsor(G, c)) for c in itertools.product(*ranges)]


def build_torsor(zeta: GroupCoveringModel, rho: Sequence[int]) -> TorsorModel:
    """pi \\ (Y x Gamma) under (xi, g) -> (f xi, rho(f) phi_f(g)).

    ``rho`` gives a value for every deck element and is checked as a crossed
    morphism on the whole multiplication table.
    """
    data = _require_provenance(zeta)
    coeffs, c = data.coefficients, data.covering
    rho = tuple(int(r) for r in rho)
    gamma = coeffs.M
    if len(rho) != c.deck.order or not coeffs.is_crossed(rho):
        raise InvariantError("crossed-morphism check rho(fg) = rho(f) phi_f(rho(g)) failed")
    label = _orbit_labels(c, gamma, lambda f, g: gamma.table[rho[f]][coeffs.phi[f][g]])
    action = tuple(tuple(tuple(gamma.table[p][g] for g in range(gamma.order)) for p in range(gamma.order))
                   for _ in range(c.base.nvertices))
    transports = []
    for k, (u, _) in enumerate(c.base.edges):
        end = c.lift_step(c.canonical_lifts[u], (k, 1))
        transports.append(tuple(label[end][g] for g in range(gamma.order)))
    return TorsorModel(zeta, action, tuple(transports))


def _require_provenance(zeta: GroupCoveringModel) -> CoveringData:
    if zeta.provenance is None:
        raise InvariantError("group covering was not built from a Galois cover")
    return zeta.provenance


def torsor_isomorphisms(P: TorsorModel, Q: TorsorModel) -> list[tuple[Map, ...]]:
    """All equivariant bundle maps P -> Q over the base, as one fibre map per vertex.

    Depth-first over one image of the first point per vertex; equivariance
    fills the rest of the fibre and edges are checked as soon as both ends
    are set. Each result is verified bijective.
    """
    if P.group != Q.group:
        raise InvariantError("torsors are under different group coverings")
    base = P.base
    n = base.nvertices
    checks: list[list[int]] = [[] for _ in range(n)]
    for k, (u, v) in enumerate(base.edges):
        checks[max(u, v)].append(k)
    maps: list[Map | None] = [None] * n
    out = []

    def edge_ok(k):
        u, v = base.edges[k]
        tp, tq = P.transports[k], Q.transports[k]
        mu, mv = maps[u], maps[v]
        return all(tq[mu[p]] == mv[tp[p]] for p in range(len(mu)))

    def rec(x):
        if x == n:
            out.append(tuple(maps))
            return
        grp = P.group.fibres[x]
        for q in range(Q.fibre_size(x)):
            # u(0.g) = q.g
            m = [0] * P.fibre_size(x)
            for g in range(grp.order):
                m[P.act(x, 0, g)] = Q.act(x, q, g)
            maps[x] = tuple(m)
            if all(edge_ok(k) for k in checks[x]):
                rec(x + 1)
        maps[x] = None

    rec(0)
    for iso in out:
        for x, m in enumerate(iso):
            if not _is_perm(m, Q.fibre_size(x)):
                raise InvariantError(f"torsor morphism is not bijective over vertex {x}")
            grp = P.group.fibres[x]
            for p in range(P.fibre_size(x)):
                for g in range(grp.order):
                    if m[P.act(x, p, g)] != Q.act(x, m[p], g):
                        raise InvariantError("torsor morphism is not equivariant")
    return out


def are_isomorphic(P: TorsorModel, Q: TorsorModel) -> bool:
    return bool(torsor_isomorphisms(P, Q))


def global_sections(P: TorsorModel) -> list[tuple[int, ...]]:
    return _compatible_assignments(P.base, [P.fibre_size(x) for x in range(P.base.nvertices)],
                                   P.transports)


# -- holonomy ----------------------------------------------------------------

@dataclass(frozen=True)
class Holonomy:
    """Crossed morphism on the generator loops of the base's pi_1, valued in
    the fibre group at the root with the action given by the group covering's
    own loop monodromy."""

    pi1: GraphPi1
    coefficients: PiGroup
    values: tuple[int, ...]
    basepoint: tuple[int, int]


def holonomy(P: TorsorModel, basepoint: tuple[int, int] = (0, 0), root: int = 0) -> Holonomy:
    """Lift each generator loop through the torsor's transports.

    With p0 the basepoint moved to the root and Hol(p0) = p0.h, the loop
    acts on the root group by phi = (group monodromy)^-1 and
    rho = phi(h)^-1; then g -> rho * phi(g) represents transport against the
    loop in the frame p0.
    """
    pi1 = graph_pi1(P.base, root)
    tree = pi1.tree
    x, p = basepoint
    if not 0 <= p < P.fibre_size(x):
        raise InvariantError(f"basepoint {basepoint} is not a point of the torsor")
    p0 = P.path_map(tree.path_to_root(x), x)[p]
    phis, rhos = [], []
    for e in pi1.generator_edges:
        loop = tree.loop(e)
        hol_g = P.group.path_map(loop, root)
        phi = invert_map(hol_g)
        h = P.divide(root, p0, P.path_map(loop, root)[p0])
        grp = P.group.fibres[root]
        phis.append(phi)
        rhos.append(grp.inv(phi[h]))
    coeffs = PiGroup(pi1.presentation, P.group.fibres[root], tuple(phis))
    return Holonomy(pi1, coeffs, tuple(rhos), (x, p))


def descend_to_deck(hol: Holonomy, c: CoveringModel, coeffs: FinitePiGroup) -> tuple[int, ...]:
    """Full table of the deck-group crossed morphism whose pullback is ``hol``.

    Raises InvariantError when the holonomy does not factor through the deck group.
    """
    deck = cover_deck_presentation(c, hol.pi1.tree.root)
    if deck.pi1.generator_edges != hol.pi1.generator_edges:
        raise InvariantError("holonomy and deck data use different spanning trees")
    pi, M = c.deck, coeffs.M
    for k, f in enumerate(deck.images):
        if hol.coefficients.actions[k] != coeffs.phi[f]:
            raise InvariantError(f"loop {k} acts by an automorphism not induced by its deck element")
    values: list[int | None] = [None] * pi.order
    values[pi.identity] = M.identity
    queue = deque([pi.identity])
    while queue:
        f = queue.popleft()
        for k, step in enumerate(deck.images):
            g = pi.table[f][step]
            r = M.table[values[f]][coeffs.phi[f][hol.values[k]]]
            if values[g] is None:
                values[g] = r
                queue.append(g)
            elif values[g] != r:
                raise InvariantError("holonomy does not factor through the deck group")
    full = tuple(values)
    if not coeffs.is_crossed(full):
        raise InvariantError("descended holonomy is not a crossed morphism")
    return full


# -- fibre bundles, frames, associated and adjoint bundles --------------------

@dataclass(frozen=True)
class FibreBundleModel:
    """Flat bundle with fibre {0..size-1}: one permutation per edge."""

    base: Graph
    size: int
    transitions: tuple[Map, ...]

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(tuple(int(a) for a in t) for t in self.transitions))
        if len(self.transitions) != self.base.nedges:
            raise InvariantError("one transition per edge")
        for k, t in enumerate(self.transitions):
            if not _is_perm(t, self.size):
                raise InvariantError(f"transition on edge {k} is not a bijection of the fibre")

    def step_map(self, step: Step) -> Map:
        t = self.transitions[step[0]]
        return t if step[1] > 0 else invert_map(t)


def trivial_fibre_bundle(base: Graph, size: int) -> FibreBundleModel:
    return FibreBundleModel(base, size, (tuple(range(size)),) * base.nedges)


def all_fibre_bundles(base: Graph, size: int) -> list[FibreBundleModel]:
    perms = list(itertools.permutations(range(size)))
    return [FibreBundleModel(base, size, ts) for ts in itertools.product(perms, repeat=base.nedges)]


def fibre_bundle_isomorphisms(E: FibreBundleModel, F: FibreBundleModel) -> list[tuple[Map, ...]]:
    """Fibrewise bijections commuting with transitions (brute force per vertex)."""
    if E.base != F.base:
        raise InvariantError("bundles over different bases")
    if E.size != F.size:
        return []
    perms = list(itertools.permutations(range(E.size)))
    base = E.base
    n = base.nvertices
    checks: list[list[int]] = [[] for _ in range(n)]
    for k, (u, v) in enumerate(base.edges):
        checks[max(u, v)].append(k)
    chosen: list = [None] * n
    out = []

    def rec(x):
        if x == n:
            out.append(tuple(chosen))
            return
        for m in perms:
            chosen[x] = m
            if all(compose_maps(F.transitions[k], chosen[base.edges[k][0]])
                   == compose_maps(chosen[base.edges[k][1]], E.transitions[k]) for k in checks[x]):
                rec(x + 1)

    rec(0)
    return out


class _Perms:
    """Lexicographic permutations of {0..n-1}, matching symmetric_group(n) indices."""

    def __init__(self, n: int):
        self.group = symmetric_group(n)
        self.perms = list(itertools.permutations(range(n)))
        self.index = {p: i for i, p in enumerate(self.perms)}

    def conj(self, s: Map, i: int) -> int:
        return self.index[compose_maps(compose_maps(s, self.perms[i]), invert_map(s))]


def aut_bundle(E: FibreBundleModel) -> GroupCoveringModel:
    """Aut(E): fibres Sym(E_x), transport u -> s_e u s_e^-1."""
    P = _Perms(E.size)
    transports = tuple(tuple(P.conj(s, i) for i in range(len(P.perms))) for s in E.transitions)
    return GroupCoveringModel(E.base, (P.group,) * E.base.nvertices, transports)


def frame_bundle(E: FibreBundleModel, E2: FibreBundleModel) -> TorsorModel:
    """Fr(E2): bijections f: E_x -> E2_x, right action f.u = f o u, transport f -> s2 f s^-1."""
    if E.base != E2.base:
        raise InvariantError("bundles over different bases")
    if E.size != E2.size:
        raise InvariantError(
            f"fibres of sizes {E.size} and {E2.size} are not isomorphic: the frame bundle has empty fibres")
    P = _Perms(E.size)
    act_one = tuple(tuple(P.index[compose_maps(f, u)] for u in P.perms) for f in P.perms)
    transports = []
    for s, s2 in zip(E.transitions, E2.transitions):
        sinv = invert_map(s)
        transports.append(tuple(P.index[compose_maps(compose_maps(s2, f), sinv)] for f in P.perms))
    return TorsorModel(aut_bundle(E), (act_one,) * E.base.nvertices, tuple(transports))


def associated_bundle(P: TorsorModel, E: FibreBundleModel) -> FibreBundleModel:
    """P[E] = Aut(E) \\ (P x E) under u.(p, y) = (p.u^-1, u(y)).

    Orbits are materialized per fibre and labelled by y through the
    representative (p_0, y), p_0 the first point.
    """
    if P.group != aut_bundle(E):
        raise InvariantError("torsor is not under the automorphism bundle of E")
    perms = _Perms(E.size)
    grp = perms.group
    labels = []
    for x in range(E.base.nvertices):
        lab = {}
        for y in range(E.size):
            for u in range(grp.order):
                point = (P.act(x, 0, grp.inverse[u]), perms.perms[u][y])
                if point in lab:
                    raise InvariantError("structure group does not act freely on P x E")
                lab[point] = y
        labels.append(lab)
    transitions = []
    for k, (u, v) in enumerate(E.base.edges):
        t = P.transports[k]
        transitions.append(tuple(labels[v][(t[0], E.transitions[k][y])] for y in range(E.size)))
    return FibreBundleModel(E.base, E.size, tuple(transitions))


def adjoint_bundle(P: TorsorModel) -> GroupCoveringModel:
    """Ad(P) = P[G] under g.(p, h) = (p.g^-1, g h g^-1); orbit of (p_0, h) labelled h."""
    G = P.group
    labels = []
    for x, grp in enumerate(G.fibres):
        lab = {}
        for h in range(grp.order):
            for g in range(grp.order):
                point = (P.act(x, 0, grp.inverse[g]), grp.conj(g, h))
                if point in lab:
                    raise InvariantError("structure group does not act freely on P x G")
                lab[point] = h
        labels.append(lab)
    transports = []
    for k, (u, v) in enumerate(G.base.edges):
        t, tg = P.transports[k], G.transports[k]
        transports.append(tuple(labels[v][(t[0], tg[h])] for h in range(G.fibres[u].order)))
    return GroupCoveringModel(G.base, G.fibres, tuple(transports))


def _pointwise_group(sections: Sequence[tuple[int, ...]], fibres: Sequence[FiniteGroup], name: str
                     ) -> FiniteGroup:
    identity = tuple(f.identity for f in fibres)

    def mul(a, b):
        return tuple(f.table[x][y] for f, x, y in zip(fibres, a, b))

    return group_from_elements(sections, mul, identity, lambda s: str(list(s)), name)


def gauge_group(P: TorsorModel) -> FiniteGroup:
    """Global sections of Ad(P) under the pointwise product; labels are the section tuples."""
    ad = adjoint_bundle(P)
    return _pointwise_group(group_sections(ad), ad.fibres, "Gauge")


def automorphism_group(P: TorsorModel) -> tuple[FiniteGroup, list[tuple[Map, ...]]]:
    """Aut(P) under composition (a b = a o b), plus the automorphisms in group order."""
    autos = torsor_isomorphisms(P, P)
    identity = tuple(tuple(range(P.fibre_size(x))) for x in range(P.base.nvertices))

    def mul(a, b):
        return tuple(compose_maps(ma, mb) for ma, mb in zip(a, b))

    grp = group_from_elements(autos, mul, identity, lambda a: str([list(m) for m in a]), "Aut")
    ordered = [identity] + [a for a in autos if a != identity]
    return grp, ordered


def gauge_to_automorphism(P: TorsorModel, section: Sequence[int]) -> tuple[Map, ...]:
    """The section [(p_0, h_x)] acts by p_0.g -> p_0.h_x.g."""
    out = []
    for x, h in enumerate(section):
        grp = P.group.fibres[x]
        m = [0] * P.fibre_size(x)
        for g in range(grp.order):
            m[P.act(x, 0, g)] = P.act(x, 0, grp.table[h][g])
        out.append(tuple(m))
    return tuple(out)


def gauge_isomorphism(P: TorsorModel) -> GroupMorphism:
    """Explicit isomorphism gauge_group(P) -> automorphism_group(P), verified."""
    gauge = gauge_group(P)
    ad = adjoint_bundle(P)
    sections = [tuple(f.identity for f in ad.fibres)]
    sections += [s for s in group_sections(ad) if s != sections[0]]
    aut, autos = automorphism_group(P)
    index = {a: i for i, a in enumerate(autos)}
    image = []
    for s in sections:
        a = gauge_to_automorphism(P, s)
        if a not in index:
            raise InvariantError(f"section {s} does not give a torsor automorphism")
        image.append(index[a])
    morphism = GroupMorphism(gauge, aut, tuple(image))
    if not morphism.is_bijective():
        raise InvariantError("gauge map is not a bijection onto Aut(P)")
    return morphism


# -- round trips -------------------------------------------------------------

@dataclass(frozen=True)
class RoundTripReport:
    cocycles: int
    classes: int
    isomorphism_classes: int
    holonomy_ok: bool
    partition_ok: bool
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.holonomy_ok and self.partition_ok


def torsor_roundtrip(zeta: GroupCoveringModel, budget: int | None = None) -> RoundTripReport:
    """Build a torsor from every crossed morphism of the deck group, extract
    holonomy at every basepoint, and compare the isomorphism partition of the
    torsors with the H^1 orbit partition."""
    from .cohomology import h1_classes

    data = _require_provenance(zeta)
    coeffs = data.coefficients
    h1 = h1_classes(coeffs.coeffs, budget)
    torsors = []
    problems = []
    for values in h1.cocycles:
        P = build_torsor(zeta, coeffs.expand(values))
        torsors.append(P)
        expected = h1.class_of(values)
        for x in range(P.base.nvertices):
            for p in range(P.fibre_size(x)):
                hol = holonomy(P, (x, p))
                got = h1.class_of(coeffs.restrict(descend_to_deck(hol, data.covering, coeffs)))
                if got != expected:
                    problems.append(f"holonomy of torsor {values} at {(x, p)} left its class")
    holonomy_ok = not problems
    # isomorphism-reachability partition
    block = [-1] * len(torsors)
    nblocks = 0
    for i, P in enumerate(torsors):
        if block[i] != -1:
            continue
        block[i] = nblocks
        for j in range(i + 1, len(torsors)):
            if block[j] == -1 and are_isomorphic(P, torsors[j]):
                block[j] = nblocks
        nblocks += 1
    by_iso = sorted(sorted(i for i in range(len(torsors)) if block[i] == b) for b in range(nblocks))
    partition_ok = by_iso == sorted(list(o) for o in h1.orbits)
    if not partition_ok:
        problems.append("isomorphism partition differs from the H^1 orbit partition")
    return RoundTripReport(len(torsors), h1.class_count, nblocks, holonomy_ok, partition_ok,
                           tuple(problems))


@dataclass(frozen=True)
class FrameReport:
    torsor_roundtrip: bool  # Fr(P[E]) = P with P = Fr(E2)
    bundle_roundtrip: bool  # Fr(E2)[E] = E2


def frame_roundtrip(E: FibreBundleModel, E2: FibreBundleModel) -> FrameReport:
    P = frame_bundle(E, E2)
    PE = associated_bundle(P, E)
    return FrameReport(are_isomorphic(frame_bundle(E, PE), P), bool(fibre_bundle_isomorphisms(PE, E2)))


@dataclass(frozen=True)
class GaugeReport:
    gauge_order: int
    automorphism_order: int
    isomorphism: bool


def gauge_check(P: TorsorModel) -> GaugeReport:
    m = gauge_isomorphism(P)
    return GaugeReport(m.source.order, m.target.order, m.is_bijective())
