"""Finite groups as multiplication tables.

Every group is a dense table over element indices ``0 .. order-1`` with the
identity at index 0. Constructors for cyclic, symmetric, permutation, matrix
(over F_2, F_3, F_4, F_5) and product groups all produce this one shape, so
everything downstream works on plain integer tables.
"""

from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, NamedTuple, Sequence

import numpy as np

from ._config import resolve_budget
from .errors import CapacityError, InvariantError

ASSOCIATIVITY_CHECK_LIMIT = 256
AUTOMORPHISM_ORDER_LIMIT = 64
GENERATED_ORDER_LIMIT = 1000


@dataclass(frozen=True, eq=True)
class FiniteGroup:
    order: int
    table: tuple[tuple[int, ...], ...]
    identity: int = 0
    labels: tuple[str, ...] | None = field(default=None, compare=False)
    name: str = field(default="", compare=False)
    _verified: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if not self._verified:
            _validate_table(self.order, table, self.identity)

    # -- basic arithmetic -------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.order
        for a, row in enumerate(self.table):
            inv[a] = row.index(self.identity)
        return tuple(inv)

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, elements: Sequence[int]) -> int:
        acc = self.identity
        for x in elements:
            acc = self.table[acc][x]
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse[a], -k
        acc = self.identity
        for _ in range(k):
            acc = self.table[acc][a]
        return acc

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.table[self.table[g][x]][self.inverse[g]]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        return tuple(self.element_order(a) for a in range(self.order))

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or 'order'} {self.order})"

    __hash__ = object.__hash__

    # -- subgroups and generation -----------------------------------------

    def closure(self, gens: Sequence[int]) -> list[int]:
        """Elements of the subgroup generated by ``gens`` in BFS order."""
        seen = {self.identity}
        order = [self.identity]
        queue = deque(order)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    queue.append(y)
        return order

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small deterministic generating set (greedy by element index)."""
        gens: list[int] = []
        span = {self.identity}
        # prefer high-order elements: fewer generators, smaller search trees
        for a in sorted(range(self.order), key=lambda x: (-self.element_orders[x], x)):
            if a not in span:
                gens.append(a)
                span = set(self.closure(gens))
            if len(span) == self.order:
                break
        return tuple(gens)


def _validate_table(order: int, table, identity: int) -> None:
    if order < 1:
        raise InvariantError("group order must be positive")
    if len(table) != order or any(len(row) != order for row in table):
        raise InvariantError(f"table must be {order}x{order}")
    if identity != 0:
        raise InvariantError("identity must be element 0")
    for a, row in enumerate(table):
        for b, c in enumerate(row):
            if not 0 <= c < order:
                raise InvariantError(f"table not closed: {a}*{b} = {c} is out of range")
    for a in range(order):
        if table[identity][a] != a or table[a][identity] != a:
            raise InvariantError(f"element {identity} is not a two-sided identity (fails at {a})")
    for a in range(order):
        right = [b for b in range(order) if table[a][b] == identity]
        if len(right) != 1 or table[right[0]][a] != identity:
            raise InvariantError(f"element {a} has no two-sided inverse")
    if order <= ASSOCIATIVITY_CHECK_LIMIT:
        t = np.asarray(table, dtype=np.int32)
        lhs = t[t]  # lhs[a, b, c] = (ab)c
        rhs = t[np.arange(order)[:, None, None], t[None, :, :]]  # a(bc)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            a, b, c = (int(x) for x in bad[0])
            raise InvariantError(f"table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")


def group_from_table(table, labels=None, name: str = "") -> FiniteGroup:
    """Validate an explicit table. Tables over the associativity bound are refused."""
    order = len(table)
    if order > ASSOCIATIVITY_CHECK_LIMIT:
        raise CapacityError(
            f"explicit tables are limited to order {ASSOCIATIVITY_CHECK_LIMIT} (got {order})",
            required=order,
        )
    return FiniteGroup(order, tuple(tuple(r) for r in table), 0,
                       tuple(labels) if labels else None, name)


def group_from_elements(elements: Sequence[Hashable], mul: Callable, identity: Hashable,
                        label: Callable | None = None, name: str = "") -> FiniteGroup:
    """Tabulate a group given concrete elements and a product.

    The identity is moved to index 0, the rest keep their given order. Used
    for groups that are associative by construction (composition of maps);
    the exhaustive associativity check still runs up to the usual bound.
    """
    elems = [identity] + [e for e in elements if e != identity]
    if len(elems) > GENERATED_ORDER_LIMIT:
        raise CapacityError(f"group of order {len(elems)} exceeds {GENERATED_ORDER_LIMIT}",
                            required=len(elems))
    index = {e: i for i, e in enumerate(elems)}
    if len(index) != len(elems):
        raise InvariantError("duplicate elements")
    try:
        table = tuple(tuple(index[mul(a, b)] for b in elems) for a in elems)
    except KeyError as exc:
        raise InvariantError(f"product leaves the element set: {exc}") from None
    labels = tuple((label or str)(e) for e in elems)
    order = len(elems)
    if order <= ASSOCIATIVITY_CHECK_LIMIT:
        return FiniteGroup(order, table, 0, labels, name)
    # larger groups only arise from composition of maps, associative by construction
    _validate_table_cheap(order, table)
    return FiniteGroup(order, table, 0, labels, name, _verified=True)


def _validate_table_cheap(order, table):
    for a, row in enumerate(table):
        if sorted(row) != list(range(order)):
            raise InvariantError(f"row {a} is not a permutation")
    if list(table[0]) != list(range(order)):
        raise InvariantError("element 0 is not the identity")


# -- standard families ------------------------------------------------------

def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise InvariantError("cyclic group needs n >= 1")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(n, table, 0, tuple(str(a) for a in range(n)), f"Z{n}")


def _perm_label(p) -> str:
    return "[" + " ".join(map(str, p)) + "]"


def _compose(p, q):
    """(p q)(i) = p(q(i))"""
    return tuple(p[i] for i in q)


def symmetric_group(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise CapacityError(f"symmetric groups are supported for n <= 5 (got {n})", required=n)
    perms = list(itertools.permutations(range(n)))
    return group_from_elements(perms, _compose, tuple(range(n)), _perm_label, f"S{n}")


def permutation_group(generators: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        return cyclic_group(1)
    n = len(gens[0])
    for g in gens:
        if len(g) != n or sorted(g) != list(range(n)):
            raise InvariantError(f"{list(g)} is not a permutation of 0..{n - 1}")
    identity = tuple(range(n))
    elems = _bfs_closure(identity, gens, _compose)
    return group_from_elements(elems, _compose, identity, _perm_label, name or "perm")


def _bfs_closure(identity, gens, mul):
    seen = {identity}
    out = [identity]
    queue = deque(out)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
                if len(out) > GENERATED_ORDER_LIMIT:
                    raise CapacityError(f"generated group exceeds {GENERATED_ORDER_LIMIT} elements",
                                        required=len(out))
    return out


def direct_product(A: FiniteGroup, B: FiniteGroup) -> FiniteGroup:
    """Pairs (a, b) at index a*|B| + b."""
    nb = B.order
    elems = [(a, b) for a in range(A.order) for b in range(nb)]
    table = tuple(
        tuple(A.table[a1][a2] * nb + B.table[b1][b2] for (a2, b2) in elems)
        for (a1, b1) in elems
    )
    labels = tuple(f"({A.label(a)},{B.label(b)})" for a, b in elems)
    order = len(elems)
    name = f"{A.name or A.order}x{B.name or B.order}"
    return FiniteGroup(order, table, 0, labels, name, _verified=order > ASSOCIATIVITY_CHECK_LIMIT)


# -- finite fields and matrix groups -----------------------------------------

class FiniteField:
    """F_q for q in {2, 3, 4, 5}. F_4 = F_2[w]/(w^2 + w + 1), elements as bit pairs."""

    SUPPORTED = (2, 3, 4, 5)

    def __init__(self, q: int):
        if q not in self.SUPPORTED:
            raise CapacityError(f"field size {q} not supported (use one of {self.SUPPORTED})", required=q)
        self.q = q
        if q == 4:
            self.add_table = [[a ^ b for b in range(4)] for a in range(4)]
            mul = [[0] * 4 for _ in range(4)]
            for a in range(4):
                for b in range(4):
                    # carry-less product then reduce w^2 -> w + 1
                    p = 0
                    for i in range(2):
                        if (b >> i) & 1:
                            p ^= a << i
                    if p & 4:
                        p ^= 0b111
                    mul[a][b] = p
            self.mul_table = mul
        else:
            self.add_table = [[(a + b) % q for b in range(q)] for a in range(q)]
            self.mul_table = [[(a * b) % q for b in range(q)] for a in range(q)]
        self.neg = [self.add_table[a].index(0) for a in range(q)]
        self.units = list(range(1, q))

    def add(self, a, b):
        return self.add_table[a][b]

    def sub(self, a, b):
        return self.add_table[a][self.neg[b]]

    def mul(self, a, b):
        return self.mul_table[a][b]


def _mat_mul(F: FiniteField, n: int, A, B):
    out = []
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s = F.add(s, F.mul(A[i * n + k], B[k * n + j]))
            out.append(s)
    return tuple(out)


def _det(F: FiniteField, n: int, A) -> int:
    if n == 1:
        return A[0]
    if n == 2:
        return F.sub(F.mul(A[0], A[3]), F.mul(A[1], A[2]))
    raise CapacityError("matrix groups are supported for n <= 2", required=n)


def _mat_label(n):
    def label(A):
        return "[" + ";".join(" ".join(map(str, A[i * n:(i + 1) * n])) for i in range(n)) + "]"
    return label


def _identity_matrix(n):
    return tuple(1 if i == j else 0 for i in range(n) for j in range(n))


def _check_matrix_args(n, q):
    if not 1 <= n <= 2:
        raise CapacityError(f"matrix groups are supported for n <= 2 (got {n})", required=n)
    return FiniteField(q)


def general_linear_group(n: int, q: int) -> FiniteGroup:
    """GL(n, F_q): identity first, then all invertible matrices in lexicographic order."""
    F = _check_matrix_args(n, q)
    mats = [A for A in itertools.product(range(q), repeat=n * n) if _det(F, n, A) != 0]
    return group_from_elements(mats, lambda A, B: _mat_mul(F, n, A, B), _identity_matrix(n),
                               _mat_label(n), f"GL({n},{q})")


def matrix_group(generators: Sequence[Sequence[Sequence[int]]], q: int, name: str = "") -> FiniteGroup:
    """Subgroup of GL(n, F_q) generated by the given matrices (lists of rows)."""
    if not generators:
        return cyclic_group(1)
    n = len(generators[0])
    F = _check_matrix_args(n, q)
    gens = []
    for G in generators:
        if len(G) != n or any(len(row) != n for row in G):
            raise InvariantError("generator matrices must all be n x n")
        flat = tuple(int(x) for row in G for x in row)
        if any(not 0 <= x < q for x in flat):
            raise InvariantError(f"matrix entries must lie in 0..{q - 1}")
        if _det(F, n, flat) == 0:
            raise InvariantError(f"generator {G} is singular over F_{q}")
        gens.append(flat)
    mul = lambda A, B: _mat_mul(F, n, A, B)  # noqa: E731
    elems = _bfs_closure(_identity_matrix(n), gens, mul)
    return group_from_elements(elems, mul, _identity_matrix(n), _mat_label(n), name or f"<mat over F{q}>")


def unit_group(q: int) -> FiniteGroup:
    """F_q^* with 1 at index 0 and the other units in increasing order."""
    F = FiniteField(q)
    return group_from_elements(F.units, F.mul, 1, str, f"F{q}*")


# -- morphisms ---------------------------------------------------------------

@dataclass(frozen=True)
class GroupMorphism:
    source: FiniteGroup
    target: FiniteGroup
    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", image)
        S, T = self.source, self.target
        if len(image) != S.order:
            raise InvariantError("morphism image must list one target element per source element")
        if any(not 0 <= x < T.order for x in image):
            raise InvariantError("morphism image leaves the target group")
        if image[S.identity] != T.identity:
            raise InvariantError("morphism does not send identity to identity")
        for a in range(S.order):
            ia = image[a]
            row = S.table[a]
            trow = T.table[ia]
            for b in range(S.order):
                if image[row[b]] != trow[image[b]]:
                    raise InvariantError(f"not a morphism: f({a}*{b}) != f({a})*f({b})")

    def __call__(self, a: int) -> int:
        return self.image[a]

    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.source.order == self.target.order

    def kernel(self) -> list[int]:
        return [a for a, x in enumerate(self.image) if x == self.target.identity]

    def image_set(self) -> list[int]:
        return sorted(set(self.image))


def extend_to_morphism(G: FiniteGroup, H: FiniteGroup, gens: Sequence[int],
                       images: Sequence[int]) -> tuple[int, ...] | None:
    """Extend generator images to a morphism G -> H, or None if inconsistent.

    ``gens`` must generate G. Checks f(x g) = f(x) f(g) for every element x
    and generator g, which forces multiplicativity on all of G.
    """
    img = [-1] * G.order
    img[G.identity] = H.identity
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        fx = img[x]
        for g, h in zip(gens, images):
            y = G.table[x][g]
            fy = H.table[fx][h]
            if img[y] < 0:
                img[y] = fy
                queue.append(y)
            elif img[y] != fy:
                return None
    if min(img) < 0:
        raise InvariantError("given elements do not generate the group")
    return tuple(img)


def subgroup(G: FiniteGroup, elements: Sequence[int], name: str = "") -> tuple[FiniteGroup, GroupMorphism]:
    """Subgroup on the given (closed) element set, ordered by index, with its inclusion."""
    elems = sorted(set(elements))
    if elems[0] != G.identity:
        raise InvariantError("subgroup must contain the identity")
    index = {e: i for i, e in enumerate(elems)}
    try:
        table = tuple(tuple(index[G.table[a][b]] for b in elems) for a in elems)
    except KeyError:
        raise InvariantError("element set is not closed under the product") from None
    labels = tuple(G.label(e) for e in elems)
    H = FiniteGroup(len(elems), table, 0, labels, name, _verified=len(elems) > ASSOCIATIVITY_CHECK_LIMIT)
    return H, GroupMorphism(H, G, tuple(elems))


# -- automorphisms -----------------------------------------------------------

@dataclass(frozen=True)
class AutomorphismGroup:
    base: FiniteGroup
    maps: tuple[tuple[int, ...], ...]
    as_group: FiniteGroup

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {m: i for i, m in enumerate(self.maps)}

    @property
    def elements(self) -> list[GroupMorphism]:
        return [GroupMorphism(self.base, self.base, m) for m in self.maps]

    def index(self, image: Sequence[int]) -> int:
        try:
            return self._index[tuple(image)]
        except KeyError:
            raise InvariantError(f"{list(image)} is not an automorphism of the base group") from None

    def apply(self, k: int, x: int) -> int:
        return self.maps[k][x]

    def inner(self, g: int) -> int:
        G = self.base
        return self.index(tuple(G.conj(g, x) for x in range(G.order)))

    def inversion(self) -> int:
        """Index of x -> x^-1 (only an automorphism for abelian groups)."""
        return self.index(self.base.inverse)

    def __len__(self):
        return len(self.maps)

    __hash__ = object.__hash__


def compose_maps(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """f after g."""
    return tuple(f[x] for x in g)


def invert_map(f: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(f)
    for x, y in enumerate(f):
        inv[y] = x
    return tuple(inv)


def is_automorphism(G: FiniteGroup, f: Sequence[int]) -> bool:
    if len(f) != G.order or sorted(f) != list(range(G.order)):
        return False
    t = G.table
    return all(f[t[a][b]] == t[f[a]][f[b]] for a in range(G.order) for b in range(G.order))


def _morphism_search(G: FiniteGroup, H: FiniteGroup, bijective: bool, budget: int | None,
                     first_only: bool = False):
    gens = G.generators
    cands = [[h for h in range(H.order) if H.element_orders[h] == G.element_orders[g]]
             if bijective else list(range(H.order)) for g in gens]
    size = 1
    for c in cands:
        size *= len(c)
    limit = resolve_budget(budget)
    if size > limit:
        raise CapacityError(f"morphism search needs {size} candidates (budget {limit})", required=size)
    found = []
    for images in itertools.product(*cands):
        if bijective and len(set(images)) != len(images):
            continue
        img = extend_to_morphism(G, H, gens, images)
        if img is None:
            continue
        if bijective and len(set(img)) != H.order:
            continue
        found.append(img)
        if first_only:
            break
    return found


def enumerate_automorphisms(G: FiniteGroup, budget: int | None = None) -> AutomorphismGroup:
    """All automorphisms of G, sorted lexicographically by image array.

    The identity map is lexicographically smallest, so it lands at index 0
    of the composition table.
    """
    if G.order > AUTOMORPHISM_ORDER_LIMIT:
        raise CapacityError(f"automorphism enumeration is limited to order {AUTOMORPHISM_ORDER_LIMIT}",
                            required=G.order)
    maps = sorted(_morphism_search(G, G, True, budget))
    if len(maps) > GENERATED_ORDER_LIMIT:
        raise CapacityError(f"Aut has {len(maps)} elements; composition tables are limited to "
                            f"{GENERATED_ORDER_LIMIT}", required=len(maps))
    index = {m: i for i, m in enumerate(maps)}
    table = tuple(tuple(index[compose_maps(f, g)] for g in maps) for f in maps)
    labels = tuple(_perm_label(m) for m in maps)
    A = FiniteGroup(len(maps), table, 0, labels, f"Aut({G.name or G.order})")
    return AutomorphismGroup(G, tuple(maps), A)


def find_isomorphism(G: FiniteGroup, H: FiniteGroup, budget: int | None = None) -> GroupMorphism | None:
    """Brute-force isomorphism search with generator-image pruning (exponential)."""
    if G.order != H.order or sorted(G.element_orders) != sorted(H.element_orders):
        return None
    found = _morphism_search(G, H, True, budget, first_only=True)
    return GroupMorphism(G, H, found[0]) if found else None


def semidirect_product(N: FiniteGroup, Q: FiniteGroup, act: GroupMorphism | Sequence[int],
                       auts: AutomorphismGroup | None = None) -> FiniteGroup:
    """N x| Q on pairs (n, q) at index n*|Q| + q.

    ``act`` maps Q into ``auts.as_group`` (default: enumerate_automorphisms(N));
    the product is (n1, q1)(n2, q2) = (n1 * act(q1)(n2), q1 q2).
    """
    if auts is None:
        auts = enumerate_automorphisms(N)
    if not isinstance(act, GroupMorphism):
        act = GroupMorphism(Q, auts.as_group, tuple(act))
    elif act.target.order != auts.as_group.order or act.target.table != auts.as_group.table:
        raise InvariantError("action must land in the automorphism group of N")
    nq = Q.order
    maps = [auts.maps[act.image[q]] for q in range(nq)]
    elems = [(n, q) for n in range(N.order) for q in range(nq)]
    table = tuple(
        tuple(N.table[n1][maps[q1][n2]] * nq + Q.table[q1][q2] for (n2, q2) in elems)
        for (n1, q1) in elems
    )
    labels = tuple(f"({N.label(n)},{Q.label(q)})" for n, q in elems)
    order = len(elems)
    return FiniteGroup(order, table, 0, labels, f"{N.name or N.order}x|{Q.name or Q.order}",
                       _verified=order > ASSOCIATIVITY_CHECK_LIMIT)


def semidirect_projection(SD: FiniteGroup, Q: FiniteGroup) -> GroupMorphism:
    """pr_2 : N x| Q -> Q."""
    return GroupMorphism(SD, Q, tuple(x % Q.order for x in range(SD.order)))


class DeterminantData(NamedTuple):
    det: GroupMorphism  # GL(n, q) -> F_q^*
    sl: FiniteGroup
    inclusion: GroupMorphism  # SL -> GL


def determinant_morphism(n: int, q: int) -> DeterminantData:
    F = _check_matrix_args(n, q)
    GL = general_linear_group(n, q)
    units = unit_group(q)
    unit_index = {int(units.label(i)): i for i in range(units.order)}
    mats = [_parse_flat(GL.label(a)) for a in range(GL.order)]
    det = GroupMorphism(GL, units, tuple(unit_index[_det(F, n, A)] for A in mats))
    SL, inc = subgroup(GL, det.kernel(), f"SL({n},{q})")
    return DeterminantData(det, SL, inc)


def _parse_flat(label: str) -> tuple[int, ...]:
    return tuple(int(x) for x in label.strip("[]").replace(";", " ").split())


def conjugacy_classes(G: FiniteGroup) -> list[list[int]]:
    seen = [False] * G.order
    classes = []
    for a in range(G.order):
        if seen[a]:
            continue
        cls = sorted({G.conj(g, a) for g in range(G.order)})
        for x in cls:
            seen[x] = True
        classes.append(cls)
    return classes


def centralizer(G: FiniteGroup, a: int) -> list[int]:
    return [g for g in range(G.order) if G.table[g][a] == G.table[a][g]]


# -- text specs --------------------------------------------------------------

_SIMPLE = re.compile(r"^(cyclic|symmetric)\s+(\d+)$")
_MATRIX = re.compile(r"^(gl|sl)\s+(\d+)\s+(\d+)$")


def build_group(spec: str) -> FiniteGroup:
    """Build a group from its text spec.

    Grammar::

        cyclic N | symmetric N | gl N Q | sl N Q
        product(<spec>, <spec>)
        table [[row], [row], ...]           explicit table, identity at 0
        perm [[images], [images], ...]      permutation generators
        mat Q [[[r], [r]], [[r], [r]], ...] matrix generators over F_Q
    """
    s = spec.strip()
    if m := _SIMPLE.match(s):
        kind, n = m.group(1), int(m.group(2))
        return cyclic_group(n) if kind == "cyclic" else symmetric_group(n)
    if m := _MATRIX.match(s):
        kind, n, q = m.group(1), int(m.group(2)), int(m.group(3))
        if kind == "gl":
            return general_linear_group(n, q)
        return determinant_morphism(n, q).sl
    if s.startswith("product(") and s.endswith(")"):
        left, right = _split_top_level(s[len("product("):-1])
        return direct_product(build_group(left), build_group(right))
    if s.startswith("table"):
        return group_from_table(_json(s[len("table"):]), name="table")
    if s.startswith("perm"):
        return permutation_group(_json(s[len("perm"):]))
    if s.startswith("mat"):
        rest = s[len("mat"):].strip()
        q_text, _, body = rest.partition(" ")
        return matrix_group(_json(body), int(q_text))
    raise InvariantError(f"unrecognised group spec: {spec!r}")


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvariantError(f"bad bracket list {text.strip()!r}: {exc}") from None


def _split_top_level(body: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1:]
    raise InvariantError(f"product needs two comma-separated specs: {body!r}")
