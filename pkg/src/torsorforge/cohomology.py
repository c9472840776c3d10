"""Crossed morphisms and nonabelian H^1 of finitely presented groups.

Conventions (used everywhere in the package):

* pi acts on the left on a finite group M by automorphisms, given per
  generator as image arrays.
* A crossed morphism satisfies rho(f1 f2) = rho(f1) * f1.rho(f2).
* m in M acts on crossed morphisms by (m . rho)(f) = m * rho(f) * (f.m)^-1;
  its orbit set is H^1.

The other common parametrisation, psi(f1 f2) = psi(f1)^(f2) * psi(f2) for a
right action, is related by rho(f) = f.psi(f); see ``psi_to_rho``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from ._config import resolve_budget
from ._search import CrossedChecker, HomChecker, search_assignments, search_size
from .errors import InvariantError, OracleMismatch
from .fpgroups import (CayleyPresentation, Presentation, Word, cayley_presentation,
                       evaluate_hom)
from .groups import (AutomorphismGroup, FiniteGroup, GroupMorphism, compose_maps,
                     enumerate_automorphisms, invert_map, is_automorphism,
                     semidirect_product)

Values = tuple[int, ...]


@dataclass(frozen=True)
class PiGroup:
    """A finite group M with an action of a presented group pi."""

    pi: Presentation
    M: FiniteGroup
    actions: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        acts = tuple(tuple(int(x) for x in a) for a in self.actions)
        object.__setattr__(self, "actions", acts)
        if len(acts) != self.pi.ngens:
            raise InvariantError(f"need one automorphism per generator ({self.pi.ngens}), got {len(acts)}")
        for k, a in enumerate(acts):
            if not is_automorphism(self.M, a):
                raise InvariantError(f"action of generator {self.pi.gen_name(k)} is not an automorphism")
        ident = tuple(range(self.M.order))
        for r in self.pi.relators:
            if self.word_action(r) != ident:
                raise InvariantError(
                    f"relator {self.pi.format_word(r)} does not act trivially: "
                    "action is not a morphism pi -> Aut(M)")

    @cached_property
    def inv_actions(self) -> tuple[tuple[int, ...], ...]:
        return tuple(invert_map(a) for a in self.actions)

    def letter_action(self, x: int) -> tuple[int, ...]:
        return self.actions[x - 1] if x > 0 else self.inv_actions[-x - 1]

    def word_action(self, w: Sequence[int]) -> tuple[int, ...]:
        """Image array of the automorphism by which the word acts."""
        acc = tuple(range(self.M.order))
        for x in w:
            acc = compose_maps(acc, self.letter_action(x))
        return acc

    def is_trivial(self) -> bool:
        ident = tuple(range(self.M.order))
        return all(a == ident for a in self.actions)

    @cached_property
    def checker(self) -> CrossedChecker:
        return CrossedChecker(self.M.table, self.M.inverse, self.actions, self.inv_actions)


def trivial_action(pi: Presentation, M: FiniteGroup) -> PiGroup:
    ident = tuple(range(M.order))
    return PiGroup(pi, M, (ident,) * pi.ngens)


def action_from_automorphisms(pi: Presentation, auts: AutomorphismGroup, indices: Sequence[int]) -> PiGroup:
    return PiGroup(pi, auts.base, tuple(auts.maps[k] for k in indices))


def extend_crossed(coeffs: PiGroup, values: Sequence[int], w: Sequence[int]) -> int:
    """rho(w) for the crossed morphism with the given generator values."""
    if len(values) != coeffs.pi.ngens:
        raise InvariantError("one value per generator")
    return coeffs.checker(tuple(w), values)


@dataclass(frozen=True, order=False)
class CrossedMorphism:
    coeffs: PiGroup
    values: Values

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.coeffs.pi.ngens or any(not 0 <= v < self.coeffs.M.order for v in vals):
            raise InvariantError("crossed morphism needs one M-element per generator")
        for r in self.coeffs.pi.relators:
            if self.coeffs.checker(r, vals) != self.coeffs.M.identity:
                raise InvariantError(
                    f"crossed-morphism relator check failed on {self.coeffs.pi.format_word(r)}")

    def __call__(self, w: Sequence[int]) -> int:
        return self.coeffs.checker(tuple(w), self.values)


def enumerate_crossed(coeffs: PiGroup, budget: int | None = None, workers: int = 1) -> list[CrossedMorphism]:
    """Z^1: every crossed morphism, in lexicographic order of generator values."""
    vals = _crossed_values(coeffs, budget, workers)
    return [CrossedMorphism(coeffs, v) for v in vals]


def _crossed_values(coeffs: PiGroup, budget, workers) -> list[Values]:
    cands = [tuple(range(coeffs.M.order))] * coeffs.pi.ngens
    return search_assignments(cands, coeffs.pi.relators, coeffs.checker, resolve_budget(budget), workers)


def _act_values(coeffs: PiGroup, m: int, values: Values) -> Values:
    t, inv = coeffs.M.table, coeffs.M.inverse
    return tuple(t[t[m][v]][inv[a[m]]] for v, a in zip(values, coeffs.actions))


def coboundary_act(m: int, rho: CrossedMorphism) -> CrossedMorphism:
    """(m . rho)(g) = m * rho(g) * (g.m)^-1 on each generator g."""
    return CrossedMorphism(rho.coeffs, _act_values(rho.coeffs, m, rho.values))


@dataclass(frozen=True)
class ClassificationResult:
    """Orbit partition of a list of cocycles (value tuples).

    ``orbits[i]`` lists cocycle indices, ``representatives[i]`` is the
    lexicographically smallest member of that orbit. Orbits are ordered by
    representative.
    """

    cocycles: tuple[Values, ...]
    orbits: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    search_size: int = 0

    @property
    def class_count(self) -> int:
        return len(self.orbits)

    @cached_property
    def _class_of(self) -> dict[Values, int]:
        out = {}
        for k, orbit in enumerate(self.orbits):
            for i in orbit:
                out[self.cocycles[i]] = k
        return out

    def class_of(self, values: Sequence[int]) -> int:
        try:
            return self._class_of[tuple(values)]
        except KeyError:
            raise InvariantError(f"{tuple(values)} is not among the classified cocycles") from None

    def representative_values(self) -> list[Values]:
        return [self.cocycles[i] for i in self.representatives]


def orbit_partition(cocycles: Sequence[Values], orbit_of) -> ClassificationResult:
    """Seed-and-saturate: ``orbit_of(values)`` returns the whole orbit as value tuples.

    Seeds are taken in list order, so sorted input gives minimal seeds.
    """
    index = {v: i for i, v in enumerate(cocycles)}
    seen = [False] * len(cocycles)
    orbits, reps = [], []
    for i, v in enumerate(cocycles):
        if seen[i]:
            continue
        members = set()
        for w in orbit_of(v):
            j = index.get(w)
            if j is None:
                raise InvariantError(f"coboundary action left the cocycle set: {v} -> {w}")
            members.add(j)
        for j in members:
            seen[j] = True
        orbit = tuple(sorted(members))
        orbits.append(orbit)
        reps.append(min(orbit, key=lambda j: cocycles[j]))
    order = sorted(range(len(orbits)), key=lambda k: cocycles[reps[k]])
    return ClassificationResult(tuple(cocycles), tuple(orbits[k] for k in order),
                                tuple(reps[k] for k in order))


def h1_classes(coeffs: PiGroup, budget: int | None = None, workers: int = 1) -> ClassificationResult:
    """H^1(pi, M) as the orbit set of the coboundary action on Z^1."""
    vals = _crossed_values(coeffs, budget, workers)
    M = coeffs.M
    result = orbit_partition(vals, lambda v: {_act_values(coeffs, m, v) for m in range(M.order)})
    size = search_size([range(M.order)] * coeffs.pi.ngens)
    return ClassificationResult(result.cocycles, result.orbits, result.representatives, size)


def classify_group_coverings(pi: Presentation, gamma: FiniteGroup, budget: int | None = None,
                             workers: int = 1) -> ClassificationResult:
    """Aut(Gamma) \\ Hom(pi, Aut(Gamma)): coverings with fibre Gamma up to isomorphism."""
    auts = enumerate_automorphisms(gamma)
    return h1_classes(trivial_action(pi, auts.as_group), budget, workers)


# -- mapped coefficients -----------------------------------------------------

def _maps_encode(values: Sequence[int], base: int) -> int:
    k = 0
    for v in values:
        k = k * base + v
    return k


def _maps_decode(k: int, base: int, length: int) -> list[int]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        k, out[i] = divmod(k, base)
    return out


def maps_group(S_size: int, gamma: FiniteGroup) -> FiniteGroup:
    """Maps(S, Gamma) under the pointwise product, alpha encoded base-|Gamma| (alpha(0) most significant)."""
    n = gamma.order
    total = n ** S_size
    from .groups import GENERATED_ORDER_LIMIT, FiniteGroup as _FG
    from .errors import CapacityError

    if total > GENERATED_ORDER_LIMIT:
        raise CapacityError(f"Maps(S, Gamma) has {total} elements (limit {GENERATED_ORDER_LIMIT})",
                            required=total)
    decoded = [_maps_decode(k, n, S_size) for k in range(total)]
    table = tuple(
        tuple(_maps_encode([gamma.table[x][y] for x, y in zip(a, b)], n) for b in decoded)
        for a in decoded
    )
    labels = tuple("(" + ",".join(gamma.label(x) for x in a) + ")" for a in decoded)
    return _FG(total, table, 0, labels, f"Maps({S_size},{gamma.name or gamma.order})",
               _verified=total > 256)


def mapped_coefficients(pi: Presentation, S_perms: Sequence[Sequence[int]], gamma: FiniteGroup,
                        gamma_actions: Sequence[Sequence[int]]) -> PiGroup:
    """Maps(S, Gamma) as a pi-group.

    ``S_perms[k]`` is how generator k permutes S (s -> g.s), and
    ``gamma_actions[k]`` is phi_g as an image array. Sections are twisted by
    alpha -> phi_g^-1 o alpha o g, a right action; the returned left action
    is its inverse-transpose, (g.alpha)(s) = phi_g(alpha(g^-1.s)).
    """
    size = len(S_perms[0]) if S_perms else 1
    M = maps_group(size, gamma)
    n = gamma.order
    actions = []
    for perm, phi in zip(S_perms, gamma_actions):
        perm = tuple(perm)
        if sorted(perm) != list(range(size)):
            raise InvariantError(f"{list(perm)} is not a permutation of S")
        pinv = invert_map(perm)
        img = []
        for k in range(M.order):
            alpha = _maps_decode(k, n, size)
            img.append(_maps_encode([phi[alpha[pinv[s]]] for s in range(size)], n))
        actions.append(tuple(img))
    return PiGroup(pi, M, tuple(actions))


def right_action_of(coeffs: PiGroup, x: int) -> tuple[int, ...]:
    """The right action alpha -> alpha^x matching a left pi-group: alpha^x = x^-1.alpha."""
    return coeffs.letter_action(-x)


def psi_to_rho(coeffs: PiGroup, psi_values: Sequence[int]) -> Values:
    """Convert generator values of a right-convention crossed morphism psi
    (psi(f1 f2) = psi(f1)^(f2) psi(f2)) to the left convention rho(g) = g.psi(g)."""
    return tuple(a[v] for v, a in zip(psi_values, coeffs.actions))


def rho_to_psi(coeffs: PiGroup, rho_values: Sequence[int]) -> Values:
    return tuple(a[v] for v, a in zip(rho_values, coeffs.inv_actions))


# -- semidirect oracle -------------------------------------------------------

@dataclass(frozen=True)
class SemidirectClassification:
    result: ClassificationResult  # cocycles are generator images in Gamma x| Q
    group: FiniteGroup  # Gamma x| Q, pairs (g, q) at g*|Q| + q
    quotient_order: int

    def to_crossed_values(self, values: Sequence[int]) -> Values:
        return tuple(v // self.quotient_order for v in values)


def h1_via_semidirect(pi: Presentation, gamma: FiniteGroup, Q: FiniteGroup,
                      quotient_images: Sequence[int], phi: GroupMorphism | Sequence[int],
                      auts: AutomorphismGroup | None = None, budget: int | None = None,
                      workers: int = 1) -> SemidirectClassification:
    """Classify homomorphisms pi -> Gamma x| Q lying over the quotient map, up to
    conjugation by Gamma.

    Independent of the crossed-morphism machinery: only plain homomorphism
    checks in the semidirect product are used.
    """
    if auts is None:
        auts = enumerate_automorphisms(gamma)
    quotient_images = tuple(int(q) for q in quotient_images)
    if len(quotient_images) != pi.ngens:
        raise InvariantError("quotient map needs one Q-element per generator")
    for r in pi.relators:
        if evaluate_hom(quotient_images, Q, r) != Q.identity:
            raise InvariantError(f"quotient map does not kill relator {pi.format_word(r)}")
    SD = semidirect_product(gamma, Q, phi, auts)
    nq = Q.order
    cands = [tuple(g * nq + q for g in range(gamma.order)) for q in quotient_images]
    checker = HomChecker(SD.table, SD.inverse)
    homs = search_assignments(cands, pi.relators, checker, resolve_budget(budget), workers)
    embedded = [g * nq for g in range(gamma.order)]

    def orbit_of(v):
        return {tuple(SD.conj(c, x) for x in v) for c in embedded}

    result = orbit_partition(homs, orbit_of)
    result = ClassificationResult(result.cocycles, result.orbits, result.representatives,
                                  search_size(cands))
    return SemidirectClassification(result, SD, nq)


def match_semidirect(direct: ClassificationResult, oracle: SemidirectClassification) -> dict[int, int]:
    """Map direct classes to oracle classes through rho -> (f -> (rho(f), fbar)).

    Raises OracleMismatch unless counts agree and representatives correspond
    exactly (the map is a bijection sending representatives to representatives).
    """
    if direct.class_count != oracle.result.class_count:
        raise OracleMismatch(
            f"semidirect {oracle.result.class_count} != direct {direct.class_count}")
    mapping = {}
    for k, rep in enumerate(oracle.result.representative_values()):
        rho = oracle.to_crossed_values(rep)
        j = direct.class_of(rho)
        if direct.representative_values()[j] != rho:
            raise OracleMismatch(f"representative {rho} of oracle class {k} is not canonical on the direct side")
        mapping[j] = k
    if len(mapping) != direct.class_count:
        raise OracleMismatch("oracle classes do not map onto direct classes bijectively")
    return mapping


def pigroup_for_quotient(pi: Presentation, gamma: FiniteGroup, quotient_images: Sequence[int],
                         phi: GroupMorphism, auts: AutomorphismGroup) -> PiGroup:
    """The PiGroup whose action is phi composed with the quotient map."""
    return PiGroup(pi, gamma, tuple(auts.maps[phi.image[q]] for q in quotient_images))


# -- finite pi ---------------------------------------------------------------

@dataclass(frozen=True)
class FinitePiGroup:
    """A finite group pi acting on M, presented through its Cayley graph so the
    presentation machinery applies. ``phi[f]`` is the image array of f."""

    cayley: CayleyPresentation
    M: FiniteGroup
    phi: tuple[tuple[int, ...], ...]
    coeffs: PiGroup

    @property
    def pi(self) -> FiniteGroup:
        return self.cayley.group

    def expand(self, values: Sequence[int]) -> Values:
        """Crossed-morphism values on every element of pi from generator values."""
        return tuple(self.coeffs.checker(w, tuple(values)) for w in self.cayley.normal_words)

    def restrict(self, full: Sequence[int]) -> Values:
        return tuple(full[g] for g in self.cayley.generators)

    def is_crossed(self, full: Sequence[int]) -> bool:
        """Check rho(fg) = rho(f) * phi_f(rho(g)) on the whole multiplication table."""
        pi, t = self.pi, self.M.table
        return all(full[pi.table[f][g]] == t[full[f]][self.phi[f][full[g]]]
                   for f in range(pi.order) for g in range(pi.order))


def finite_pi_group(pi: FiniteGroup, M: FiniteGroup, phi: Sequence[Sequence[int]]) -> FinitePiGroup:
    phi = tuple(tuple(a) for a in phi)
    if len(phi) != pi.order:
        raise InvariantError("phi must give one automorphism per element of pi")
    ident = tuple(range(M.order))
    if phi[pi.identity] != ident:
        raise InvariantError("phi(e) must be the identity automorphism")
    for f in range(pi.order):
        for g in range(pi.order):
            if phi[pi.table[f][g]] != compose_maps(phi[f], phi[g]):
                raise InvariantError(f"phi is not a morphism at ({f}, {g})")
    cay = cayley_presentation(pi)
    coeffs = PiGroup(cay.presentation, M, tuple(phi[g] for g in cay.generators))
    return FinitePiGroup(cay, M, phi, coeffs)


def morphism_to_maps(phi: GroupMorphism, auts: AutomorphismGroup) -> tuple[tuple[int, ...], ...]:
    """Per-element automorphism image arrays of a morphism into auts.as_group."""
    return tuple(auts.maps[k] for k in phi.image)


def orbit_closure(values: Values, coeffs: PiGroup) -> set[Values]:
    """Orbit by saturating under single elements; cross-check for h1_classes."""
    seen = {values}
    queue = deque([values])
    gens = coeffs.M.generators or (0,)
    while queue:
        v = queue.popleft()
        for m in gens:
            w = _act_values(coeffs, m, v)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen
