"""Line-oriented scenario files.

::

    torsorforge v1
    group G cyclic 3
    presentation P gens s; rel s s;
    action phi on G via P gen s: inv
    classify torsors P phi

Directives (one per line, ``#`` starts a comment):

* ``group <name> <group-spec>`` (see ``groups.build_group``)
* ``presentation <name> gens ...; rel ...;``
* ``action <name> on <group> via <presentation> gen <g>: <aut-spec>[; gen ...]``
  (repeatable; unset generators act trivially)
* ``nerve <name> patches N; overlap i j; triple i j k;``
* ``twist <nerve> i j <aut-spec>`` (resolved against the group of each cech request)
* ``graph <name> cycle N | bouquet K | theta | path N | vertices N edges u-v ...``
* ``cover <name> base <graph> deck <group> [total] voltages a b ...``
* ``phi <name> on <group> via <cover> elem <f>: <aut-spec>[; elem ...]``
  (values on deck elements, extended to a morphism)
* ``bundle <name> base <graph> fibre-size N`` and ``transition <bundle> <edge> <perm>``
* ``classify torsors <presentation> <action|group>``,
  ``classify coverings <presentation> <group>``, ``classify cech <nerve> <group>``,
  ``classify bundle <cover> <group> [<phi>]``, ``classify frame <bundle> <bundle>``

Aut-specs: ``id``, ``inv``, ``aut K`` (index into the sorted automorphism
list), ``map [..]`` (image array), ``conj G`` (inner automorphism).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .bundles import CoveringModel, FibreBundleModel, build_group_covering, voltage_cover
from .cech import Nerve, check_twist, parse_nerve
from .cohomology import PiGroup
from .errors import TorsorForgeError
from .fpgroups import Presentation, parse_presentation
from .graphs import Graph
from .groups import (AutomorphismGroup, FiniteGroup, build_group, enumerate_automorphisms,
                     extend_to_morphism, is_automorphism)

HEADER = "torsorforge v1"

# diagnostic codes
UNKNOWN_DIRECTIVE = "E101"
SYNTAX = "E102"
DANGLING_REFERENCE = "E103"
DUPLICATE_NAME = "E104"
INVARIANT = "E105"


class ScenarioError(TorsorForgeError):
    def __init__(self, code: str, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: [{code}] {message}")
        self.code = code
        self.line = line
        self.column = column
        self.detail = message


@dataclass
class Request:
    kind: str
    refs: tuple[str, ...]
    line: int
    source: str = ""
    target: Any = None  # resolved inputs, shape depends on kind


@dataclass
class Scenario:
    text: str = ""
    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    presentations: dict[str, Presentation] = field(default_factory=dict)
    actions: dict[str, PiGroup] = field(default_factory=dict)
    nerves: dict[str, Nerve] = field(default_factory=dict)
    twists: dict[str, list] = field(default_factory=dict)
    graphs: dict[str, Graph] = field(default_factory=dict)
    covers: dict[str, CoveringModel] = field(default_factory=dict)
    phis: dict[str, tuple] = field(default_factory=dict)
    bundles: dict[str, FibreBundleModel] = field(default_factory=dict)
    requests: list[Request] = field(default_factory=list)


_KINDS = {"torsors": 2, "coverings": 2, "cech": 2, "bundle": (2, 3), "frame": 2}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.sc = Scenario(text=text)
        self.auts: dict[str, AutomorphismGroup] = {}
        self.pending_actions: dict[str, dict] = {}
        self.pending_phis: dict[str, dict] = {}
        self.pending_bundles: dict[str, dict] = {}
        self.line = 0
        self.raw = ""

    # -- helpers
    def fail(self, code: str, message: str, token: str | None = None):
        col = 1
        if token:
            pos = self.raw.find(token)
            col = pos + 1 if pos >= 0 else 1
        raise ScenarioError(code, self.line, col, message)

    def guard(self, code, fn, *args, token=None):
        try:
            return fn(*args)
        except ScenarioError:
            raise
        except TorsorForgeError as exc:
            self.fail(code, str(exc), token)

    def lookup(self, table: dict, name: str, what: str):
        if name not in table:
            self.fail(DANGLING_REFERENCE, f"{what} {name!r} is not declared", name)
        return table[name]

    def fresh(self, name: str):
        for table in (self.sc.groups, self.sc.presentations, self.sc.nerves, self.sc.graphs,
                      self.sc.covers, self.pending_actions, self.pending_phis, self.pending_bundles):
            if name in table:
                self.fail(DUPLICATE_NAME, f"name {name!r} is already declared", name)
        if not re.fullmatch(r"[A-Za-z_][\w.-]*", name):
            self.fail(SYNTAX, f"bad name {name!r}", name)

    def automorphisms(self, gname: str) -> AutomorphismGroup:
        if gname not in self.auts:
            G = self.sc.groups[gname]
            self.auts[gname] = self.guard(INVARIANT, enumerate_automorphisms, G, token=gname)
        return self.auts[gname]

    def aut_spec(self, gname: str, spec: str) -> tuple[int, ...]:
        G = self.sc.groups[gname]
        words = spec.split(None, 1)
        if not words:
            self.fail(SYNTAX, "empty automorphism spec")
        head, rest = words[0], (words[1] if len(words) > 1 else "")
        if head == "id" and not rest:
            return tuple(range(G.order))
        if head == "inv" and not rest:
            if not G.is_abelian():
                self.fail(INVARIANT, f"inversion is not an automorphism of nonabelian group {gname}", head)
            return G.inverse
        if head == "aut":
            auts = self.automorphisms(gname)
            k = self.integer(rest)
            if not 0 <= k < len(auts):
                self.fail(INVARIANT, f"automorphism index {k} out of range (|Aut| = {len(auts)})", rest)
            return auts.maps[k]
        if head == "conj":
            g = self.integer(rest)
            if not 0 <= g < G.order:
                self.fail(INVARIANT, f"element {g} not in group {gname}", rest)
            return tuple(G.conj(g, x) for x in range(G.order))
        if head == "map":
            image = self.int_list(rest)
            if not is_automorphism(G, image):
                self.fail(INVARIANT, f"{list(image)} is not an automorphism of {gname}", rest)
            return image
        self.fail(SYNTAX, f"unknown automorphism spec {spec!r}", head)

    def integer(self, tok: str) -> int:
        try:
            return int(tok.strip())
        except ValueError:
            self.fail(SYNTAX, f"expected an integer, got {tok.strip()!r}", tok.strip() or None)

    def int_list(self, text: str) -> tuple[int, ...]:
        text = text.strip()
        try:
            vals = json.loads(text) if text.startswith("[") else [int(t) for t in text.split()]
            return tuple(int(v) for v in vals)
        except (ValueError, TypeError):
            self.fail(SYNTAX, f"expected a list of integers, got {text!r}", text or None)

    # -- directives
    def parse(self) -> Scenario:
        seen_header = False
        for number, raw in enumerate(self.text.splitlines(), start=1):
            self.line, self.raw = number, raw
            body = raw.split("#", 1)[0].strip()
            if not body:
                continue
            if not seen_header:
                if body != HEADER:
                    self.fail(SYNTAX, f"expected header {HEADER!r}")
                seen_header = True
                continue
            head, _, rest = body.partition(" ")
            handler = getattr(self, "d_" + head.replace("-", "_"), None)
            if handler is None:
                self.fail(UNKNOWN_DIRECTIVE, f"unknown directive {head!r}", head)
            handler(rest.strip())
        self.finish()
        return self.sc

    def d_group(self, rest):
        name, _, spec = rest.partition(" ")
        self.fresh(name)
        if not spec.strip():
            self.fail(SYNTAX, "expected 'group <name> <group-spec>'")
        self.sc.groups[name] = self.guard(INVARIANT, build_group, spec.strip(), token=spec.strip())

    def d_presentation(self, rest):
        name, _, spec = rest.partition(" ")
        self.fresh(name)
        self.sc.presentations[name] = self.guard(SYNTAX, parse_presentation, spec, token=spec or None)

    _ACTION = re.compile(r"^(?:(?P<name>\S+)\s+)?on\s+(?P<group>\S+)\s+(?:(?:via\s+(?P<pres>\S+)\s+)?(?:gen|by)\s+)(?P<clauses>.*)$")

    def d_action(self, rest):
        m = self._ACTION.match(rest)
        if not m:
            self.fail(SYNTAX, "expected 'action <name> on <group> via <presentation> gen <g>: <aut-spec>'")
        gname = m.group("group")
        self.lookup(self.sc.groups, gname, "group")
        pname = m.group("pres")
        if pname is None:
            if len(self.sc.presentations) != 1:
                gen = m.group("clauses").split(":", 1)[0].strip()
                self.fail(DANGLING_REFERENCE, f"generator {gen!r} refers to no declared presentation", gen)
            pname = next(iter(self.sc.presentations))
        P = self.lookup(self.sc.presentations, pname, "presentation")
        name = m.group("name") or f"{gname}.{pname}"
        entry = self.pending_actions.get(name)
        if entry is None:
            self.fresh(name)
            entry = self.pending_actions[name] = {"group": gname, "pres": pname, "line": self.line,
                                                  "values": {}}
        elif (entry["group"], entry["pres"]) != (gname, pname):
            self.fail(INVARIANT, f"action {name!r} was declared on a different group or presentation", name)
        names = list(P.names or [P.gen_name(k) for k in range(P.ngens)])
        for clause in re.split(r";\s*(?:gen\s+)?", m.group("clauses")):
            if not clause.strip():
                continue
            gen, sep, spec = clause.partition(":")
            gen = gen.strip()
            if not sep:
                self.fail(SYNTAX, f"expected '<generator>: <aut-spec>' in {clause.strip()!r}")
            if gen not in names:
                self.fail(DANGLING_REFERENCE, f"presentation {pname} has no generator {gen!r}", gen)
            entry["values"][names.index(gen)] = self.aut_spec(gname, spec.strip())

    def d_nerve(self, rest):
        name, _, spec = rest.partition(" ")
        self.fresh(name)
        self.sc.nerves[name] = self.guard(INVARIANT, parse_nerve, spec, token=spec or None)
        self.sc.twists[name] = []

    def d_twist(self, rest):
        parts = rest.split(None, 3)
        if len(parts) != 4:
            self.fail(SYNTAX, "expected 'twist <nerve> i j <aut-spec>'")
        nerve = self.lookup(self.sc.nerves, parts[0], "nerve")
        i, j = self.integer(parts[1]), self.integer(parts[2])
        self.guard(DANGLING_REFERENCE, nerve.edge, i, j, token=parts[1])
        self.sc.twists[parts[0]].append((i, j, parts[3], self.line, self.raw))

    def d_graph(self, rest):
        name, _, spec = rest.partition(" ")
        self.fresh(name)
        words = spec.split()
        if not words:
            self.fail(SYNTAX, "empty graph spec")
        kind = words[0]
        if kind in ("cycle", "bouquet", "path") and len(words) == 2:
            n = self.integer(words[1])
            g = self.guard(INVARIANT, getattr(Graph, kind), n, token=words[1])
        elif kind == "theta" and len(words) == 1:
            g = Graph.theta()
        elif kind == "vertices" and len(words) >= 3 and words[2] == "edges":
            n = self.integer(words[1])
            edges = []
            for tok in words[3:]:
                u, sep, v = tok.partition("-")
                if not sep:
                    self.fail(SYNTAX, f"edge {tok!r} should look like u-v", tok)
                edges.append((self.integer(u), self.integer(v)))
            g = self.guard(INVARIANT, Graph, n, tuple(edges), token=name)
        else:
            self.fail(SYNTAX, f"unknown graph spec {spec!r}", kind)
        if not g.is_connected():
            self.fail(INVARIANT, f"graph {name} is disconnected", name)
        self.sc.graphs[name] = g

    _COVER = re.compile(r"^(\S+)\s+base\s+(\S+)\s+deck\s+(\S+)\s+(?:total\s+)?voltages\s*(.*)$")

    def d_cover(self, rest):
        m = self._COVER.match(rest)
        if not m:
            self.fail(SYNTAX, "expected 'cover <name> base <graph> deck <group> total voltages ...'")
        name, gname, dname, volts = m.groups()
        self.fresh(name)
        X = self.lookup(self.sc.graphs, gname, "graph")
        D = self.lookup(self.sc.groups, dname, "group")
        voltages = self.int_list(volts)
        if any(not 0 <= a < D.order for a in voltages):
            self.fail(INVARIANT, f"voltage outside deck group {dname}", volts)
        self.sc.covers[name] = self.guard(INVARIANT, voltage_cover, X, D, voltages, token=name)

    _PHI = re.compile(r"^(\S+)\s+on\s+(\S+)\s+via\s+(\S+)\s+elem\s+(.*)$")

    def d_phi(self, rest):
        m = self._PHI.match(rest)
        if not m:
            self.fail(SYNTAX, "expected 'phi <name> on <group> via <cover> elem <f>: <aut-spec>'")
        name, gname, cname, clauses = m.groups()
        self.lookup(self.sc.groups, gname, "group")
        cover = self.lookup(self.sc.covers, cname, "cover")
        entry = self.pending_phis.get(name)
        if entry is None:
            self.fresh(name)
            entry = self.pending_phis[name] = {"group": gname, "cover": cname, "line": self.line,
                                               "raw": self.raw, "values": {}}
        for clause in re.split(r";\s*(?:elem\s+)?", clauses):
            if not clause.strip():
                continue
            f, sep, spec = clause.partition(":")
            if not sep:
                self.fail(SYNTAX, f"expected '<element>: <aut-spec>' in {clause.strip()!r}")
            f = self.integer(f)
            if not 0 <= f < cover.deck.order:
                self.fail(DANGLING_REFERENCE, f"deck group of {cname} has no element {f}", str(f))
            entry["values"][f] = self.aut_spec(gname, spec.strip())

    _BUNDLE = re.compile(r"^(\S+)\s+base\s+(\S+)\s+fibre-size\s+(\d+)$")

    def d_bundle(self, rest):
        m = self._BUNDLE.match(rest)
        if not m:
            self.fail(SYNTAX, "expected 'bundle <name> base <graph> fibre-size N'")
        name, gname, size = m.groups()
        self.fresh(name)
        X = self.lookup(self.sc.graphs, gname, "graph")
        size = int(size)
        if not 1 <= size <= 5:
            self.fail(INVARIANT, "fibre size must be between 1 and 5", str(size))
        self.pending_bundles[name] = {"base": X, "size": size, "line": self.line,
                                      "transitions": [tuple(range(size))] * X.nedges}

    def d_transition(self, rest):
        parts = rest.split(None, 2)
        if len(parts) != 3:
            self.fail(SYNTAX, "expected 'transition <bundle> <edge> <perm>'")
        entry = self.lookup(self.pending_bundles, parts[0], "bundle")
        e = self.integer(parts[1])
        if not 0 <= e < entry["base"].nedges:
            self.fail(DANGLING_REFERENCE, f"base graph has no edge {e}", parts[1])
        perm = self.int_list(parts[2])
        if sorted(perm) != list(range(entry["size"])):
            self.fail(INVARIANT, f"{list(perm)} is not a permutation of the fibre", parts[2])
        entry["transitions"][e] = perm

    def d_classify(self, rest):
        words = rest.split()
        if not words or words[0] not in _KINDS:
            self.fail(SYNTAX, f"classify kind must be one of {sorted(_KINDS)}", words[0] if words else None)
        kind, refs = words[0], tuple(words[1:])
        arity = _KINDS[kind]
        if len(refs) not in (arity if isinstance(arity, tuple) else (arity,)):
            self.fail(SYNTAX, f"classify {kind} takes {arity} references")
        tables = {
            "torsors": [("presentation", self.sc.presentations), ("action or group", None)],
            "coverings": [("presentation", self.sc.presentations), ("group", self.sc.groups)],
            "cech": [("nerve", self.sc.nerves), ("group", self.sc.groups)],
            "bundle": [("cover", self.sc.covers), ("group", self.sc.groups), ("phi", self.pending_phis)],
            "frame": [("bundle", self.pending_bundles), ("bundle", self.pending_bundles)],
        }[kind]
        for ref, (what, table) in zip(refs, tables):
            if table is None:
                if ref not in self.pending_actions and ref not in self.sc.groups:
                    self.fail(DANGLING_REFERENCE, f"action or group {ref!r} is not declared", ref)
            else:
                self.lookup(table, ref, what)
        self.sc.requests.append(Request(kind, refs, self.line, source=self.raw))

    # -- validation of multi-line declarations, then request resolution
    def finish(self):
        sc = self.sc
        for name, e in self.pending_actions.items():
            self.line = e["line"]
            G, P = sc.groups[e["group"]], sc.presentations[e["pres"]]
            acts = tuple(e["values"].get(k, tuple(range(G.order))) for k in range(P.ngens))
            sc.actions[name] = self.guard(INVARIANT, PiGroup, P, G, acts)
        for name, e in self.pending_phis.items():
            self.line, self.raw = e["line"], e["raw"]
            auts = self.automorphisms(e["group"])
            deck = sc.covers[e["cover"]].deck
            elems = sorted(e["values"])
            image = extend_to_morphism(deck, auts.as_group, elems,
                                       [auts.index(e["values"][f]) for f in elems])
            if image is None:
                self.fail(INVARIANT, f"phi {name} does not extend to a morphism deck -> Aut")
            sc.phis[name] = (e["group"], e["cover"], tuple(auts.maps[k] for k in image))
        for name, e in self.pending_bundles.items():
            self.line = e["line"]
            sc.bundles[name] = FibreBundleModel(e["base"], e["size"], tuple(e["transitions"]))
        for req in sc.requests:
            self.line, self.raw = req.line, req.source
            req.target = self.resolve(req)

    def resolve(self, req: Request):
        sc = self.sc
        if req.kind == "torsors":
            P = sc.presentations[req.refs[0]]
            if req.refs[1] in sc.actions:
                coeffs = sc.actions[req.refs[1]]
                if coeffs.pi != P:
                    self.fail(INVARIANT, f"action {req.refs[1]} is not over presentation {req.refs[0]}",
                              req.refs[1])
                return coeffs
            G = sc.groups[req.refs[1]]
            return PiGroup(P, G, (tuple(range(G.order)),) * P.ngens)
        if req.kind == "coverings":
            return sc.presentations[req.refs[0]], sc.groups[req.refs[1]]
        if req.kind == "cech":
            nerve, G = sc.nerves[req.refs[0]], sc.groups[req.refs[1]]
            twist = {}
            for i, j, spec, line, raw in sc.twists[req.refs[0]]:
                self.line, self.raw = line, raw
                twist[(i, j)] = self.aut_spec(req.refs[1], spec)
            self.line = req.line
            problems = check_twist(nerve, G, twist)
            if problems:
                self.fail(INVARIANT, "; ".join(problems))
            return nerve, G, twist
        if req.kind == "bundle":
            cover, G = sc.covers[req.refs[0]], sc.groups[req.refs[1]]
            if len(req.refs) == 3:
                gname, cname, maps = sc.phis[req.refs[2]]
                if (gname, cname) != (req.refs[1], req.refs[0]):
                    self.fail(INVARIANT, f"phi {req.refs[2]} is not an action of {req.refs[0]} on {req.refs[1]}",
                              req.refs[2])
            else:
                maps = (tuple(range(G.order)),) * cover.deck.order
            return self.guard(INVARIANT, build_group_covering, cover, G, maps)
        if req.kind == "frame":
            E, E2 = sc.bundles[req.refs[0]], sc.bundles[req.refs[1]]
            if E.base != E2.base:
                self.fail(INVARIANT, "frame request needs bundles over the same base graph")
            if E.size != E2.size:
                self.fail(INVARIANT, f"fibre sizes {E.size} and {E2.size} differ: the frame bundle has empty fibres")
            return E, E2
        raise AssertionError(req.kind)


def parse_scenario(text: str) -> Scenario:
    """Validated Scenario; raises ScenarioError with line, column and code."""
    return _Parser(text).parse()
