"""Instance generators for the hardness constructions.

Every generator returns a :class:`GeneratedInstance`: a ready-to-solve
:class:`Instance` plus a role annotation for each species, so generated files
stay readable and tests can pick out e.g. all agent species of a gadget CRN.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import Crn, Instance, Problem, Rule
from .errors import CrnError, InvalidWiring, MalformedClause, NotBimolecular, UnbalancedPartitions


@dataclass(frozen=True)
class GeneratedInstance:
    instance: Instance
    annotations: dict[str, str]
    notes: tuple[str, ...] = ()

    @property
    def crn(self) -> Crn:
        return self.instance.crn


def _finish(rules, species, initial, target, annotations, problem=None, notes=()) -> GeneratedInstance:
    crn = Crn.build(rules, species)
    missing = [s for s in crn.species if s not in annotations]
    if missing:
        raise AssertionError(f"unannotated species {missing}")
    tgt = crn.config(target) if target is not None else None
    inst = Instance(crn, crn.config(initial), tgt, problem or Problem())
    return GeneratedInstance(inst, dict(annotations), tuple(notes))


# Hamiltonian path


class HamPathVariant(str, Enum):
    SIZE22 = "size22"
    SIZE21 = "size21"
    SIZE12 = "size12"


def gen_hampath(
    vertices: Sequence[str],
    edges: Iterable[tuple[str, str]],
    s: str,
    t: str,
    variant: HamPathVariant | str = HamPathVariant.SIZE22,
) -> GeneratedInstance:
    """Reachability instance whose target is reachable iff G has a
    Hamiltonian path from ``s`` to ``t``.

    Each vertex X gets a fresh species ``X``, a visited species ``X^v`` and
    signal species ``X*0 .. X*{n-1}``; the signal index counts the vertices
    visited so far. An edge (U, W) yields ``U*i + W -> U^v + W*{i+1}``.
    """
    variant = HamPathVariant(variant)
    vertices = list(vertices)
    edges = list(dict.fromkeys((u, w) for u, w in edges))
    if len(set(vertices)) != len(vertices):
        raise CrnError("duplicate vertex names")
    vset = set(vertices)
    for u, w in edges:
        if u not in vset or w not in vset:
            raise CrnError(f"edge ({u}, {w}) uses an unknown vertex")
    if s not in vset or t not in vset:
        raise CrnError("s and t must be vertices")
    if s == t:
        raise CrnError("s and t must differ")
    outdeg = {v: 0 for v in vertices}
    indeg = {v: 0 for v in vertices}
    for u, w in edges:
        outdeg[u] += 1
        indeg[w] += 1
    if max(outdeg.values()) > 2 or max(indeg.values()) > 2:
        warnings.warn(
            "a vertex has in- or out-degree above 2; the instance is still correct "
            "but the 2-source/2-consuming bound no longer applies",
            stacklevel=2,
        )
    n = len(vertices)
    visited = variant is HamPathVariant.SIZE22

    def sig(v, i):
        return f"{v}*{i}"

    species, ann = [], {}
    for v in vertices:
        species.append(v)
        ann[v] = f"vertex {v}, unvisited"
        if visited:
            species.append(f"{v}^v")
            ann[f"{v}^v"] = f"vertex {v}, visited"
        for i in range(n):
            species.append(sig(v, i))
            ann[sig(v, i)] = f"signal at vertex {v} after {i} steps"
    rules = []
    for i in range(n - 1):
        for u, w in edges:
            prod = {f"{u}^v": 1, sig(w, i + 1): 1} if visited else {sig(w, i + 1): 1}
            rules.append(({sig(u, i): 1, w: 1}, prod))
    initial = {sig(s, 0): 1, **{v: 1 for v in vertices if v != s}}
    if visited:
        target = {f"{v}^v": 1 for v in vertices if v != t}
        target[sig(t, n - 1)] = 1
    else:
        target = {sig(t, n - 1): 1}
    if variant is HamPathVariant.SIZE12:
        rules = [(b, a) for a, b in rules]
        initial, target = target, initial
    return _finish(rules, species, initial, target, ann)


def has_hamiltonian_path(vertices, edges, s, t) -> bool:
    """Held-Karp style bitmask search; used as an independent check."""
    vertices = list(vertices)
    idx = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    succ = [0] * n
    for u, w in edges:
        succ[idx[u]] |= 1 << idx[w]
    full = (1 << n) - 1
    si, ti = idx[s], idx[t]
    # reach[mask] = bitmask of end vertices of simple s-paths covering mask
    reach = {1 << si: 1 << si}
    for mask in sorted(range(1, full + 1), key=lambda m: bin(m).count("1")):
        ends = reach.get(mask)
        if not ends:
            continue
        for v in range(n):
            if ends >> v & 1:
                nxt = succ[v] & ~mask
                while nxt:
                    w = (nxt & -nxt).bit_length() - 1
                    nxt &= nxt - 1
                    m2 = mask | 1 << w
                    reach[m2] = reach.get(m2, 0) | 1 << w
    return bool(reach.get(full, 0) >> ti & 1)


# 3-dimensional matching


def _check_3dm(xs, ys, zs, edges):
    if not (len(xs) == len(ys) == len(zs)):
        raise UnbalancedPartitions(f"part sizes {len(xs)}, {len(ys)}, {len(zs)} differ")
    allv = list(xs) + list(ys) + list(zs)
    if len(set(allv)) != len(allv):
        raise CrnError("vertex names must be distinct across the three parts")
    for e in edges:
        x, y, z = e
        if x not in xs or y not in ys or z not in zs:
            raise CrnError(f"hyperedge {e} does not take one vertex from each part")
    return allv


def gen_3dm(xs: Sequence[str], ys: Sequence[str], zs: Sequence[str],
            edges: Iterable[tuple[str, str, str]]) -> GeneratedInstance:
    """One ``S_x + S_y + S_z -> 0`` rule per hyperedge; start with one of each
    vertex, target the empty configuration."""
    edges = list(dict.fromkeys(tuple(e) for e in edges))
    allv = _check_3dm(xs, ys, zs, edges)
    species = [f"S_{v}" for v in allv]
    ann = {f"S_{v}": f"vertex {v}" for v in allv}
    rules = [({f"S_{x}": 1, f"S_{y}": 1, f"S_{z}": 1}, {}) for x, y, z in edges]
    return _finish(rules, species, {s: 1 for s in species}, {}, ann)


def gen_3dm_species(xs: Sequence[str], ys: Sequence[str], zs: Sequence[str],
                    edges: Iterable[tuple[str, str, str]]) -> GeneratedInstance:
    """Like :func:`gen_3dm` but every hyperedge produces one sink species ``a``;
    the target holds ``n`` copies of ``a`` and nothing else."""
    edges = list(dict.fromkeys(tuple(e) for e in edges))
    allv = _check_3dm(xs, ys, zs, edges)
    species = [f"S_{v}" for v in allv] + ["a"]
    ann = {f"S_{v}": f"vertex {v}" for v in allv}
    ann["a"] = "sink, one copy per chosen hyperedge"
    rules = [({f"S_{x}": 1, f"S_{y}": 1, f"S_{z}": 1}, {"a": 1}) for x, y, z in edges]
    initial = {f"S_{v}": 1 for v in allv}
    return _finish(rules, species, initial, {"a": len(xs)}, ann)


def has_3d_matching(xs, ys, zs, edges) -> bool:
    """Exhaustive search over hyperedge choices, one per x vertex."""
    by_x: dict = {}
    for x, y, z in edges:
        by_x.setdefault(x, set()).add((y, z))

    def go(i, used_y, used_z):
        if i == len(xs):
            return True
        for y, z in by_x.get(xs[i], ()):
            if y not in used_y and z not in used_z:
                if go(i + 1, used_y | {y}, used_z | {z}):
                    return True
        return False

    return go(0, frozenset(), frozenset())


# s-t connectivity


def gen_digraph_path(vertices: Sequence[str], edges: Iterable[tuple[str, str]],
                     s: str, t: str) -> GeneratedInstance:
    """One unimolecular rule ``a -> b`` per edge; move a single token s to t."""
    vertices = list(vertices)
    vset = set(vertices)
    edges = list(dict.fromkeys((u, w) for u, w in edges))
    for u, w in edges:
        if u not in vset or w not in vset:
            raise CrnError(f"edge ({u}, {w}) uses an unknown vertex")
    if s not in vset or t not in vset:
        raise CrnError("s and t must be vertices")
    ann = {v: f"token at vertex {v}" for v in vertices}
    rules = [({u: 1}, {w: 1}) for u, w in edges if u != w]
    return _finish(rules, vertices, {s: 1}, {t: 1}, ann)


# 3SAT production


def gen_sat_production(clauses: Sequence[Sequence[int]], num_vars: int | None = None) -> GeneratedInstance:
    """Production instance: ``SAT{m}`` is producible iff the 3-CNF is satisfiable.

    Clauses use DIMACS literals (``3`` is x3, ``-3`` its negation).
    """
    clauses = [tuple(c) for c in clauses]
    for j, c in enumerate(clauses):
        if len(c) != 3 or any(not isinstance(l, int) or l == 0 for l in c):
            raise MalformedClause(f"clause {j + 1} must have exactly three non-zero literals")
    used = max((abs(l) for c in clauses for l in c), default=0)
    n = used if num_vars is None else num_vars
    if n < used:
        raise MalformedClause(f"literal {used} exceeds the declared {n} variables")
    species, ann, rules = [], {}, []
    initial: dict[str, int] = {}
    for v in range(1, n + 1):
        x, xb, xt, xf = f"x{v}", f"x{v}_bar", f"x{v}_T", f"x{v}_F"
        species += [x, xb, xt, xf]
        ann.update({x: f"x{v} unassigned", xb: f"x{v} unassigned (negated copy)",
                    xt: f"x{v} assigned true", xf: f"x{v} assigned false"})
        initial[x] = initial[xb] = 1
    species += ["T", "F"]
    ann["T"] = "catalyst enabling true assignments"
    ann["F"] = "catalyst enabling false assignments"
    initial["T"] = initial["F"] = 1
    for v in range(1, n + 1):
        x, xb = f"x{v}", f"x{v}_bar"
        rules.append(({"T": 1, x: 1, xb: 1}, {"T": 1, xb: 1, f"x{v}_T": 1}))
        rules.append(({"F": 1, x: 1, xb: 1}, {"F": 1, x: 1, f"x{v}_F": 1}))
    m = len(clauses)
    for j, c in enumerate(clauses):
        sat = f"c{j}_SAT"
        for slot, lit in enumerate(c):
            cs = f"c{j}_{slot}"
            species.append(cs)
            ann[cs] = f"clause {j}, literal slot {slot}"
            initial[cs] = 1
            witness = f"x{abs(lit)}_T" if lit > 0 else f"x{abs(lit)}_F"
            rules.append(({cs: 1, witness: 1}, {sat: 1, witness: 1}))
        species.append(sat)
        ann[sat] = f"clause {j} satisfied"
    for j in range(m + 1):
        species.append(f"SAT{j}")
        ann[f"SAT{j}"] = f"first {j} clauses verified"
    initial["SAT0"] = initial.get("SAT0", 0) + 1
    for j in range(m):
        rules.append(({f"SAT{j}": 1, f"c{j}_SAT": 1}, {f"SAT{j + 1}": 1}))
    return _finish(rules, species, initial, None, ann, Problem.produce(f"SAT{m}", 1))


def is_satisfiable(clauses: Sequence[Sequence[int]], num_vars: int | None = None) -> bool:
    """Truth-table check."""
    n = num_vars or max((abs(l) for c in clauses for l in c), default=0)
    for bits in range(1 << n):
        if all(any((bits >> (abs(l) - 1) & 1) == (l > 0) for l in c) for c in clauses):
            return True
    return False


# motion-planning gadgets

TOGGLE_PORTS = ("a", "c", "b", "d")


@dataclass(frozen=True)
class ToggleLock:
    name: str
    locked: bool = False

    @property
    def ports(self) -> tuple[str, ...]:
        return TOGGLE_PORTS


@dataclass(frozen=True)
class Rotate:
    name: str
    k: int = 3

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(f"p_{i}" for i in range(self.k))


Endpoint = tuple  # (gadget name, port) or None for an open end


@dataclass(frozen=True)
class Wire:
    name: str
    a: Endpoint | None
    b: Endpoint | None


@dataclass(frozen=True)
class GadgetSystem:
    """Gadgets, wires joining their ports, the agent's start and the target wire.

    The agent starts on ``start_wire`` moving in ``start_direction`` (``"ab"``:
    from endpoint a towards endpoint b). Only the start and target wires may
    leave an end open (``None``), which is where the agent enters or leaves
    the system. ``target_direction`` defaults to the direction heading into
    the target wire's open end, or ``"ab"`` when both ends are attached.
    """

    gadgets: tuple
    wires: tuple[Wire, ...]
    start_wire: str
    start_direction: str
    target_wire: str
    target_direction: str | None = None

    def validate(self) -> None:
        names = [g.name for g in self.gadgets]
        if len(set(names)) != len(names):
            raise InvalidWiring("duplicate gadget names")
        wnames = [w.name for w in self.wires]
        if len(set(wnames)) != len(wnames):
            raise InvalidWiring("duplicate wire names")
        gadgets = {g.name: g for g in self.gadgets}
        for g in self.gadgets:
            if isinstance(g, Rotate) and g.k < 2:
                raise InvalidWiring(f"rotate gadget {g.name} needs at least two ports")
        used: dict = {}
        for w in self.wires:
            ends = [w.a, w.b]
            for end in ends:
                if end is None:
                    if w.name not in (self.start_wire, self.target_wire):
                        raise InvalidWiring(f"wire {w.name} has an open end")
                    continue
                g, p = end
                if g not in gadgets:
                    raise InvalidWiring(f"wire {w.name} references unknown gadget {g}")
                if p not in gadgets[g].ports:
                    raise InvalidWiring(f"gadget {g} has no port {p}")
                if (g, p) in used:
                    raise InvalidWiring(f"port {g}.{p} is attached to wires {used[(g, p)]} and {w.name}")
                used[(g, p)] = w.name
            if w.a is not None and w.a == w.b:
                raise InvalidWiring(f"wire {w.name} joins a port to itself")
            if w.a is None and w.b is None:
                raise InvalidWiring(f"wire {w.name} has two open ends")
        for g in self.gadgets:
            for p in g.ports:
                if (g.name, p) not in used:
                    raise InvalidWiring(f"port {g.name}.{p} is not attached to a wire")
        if self.start_wire not in wnames:
            raise InvalidWiring(f"unknown start wire {self.start_wire}")
        if self.target_wire not in wnames:
            raise InvalidWiring(f"unknown target wire {self.target_wire}")
        if self.start_direction not in ("ab", "ba"):
            raise InvalidWiring("start direction must be 'ab' or 'ba'")
        if self.target_direction not in (None, "ab", "ba"):
            raise InvalidWiring("target direction must be 'ab' or 'ba'")

    def wire(self, name: str) -> Wire:
        for w in self.wires:
            if w.name == name:
                return w
        raise KeyError(name)

    def resolved_target_direction(self) -> str:
        if self.target_direction is not None:
            return self.target_direction
        w = self.wire(self.target_wire)
        if w.a is None and w.b is not None:
            return "ba"
        return "ab"


class GadgetMode(str, Enum):
    PRODUCTION = "production"
    REACHABILITY = "reachability"


def agent(wire: str, direction: str) -> str:
    return f"{wire}_{direction}"


def _flip(direction: str) -> str:
    return "ba" if direction == "ab" else "ab"


def gen_gadget_crn(
    system: GadgetSystem,
    mode: GadgetMode | str = GadgetMode.PRODUCTION,
    split: bool = False,
) -> GeneratedInstance:
    """Compile toggle-lock/rotate motion planning into a (2,2) CRN.

    A wire ``w`` carries two agent species, ``w_ab`` and ``w_ba``. At a port
    attached to endpoint a of ``w`` the agent arrives as ``w_ba`` and leaves
    as ``w_ab`` (and the other way round at endpoint b).

    Toggle-lock ``g`` holds one of ``G_g`` (unlocked) or ``G'_g`` (locked):

    * ``in(a) + G_g -> out(c) + G'_g`` and ``in(c) + G'_g -> out(a) + G_g``
    * ``in(b) + G_g -> out(d) + G_g`` and ``in(d) + G_g -> out(b) + G_g``
    * otherwise the agent bounces back and the gate keeps its state:
      ``in(a) + G'_g``, ``in(c) + G_g``, ``in(b) + G'_g``, ``in(d) + G'_g``
      each go to ``out(same port)``.

    Exactly one rule matches each (incoming agent, gate state) pair, so play
    is deterministic. A rotate gadget passes ``in(p_i)`` to ``out(p_{i+1})``
    with catalyst ``r_cw``.

    Production mode asks to produce the target agent. Reachability mode adds
    ``r_ccw`` with the mirrored rotate rules and a turnaround rule at the
    target; the target configuration is the initial one with the agent
    reversed on its start wire and ``r_cw`` replaced by ``r_ccw``.
    """
    mode = GadgetMode(mode)
    system.validate()
    wires = {w.name: w for w in system.wires}
    species: list[str] = []
    ann: dict[str, str] = {}

    def declare(name, role):
        if name in ann:
            raise InvalidWiring(f"species name clash on {name!r}")
        species.append(name)
        ann[name] = role

    for w in system.wires:
        declare(agent(w.name, "ab"), f"agent on wire {w.name}, moving a to b")
        declare(agent(w.name, "ba"), f"agent on wire {w.name}, moving b to a")
    port_wire = {}
    for w in system.wires:
        if w.a is not None:
            port_wire[w.a] = (w.name, "a")
        if w.b is not None:
            port_wire[w.b] = (w.name, "b")

    def incoming(g, p):
        w, end = port_wire[(g, p)]
        return agent(w, "ba" if end == "a" else "ab")

    def outgoing(g, p):
        w, end = port_wire[(g, p)]
        return agent(w, "ab" if end == "a" else "ba")

    rules: list[tuple[dict, dict]] = []

    def rule(x, cat_in, y, cat_out):
        rules.append(({x: 1, cat_in: 1}, {y: 1, cat_out: 1}))

    gate_init: dict[str, int] = {}
    has_rotate = any(isinstance(g, Rotate) for g in system.gadgets)
    reach = mode is GadgetMode.REACHABILITY
    for g in system.gadgets:
        if isinstance(g, ToggleLock):
            G, Gp = f"G_{g.name}", f"G'_{g.name}"
            declare(G, f"gate catalyst: toggle-lock {g.name} unlocked")
            declare(Gp, f"gate catalyst: toggle-lock {g.name} locked")
            gate_init[Gp if g.locked else G] = 1
            n = g.name
            rule(incoming(n, "a"), G, outgoing(n, "c"), Gp)
            rule(incoming(n, "c"), Gp, outgoing(n, "a"), G)
            rule(incoming(n, "b"), G, outgoing(n, "d"), G)
            rule(incoming(n, "d"), G, outgoing(n, "b"), G)
            rule(incoming(n, "a"), Gp, outgoing(n, "a"), Gp)
            rule(incoming(n, "c"), G, outgoing(n, "c"), G)
            rule(incoming(n, "b"), Gp, outgoing(n, "b"), Gp)
            rule(incoming(n, "d"), Gp, outgoing(n, "d"), Gp)
    if has_rotate or reach:
        declare("r_cw", "rotate catalyst, clockwise")
    if reach:
        declare("r_ccw", "rotate catalyst, counterclockwise")
    for g in system.gadgets:
        if isinstance(g, Rotate):
            ports = g.ports
            for i, p in enumerate(ports):
                rule(incoming(g.name, p), "r_cw", outgoing(g.name, ports[(i + 1) % g.k]), "r_cw")
            if reach:
                for i, p in enumerate(ports):
                    rule(incoming(g.name, p), "r_ccw", outgoing(g.name, ports[(i - 1) % g.k]), "r_ccw")

    start = agent(system.start_wire, system.start_direction)
    tdir = system.resolved_target_direction()
    target_agent = agent(system.target_wire, tdir)
    notes = []
    tw = wires[system.target_wire]
    head = tw.b if tdir == "ab" else tw.a
    if head is not None:
        notes.append(
            f"target wire {tw.name} is attached at both ends; the target agent "
            "is also consumed by a gadget rule"
        )
        if reach:
            warnings.warn(
                "closed target wire: the turnaround rule competes with a gadget rule, "
                "so play is no longer deterministic",
                stacklevel=2,
            )
    initial = {start: 1, **gate_init}
    if has_rotate or reach:
        initial["r_cw"] = 1
    if reach:
        rules.append(({target_agent: 1, "r_cw": 1}, {agent(system.target_wire, _flip(tdir)): 1, "r_ccw": 1}))
        target = dict(initial)
        del target[start], target["r_cw"]
        target[agent(system.start_wire, _flip(system.start_direction))] = 1
        target["r_ccw"] = 1
        problem = Problem()
    else:
        target = None
        problem = Problem.produce(target_agent, 1)
    gen = _finish(rules, species, initial, target, ann, problem, notes)
    if split:
        crn, inter = _split(gen.crn)
        ann = dict(gen.annotations)
        for name, rid in inter.items():
            ann[name] = f"intermediate of rule {rid}"
        pad = (0,) * len(inter)
        inst = gen.instance
        inst = Instance(
            crn,
            inst.initial + pad,
            None if inst.target is None else inst.target + pad,
            inst.problem,
        )
        gen = GeneratedInstance(inst, ann, gen.notes)
    return gen


def agent_species(gen: GeneratedInstance) -> list[int]:
    """Indices of agent and intermediate species of a compiled gadget CRN."""
    return [
        i
        for i, s in enumerate(gen.crn.species)
        if gen.annotations[s].startswith(("agent", "intermediate"))
    ]


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def _split(crn: Crn) -> tuple[Crn, dict[str, int]]:
    if not all(r.size == (2, 2) for r in crn.rules):
        raise NotBimolecular("every rule must have size (2,2)")
    taken = set(crn.species)
    inter: dict[str, int] = {}
    for r in crn.rules:
        name = _fresh(f"m_{r.id}", taken)
        taken.add(name)
        inter[name] = r.id
    species = crn.species + tuple(inter)
    pad = (0,) * len(inter)
    rules = []
    for k, (name, rid) in enumerate(inter.items()):
        r = crn.rule(rid)
        m = [0] * len(inter)
        m[k] = 1
        rules.append(Rule(r.reactants + pad, (0,) * crn.n + tuple(m), 2 * k))
        rules.append(Rule((0,) * crn.n + tuple(m), r.products + pad, 2 * k + 1))
    return Crn(species, tuple(rules)), inter


def split_non_monotone(crn: Crn) -> Crn:
    """Replace each (2,2) rule ``X + Y -> Z + W`` by ``X + Y -> m_r`` and
    ``m_r -> Z + W`` with a fresh intermediate ``m_r``.

    New species are appended after the original ones, so a configuration of
    the input CRN extends to the output by zero padding. Rule ``r`` becomes
    rules ``2k`` and ``2k+1`` where ``k`` is its position.
    """
    return _split(crn)[0]


def pad_config(c: Sequence[int], crn: Crn) -> tuple:
    """Zero-extend a configuration to the alphabet of ``crn``."""
    return tuple(c) + (0,) * (crn.n - len(c))
