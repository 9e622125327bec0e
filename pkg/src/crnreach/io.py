"""Text formats: CRN/instance files, digraphs, hypergraphs, CNF, gadget
systems and certificates.

CRN files are line based; ``#`` starts a comment::

    species: H O W
    2H + O -> W
    config init: 4H + 2O
    config target: 2W
    problem: reach

A multiset is ``k1 A + k2 B + ...`` (the coefficient may touch the name and
defaults to 1); ``0`` is the empty multiset. Rules may introduce species;
configurations may not. A rule may carry an explicit id as ``r7: a -> b``;
otherwise rules are numbered from 0 in file order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import SPECIES_RE, Config, Crn, Instance, Problem, ProblemKind, Rule
from .errors import ParseError
from .reductions import GadgetSystem, Rotate, ToggleLock, Wire
from .search import OrderedCertificate

_TERM_RE = re.compile(r"\s*(\d*)\s*([A-Za-z][A-Za-z0-9_^*'.]*)\s*\Z")
_LABEL_RE = re.compile(r"\s*r(\d+)\s*:")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_multiset(text: str, line: int | None = None, col: int = 1) -> dict[str, int]:
    """Parse ``2H + O`` into ``{"H": 2, "O": 1}``; ``0`` is empty."""
    if text.strip() == "0":
        return {}
    out: dict[str, int] = {}
    offset = 0
    for part in text.split("+"):
        lead = len(part) - len(part.lstrip())
        m = _TERM_RE.match(part)
        if not m:
            what = part.strip() or "empty term"
            raise ParseError(f"bad term {what!r}", line, col + offset + lead)
        coef = int(m.group(1)) if m.group(1) else 1
        if coef == 0:
            raise ParseError("zero coefficient", line, col + offset + lead)
        name = m.group(2)
        out[name] = out.get(name, 0) + coef
        offset += len(part) + 1
    return out


def format_multiset(counts: dict[str, int] | None, order) -> str:
    terms = []
    for s in order:
        k = (counts or {}).get(s, 0)
        if k:
            terms.append(s if k == 1 else f"{k}{s}")
    return " + ".join(terms) if terms else "0"


@dataclass
class CrnDocument:
    """Everything a CRN file can hold."""

    crn: Crn
    configs: dict[str, Config] = field(default_factory=dict)
    problem: Problem | None = None

    def instance(self) -> Instance:
        if "init" not in self.configs:
            raise ParseError("instance files need a 'config init:' line")
        problem = self.problem or Problem()
        target = self.configs.get("target")
        if problem.kind is not ProblemKind.PRODUCE and target is None:
            raise ParseError(f"{problem.kind.value} instances need a 'config target:' line")
        if problem.kind is ProblemKind.PRODUCE and problem.species not in self.crn.index:
            raise ParseError(f"unknown species {problem.species!r} in problem line")
        return Instance(self.crn, self.configs["init"], target, problem)


def parse_document(text: str) -> CrnDocument:
    declared: list[str] = []
    rules: list[tuple[int, dict, dict, int]] = []
    raw_configs: list[tuple[str, str, int, int]] = []
    problem = None
    next_id = 0
    used_ids: set[int] = set()
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line.strip():
            continue
        head = line.lstrip()
        indent = len(line) - len(head)
        if "->" in line:
            col = 1
            rid = None
            m = _LABEL_RE.match(line)
            if m:
                rid = int(m.group(1))
                col = m.end() + 1
                line_body = line[m.end():]
            else:
                line_body = line
            if line_body.count("->") != 1:
                raise ParseError("a rule has exactly one '->'", no)
            left, right = line_body.split("->")
            lhs = parse_multiset(left, no, col)
            rhs = parse_multiset(right, no, col + len(left) + 2)
            if not lhs and not rhs:
                raise ParseError("the empty rule 0 -> 0 is not allowed", no)
            if rid is None:
                while next_id in used_ids:
                    next_id += 1
                rid = next_id
            if rid in used_ids:
                raise ParseError(f"duplicate rule id {rid}", no)
            used_ids.add(rid)
            rules.append((rid, lhs, rhs, no))
        elif head.startswith("species:"):
            body = head[len("species:"):]
            for name in body.replace(",", " ").split():
                if not SPECIES_RE.match(name):
                    raise ParseError(f"invalid species name {name!r}", no, line.index(name) + 1)
                if name in declared:
                    raise ParseError(f"species {name!r} declared twice", no)
                declared.append(name)
        elif re.match(r"config\s", head):
            m = re.match(r"config\s+([A-Za-z_][A-Za-z0-9_]*)\s*:", head)
            if not m:
                raise ParseError("expected 'config <name>: <multiset>'", no, indent + 1)
            name = m.group(1)
            if any(c[0] == name for c in raw_configs):
                raise ParseError(f"config {name!r} defined twice", no)
            start = indent + m.end()
            raw_configs.append((name, line[start:], no, start + 1))
        elif head.startswith("problem:"):
            if problem is not None:
                raise ParseError("more than one problem line", no)
            words = head[len("problem:"):].split()
            if words == ["reach"]:
                problem = Problem(ProblemKind.REACH)
            elif words == ["universal"]:
                problem = Problem(ProblemKind.UNIVERSAL)
            elif len(words) == 3 and words[0] == "produce" and words[2].isdigit():
                k = int(words[2])
                if k < 1:
                    raise ParseError("production count must be at least 1", no)
                problem = Problem.produce(words[1], k)
            else:
                raise ParseError("expected 'problem: reach', 'problem: universal' or "
                                 "'problem: produce <species> <k>'", no, indent + 1)
        else:
            raise ParseError("expected a rule, 'species:', 'config' or 'problem:' line", no, indent + 1)
    names = list(declared)
    seen = set(names)
    for _, lhs, rhs, _ in rules:
        for s in list(lhs) + list(rhs):
            if s not in seen:
                seen.add(s)
                names.append(s)
    idx = {s: i for i, s in enumerate(names)}

    def vec(m):
        v = [0] * len(names)
        for s, k in m.items():
            v[idx[s]] += k
        return tuple(v)

    crn = Crn(tuple(names), tuple(Rule(vec(a), vec(b), rid) for rid, a, b, _ in rules))
    configs = {}
    for name, body, no, col in raw_configs:
        counts = parse_multiset(body, no, col)
        for s in counts:
            if s not in idx:
                raise ParseError(f"unknown species {s!r} in config {name!r}", no, col + body.index(s))
        configs[name] = vec(counts)
    if problem is not None and problem.kind is ProblemKind.PRODUCE and problem.species not in idx:
        raise ParseError(f"unknown species {problem.species!r} in problem line")
    return CrnDocument(crn, configs, problem)


def parse_crn(text: str) -> Crn:
    return parse_document(text).crn


def parse_instance(text: str) -> Instance:
    return parse_document(text).instance()


def format_rule(rule: Rule, crn: Crn, label: bool = False) -> str:
    lhs = format_multiset(crn.counts(rule.reactants), crn.species)
    rhs = format_multiset(crn.counts(rule.products), crn.species)
    text = f"{lhs} -> {rhs}"
    return f"r{rule.id}: {text}" if label else text


def format_document(doc: CrnDocument) -> str:
    crn = doc.crn
    dense = [r.id for r in crn.rules] == list(range(len(crn.rules)))
    lines = [("species: " + " ".join(crn.species)).rstrip()]
    lines += [format_rule(r, crn, label=not dense) for r in crn.rules]
    for name, c in doc.configs.items():
        lines.append(f"config {name}: {format_multiset(crn.counts(c), crn.species)}")
    p = doc.problem
    if p is not None:
        if p.kind is ProblemKind.PRODUCE:
            lines.append(f"problem: produce {p.species} {p.k}")
        else:
            lines.append(f"problem: {p.kind.value}")
    return "\n".join(lines) + "\n"


def format_crn(crn: Crn) -> str:
    return format_document(CrnDocument(crn))


def format_instance(inst: Instance) -> str:
    configs = {"init": inst.initial}
    if inst.target is not None:
        configs["target"] = inst.target
    return format_document(CrnDocument(inst.crn, configs, inst.problem))


# graphs


@dataclass
class Digraph:
    vertices: list[str]
    edges: list[tuple[str, str]]
    s: str | None = None
    t: str | None = None


def parse_digraph(text: str) -> Digraph:
    """``vertices: ...`` (optional), ``U -> W`` edges, ``s: U``, ``t: W``."""
    vertices: list[str] = []
    edges = []
    ends: dict[str, str] = {}

    def add(v, no):
        if not SPECIES_RE.match(v):
            raise ParseError(f"invalid vertex name {v!r}", no)
        if v not in vertices:
            vertices.append(v)

    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw).strip()
        if not line:
            continue
        if line.startswith("vertices:"):
            for v in line[len("vertices:"):].replace(",", " ").split():
                add(v, no)
        elif re.match(r"[st]\s*:", line):
            key, val = line.split(":", 1)
            val = val.strip()
            add(val, no)
            ends[key.strip()] = val
        elif "->" in line:
            parts = [p.strip() for p in line.split("->")]
            if len(parts) != 2 or not all(parts):
                raise ParseError("expected 'U -> W'", no)
            for v in parts:
                add(v, no)
            edges.append((parts[0], parts[1]))
        else:
            raise ParseError("expected 'vertices:', 's:', 't:' or an edge 'U -> W'", no)
    return Digraph(vertices, edges, ends.get("s"), ends.get("t"))


def format_digraph(g: Digraph) -> str:
    lines = ["vertices: " + " ".join(g.vertices)]
    lines += [f"{u} -> {w}" for u, w in g.edges]
    if g.s is not None:
        lines.append(f"s: {g.s}")
    if g.t is not None:
        lines.append(f"t: {g.t}")
    return "\n".join(lines) + "\n"


@dataclass
class Hypergraph:
    xs: list[str]
    ys: list[str]
    zs: list[str]
    edges: list[tuple[str, str, str]]


def parse_hypergraph(text: str) -> Hypergraph:
    """``X: ...``, ``Y: ...``, ``Z: ...`` part lines, then ``x y z`` hyperedges."""
    parts: dict[str, list[str]] = {}
    edges = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw).strip()
        if not line:
            continue
        m = re.match(r"([XYZ])\s*:(.*)", line)
        if m:
            if m.group(1) in parts:
                raise ParseError(f"part {m.group(1)} given twice", no)
            names = m.group(2).replace(",", " ").split()
            for v in names:
                if not re.match(r"[A-Za-z0-9_]+\Z", v):
                    raise ParseError(f"invalid vertex name {v!r}", no)
            parts[m.group(1)] = names
            continue
        words = line.replace(",", " ").split()
        if len(words) != 3:
            raise ParseError("a hyperedge lists exactly three vertices", no)
        edges.append(tuple(words))
    for key in "XYZ":
        if key not in parts:
            raise ParseError(f"missing part line '{key}:'")
    return Hypergraph(parts["X"], parts["Y"], parts["Z"], edges)


def format_hypergraph(h: Hypergraph) -> str:
    lines = ["X: " + " ".join(h.xs), "Y: " + " ".join(h.ys), "Z: " + " ".join(h.zs)]
    lines += [" ".join(e) for e in h.edges]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """DIMACS CNF: ``c`` comments, a ``p cnf <vars> <clauses>`` header and
    zero-terminated clauses. Returns ``(num_vars, clauses)``."""
    num_vars = None
    declared = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            words = line.split()
            if len(words) != 4 or words[1] != "cnf" or not (words[2].isdigit() and words[3].isdigit()):
                raise ParseError("expected 'p cnf <vars> <clauses>'", no)
            num_vars, declared = int(words[2]), int(words[3])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", no) from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    if declared is not None and declared != len(clauses):
        raise ParseError(f"header declares {declared} clauses, found {len(clauses)}")
    return num_vars, clauses


def format_dimacs(num_vars: int, clauses) -> str:
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"


def parse_gadgets(text: str) -> GadgetSystem:
    """Gadget system format::

        toggle g1 unlocked        # or: locked
        rotate r1 3               # ports p_0 .. p_2, clockwise
        wire w1 g1.a r1.p_0       # '-' marks an open end
        start w0 ab               # agent on w0 moving from end a to end b
        target w3                 # optional direction: ab | ba
    """
    gadgets = []
    wires = []
    start = target = None
    for no, raw in enumerate(text.splitlines(), 1):
        words = _strip(raw).split()
        if not words:
            continue
        kind = words[0]
        if kind == "toggle" and len(words) == 3 and words[2] in ("locked", "unlocked"):
            gadgets.append(ToggleLock(words[1], words[2] == "locked"))
        elif kind == "rotate" and len(words) == 3 and words[2].isdigit():
            gadgets.append(Rotate(words[1], int(words[2])))
        elif kind == "wire" and len(words) == 4:
            ends = []
            for tok in words[2:]:
                if tok == "-":
                    ends.append(None)
                elif tok.count(".") == 1:
                    g, p = tok.split(".")
                    ends.append((g, p))
                else:
                    raise ParseError(f"expected '<gadget>.<port>' or '-', got {tok!r}", no)
            wires.append(Wire(words[1], ends[0], ends[1]))
        elif kind == "start" and len(words) == 3:
            start = (words[1], words[2])
        elif kind == "target" and len(words) in (2, 3):
            target = (words[1], words[2] if len(words) == 3 else None)
        else:
            raise ParseError(f"cannot read {kind!r} line", no)
    if start is None or target is None:
        raise ParseError("gadget systems need 'start' and 'target' lines")
    for w in wires:
        if not SPECIES_RE.match(w.name):
            raise ParseError(f"invalid wire name {w.name!r}")
    for g in gadgets:
        if not re.match(r"[A-Za-z0-9_]+\Z", g.name):
            raise ParseError(f"invalid gadget name {g.name!r}")
    system = GadgetSystem(tuple(gadgets), tuple(wires), start[0], start[1], target[0], target[1])
    system.validate()
    return system


def format_gadgets(system: GadgetSystem) -> str:
    lines = []
    for g in system.gadgets:
        if isinstance(g, ToggleLock):
            lines.append(f"toggle {g.name} {'locked' if g.locked else 'unlocked'}")
        else:
            lines.append(f"rotate {g.name} {g.k}")
    for w in system.wires:
        ends = ["-" if e is None else f"{e[0]}.{e[1]}" for e in (w.a, w.b)]
        lines.append(f"wire {w.name} {ends[0]} {ends[1]}")
    lines.append(f"start {system.start_wire} {system.start_direction}")
    tail = f" {system.target_direction}" if system.target_direction else ""
    lines.append(f"target {system.target_wire}{tail}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> OrderedCertificate:
    """One ``<rule id> <multiplicity>`` block per line, applied top to bottom."""
    blocks = []
    for no, raw in enumerate(text.splitlines(), 1):
        words = _strip(raw).split()
        if not words:
            continue
        if len(words) != 2 or not all(w.isdigit() for w in words):
            raise ParseError("expected '<rule id> <multiplicity>'", no)
        rid, m = int(words[0]), int(words[1])
        if m < 1:
            raise ParseError("multiplicity must be at least 1", no)
        blocks.append((rid, m))
    return OrderedCertificate(tuple(blocks))


def format_certificate(cert: OrderedCertificate) -> str:
    return "".join(f"{rid} {m}\n" for rid, m in cert.blocks)


__all__ = [
    "CrnDocument",
    "Digraph",
    "Hypergraph",
    "format_certificate",
    "format_crn",
    "format_digraph",
    "format_dimacs",
    "format_document",
    "format_gadgets",
    "format_hypergraph",
    "format_instance",
    "format_multiset",
    "format_rule",
    "parse_certificate",
    "parse_crn",
    "parse_digraph",
    "parse_dimacs",
    "parse_document",
    "parse_gadgets",
    "parse_hypergraph",
    "parse_instance",
    "parse_multiset",
]
