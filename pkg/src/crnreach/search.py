"""Bounded breadth-first oracle and ordered-application certificates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .classify import feed_forward_order
from .core import Config, Crn, Instance, ProblemKind, apply_run, volume
from .errors import IllegalRun, PreconditionViolated


class Verdict(str, Enum):
    REACHABLE = "reachable"
    UNREACHABLE = "unreachable"
    UNKNOWN = "unknown"


class Bound(str, Enum):
    STATE_CAP = "state-cap"
    VOLUME_CAP = "volume-cap"
    STEP_CAP = "step-cap"
    UNARY_CAP = "unary-cap"


@dataclass(frozen=True)
class Limits:
    state_cap: int = 10**6
    volume_cap: int = 64
    step_cap: int | None = None


DEFAULT_LIMITS = Limits()


@dataclass(frozen=True)
class OrderedCertificate:
    """Blocks of ``(rule id, multiplicity)`` applied left to right."""

    blocks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        blocks = tuple((int(r), int(m)) for r, m in self.blocks)
        if any(m < 1 for _, m in blocks):
            raise ValueError("certificate multiplicities must be at least 1")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_trace(cls, trace: Iterable[int]) -> OrderedCertificate:
        blocks: list[list[int]] = []
        for rid in trace:
            if blocks and blocks[-1][0] == rid:
                blocks[-1][1] += 1
            else:
                blocks.append([rid, 1])
        return cls(tuple((r, m) for r, m in blocks))

    def expand(self) -> list[int]:
        return [r for r, m in self.blocks for _ in range(m)]

    def __len__(self):
        return len(self.blocks)


@dataclass
class OracleOutcome:
    verdict: Verdict
    states_explored: int
    bound_hit: Bound | None = None
    trace: list[int] | None = None


class _Compiled:
    """Sparse per-rule data, with each rule filed under one trigger species."""

    def __init__(self, crn: Crn):
        self.rules = []
        occurrences = [0] * crn.n
        for r in crn.rules:
            for i, v in enumerate(r.reactants):
                if v:
                    occurrences[i] += 1
        self.by_trigger: list[list] = [[] for _ in range(crn.n)]
        self.always = []
        for r in crn.rules:
            need = tuple((i, v) for i, v in enumerate(r.reactants) if v)
            delta = tuple((i, d) for i, d in enumerate(r.delta) if d)
            entry = (r.id, need, delta, sum(r.delta))
            self.rules.append(entry)
            if need:
                trig = min((occurrences[i], i) for i, _ in need)[1]
                self.by_trigger[trig].append(entry)
            else:
                self.always.append(entry)

    def successors(self, c: Config):
        """Yield ``(rule id, successor, volume delta)`` for applicable rules."""
        for entry in self.always:
            yield entry[0], self._apply(c, entry[2]), entry[3]
        for i, v in enumerate(c):
            if not v:
                continue
            for rid, need, delta, dv in self.by_trigger[i]:
                for j, w in need:
                    if c[j] < w:
                        break
                else:
                    yield rid, self._apply(c, delta), dv

    @staticmethod
    def _apply(c: Config, delta) -> Config:
        lst = list(c)
        for i, d in delta:
            lst[i] += d
        return tuple(lst)


@dataclass
class ReachableSet:
    """Result of :func:`explore`: parent pointers over the visited states."""

    initial: Config
    parent: dict = field(repr=False)
    bound_hit: Bound | None = None
    found: Config | None = None
    edges: dict | None = field(default=None, repr=False)

    def __contains__(self, c) -> bool:
        return tuple(c) in self.parent

    def __len__(self) -> int:
        return len(self.parent)

    def __iter__(self):
        return iter(self.parent)

    def trace_to(self, c: Config) -> list[int]:
        c = tuple(c)
        trace = []
        while self.parent[c] is not None:
            prev, rid = self.parent[c]
            trace.append(rid)
            c = prev
        trace.reverse()
        return trace

    def path_to(self, c: Config) -> list[Config]:
        c = tuple(c)
        path = [c]
        while self.parent[c] is not None:
            c = self.parent[c][0]
            path.append(c)
        path.reverse()
        return path


def explore(
    crn: Crn,
    initial: Sequence[int],
    limits: Limits = DEFAULT_LIMITS,
    stop: Callable[[Config], bool] | None = None,
    record_edges: bool = False,
) -> ReachableSet:
    """Breadth-first closure of ``{initial}`` under single rule applications.

    Successors whose volume exceeds ``limits.volume_cap`` are dropped, at most
    ``limits.state_cap`` states are kept and no state deeper than
    ``limits.step_cap`` is expanded. Whichever of these actually discarded a
    state is reported in ``bound_hit``. If ``stop`` accepts a state the search
    ends there and the state is recorded in ``found``.
    """
    start = tuple(initial)
    comp = _Compiled(crn)
    parent: dict = {start: None}
    edges: dict | None = {} if record_edges else None
    result = ReachableSet(start, parent, edges=edges)
    if stop is not None and stop(start):
        result.found = start
        return result
    queue = deque([(start, volume(start), 0)])
    cap_v, cap_s, cap_d = limits.volume_cap, limits.state_cap, limits.step_cap
    hit = None
    while queue:
        c, vol, depth = queue.popleft()
        succ = [] if record_edges else None
        for rid, nxt, dv in comp.successors(c):
            if succ is not None:
                succ.append((rid, nxt))
            if nxt in parent:
                continue
            nvol = vol + dv
            if nvol > cap_v:
                hit = hit or Bound.VOLUME_CAP
                if succ is not None:
                    succ.pop()
                continue
            if cap_d is not None and depth >= cap_d:
                hit = hit or Bound.STEP_CAP
                if succ is not None:
                    succ.pop()
                continue
            if len(parent) >= cap_s:
                hit = Bound.STATE_CAP
                if succ is not None:
                    succ.pop()
                continue
            parent[nxt] = (c, rid)
            if stop is not None and stop(nxt):
                result.found = nxt
                result.bound_hit = hit
                return result
            queue.append((nxt, nvol, depth + 1))
        if edges is not None:
            edges[c] = succ
    result.bound_hit = hit
    return result


def _outcome(rs: ReachableSet) -> OracleOutcome:
    if rs.found is not None:
        return OracleOutcome(Verdict.REACHABLE, len(rs), rs.bound_hit, rs.trace_to(rs.found))
    if rs.bound_hit is not None:
        return OracleOutcome(Verdict.UNKNOWN, len(rs), rs.bound_hit)
    return OracleOutcome(Verdict.UNREACHABLE, len(rs))


def decide_reach_oracle(instance: Instance, limits: Limits = DEFAULT_LIMITS) -> OracleOutcome:
    target = instance.target
    rs = explore(instance.crn, instance.initial, limits, stop=lambda c: c == target)
    return _outcome(rs)


def decide_production_oracle(
    crn: Crn, initial: Sequence[int], species: str, k: int, limits: Limits = DEFAULT_LIMITS
) -> OracleOutcome:
    if k < 1:
        raise ValueError("k must be at least 1")
    i = crn.index[species]
    rs = explore(crn, initial, limits, stop=lambda c: c[i] >= k)
    return _outcome(rs)


def decide_universal_oracle(instance: Instance, limits: Limits = DEFAULT_LIMITS) -> OracleOutcome:
    """Is the target reachable from every configuration reachable from I?

    The closure R(I) is enumerated once with its transition edges; the target
    is reachable from M exactly when M lies in the backward closure of the
    target inside R(I), so one reverse search answers every M at once.
    """
    target = instance.target
    rs = explore(instance.crn, instance.initial, limits, record_edges=True)
    if rs.bound_hit is not None:
        # a dead end other than the target refutes universality regardless
        for c, succ in rs.edges.items():
            if not succ and c != target and _is_dead(instance.crn, c):
                return OracleOutcome(Verdict.UNREACHABLE, len(rs), rs.bound_hit)
        return OracleOutcome(Verdict.UNKNOWN, len(rs), rs.bound_hit)
    if target not in rs:
        return OracleOutcome(Verdict.UNREACHABLE, len(rs))
    preds: dict = {}
    for c, succ in rs.edges.items():
        for _, nxt in succ:
            preds.setdefault(nxt, []).append(c)
    seen = {target}
    queue = deque([target])
    while queue:
        c = queue.popleft()
        for p in preds.get(c, ()):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    if len(seen) == len(rs):
        return OracleOutcome(Verdict.REACHABLE, len(rs), None, rs.trace_to(target))
    return OracleOutcome(Verdict.UNREACHABLE, len(rs))


def _is_dead(crn: Crn, c: Config) -> bool:
    return not any(all(x >= y for x, y in zip(c, r.reactants)) for r in crn.rules)


def decide_oracle(instance: Instance, limits: Limits = DEFAULT_LIMITS) -> OracleOutcome:
    kind = instance.problem.kind
    if kind is ProblemKind.PRODUCE:
        p = instance.problem
        return decide_production_oracle(instance.crn, instance.initial, p.species, p.k, limits)
    if kind is ProblemKind.UNIVERSAL:
        return decide_universal_oracle(instance, limits)
    return decide_reach_oracle(instance, limits)


def replay(crn: Crn, initial: Sequence[int], cert: OrderedCertificate) -> Config:
    """Fold :func:`apply_run` over the blocks; raises IllegalRun or KeyError."""
    rules = {r.id: r for r in crn.rules}
    c = tuple(initial)
    for rid, m in cert.blocks:
        c = apply_run(c, rules[rid], m)
    return c


def verify_certificate(instance: Instance, cert: OrderedCertificate) -> bool:
    try:
        end = replay(instance.crn, instance.initial, cert)
    except (IllegalRun, KeyError):
        return False
    return end == instance.target


def max_run(c: Config, reactants: Config, delta: Config) -> int | None:
    """Largest k such that k consecutive applications are legal at ``c``.

    None when the run can go on forever (no species is net-consumed).
    """
    if any(x < y for x, y in zip(c, reactants)):
        return 0
    best = None
    for x, need, d in zip(c, reactants, delta):
        if d < 0:
            k = (x - need) // (-d) + 1
            best = k if best is None else min(best, k)
    return best


def search_certificate(
    instance: Instance, limits: Limits = DEFAULT_LIMITS
) -> OrderedCertificate | None:
    """Depth-first search over per-rule multiplicities in feed-forward order.

    Every rule of a feed-forward CRN without autogenesis rules consumes some
    species, so each block's multiplicity is bounded by what the configuration
    right before it can feed. Visited ``(position, configuration)`` pairs are
    memoised; at most ``limits.state_cap`` of them are expanded.
    """
    crn = instance.crn
    order = feed_forward_order(crn)
    if order is None:
        raise PreconditionViolated("CRN is not feed-forward")
    if any(r.is_autogenesis for r in crn.rules):
        raise PreconditionViolated("CRN has autogenesis rules")
    rules = [crn.rule(rid) for rid in order]
    target = instance.target
    seen: set = set()
    blocks: list[tuple[int, int]] = []

    def dfs(pos: int, c: Config) -> bool:
        if pos == len(rules):
            return c == target
        if (pos, c) in seen or len(seen) >= limits.state_cap:
            return False
        seen.add((pos, c))
        r = rules[pos]
        top = max_run(c, r.reactants, r.delta)
        cur = c
        for m in range(top + 1):
            if m:
                blocks.append((r.id, m))
            if dfs(pos + 1, cur):
                return True
            if m:
                blocks.pop()
            cur = tuple(x + d for x, d in zip(cur, r.delta))
        return False

    if dfs(0, tuple(instance.initial)):
        return OrderedCertificate(tuple(blocks))
    return None
