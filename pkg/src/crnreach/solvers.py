"""Polynomial-time decision procedures and the dispatcher choosing among them."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .classify import ClassificationProfile, bipartite_partition, classify, leaf_rules
from .core import Config, Crn, Instance, ProblemKind, Rule, add, dominates, volume
from .errors import (
    NotBipartite,
    NotUnimolecular,
    NotVoid2System,
    PreconditionViolated,
    VolumeCapExceeded,
)
from .graphs import FlowNetwork, maximum_matching
from .search import (
    DEFAULT_LIMITS,
    Bound,
    Limits,
    OrderedCertificate,
    Verdict,
    decide_oracle,
)

log = logging.getLogger(__name__)

DEFAULT_UNARY_CAP = 5000


@dataclass
class Decision:
    verdict: Verdict
    method: str
    certificate: OrderedCertificate | None = None
    witness: dict[int, int] | None = None
    bound: Bound | None = None
    states_explored: int | None = None
    notes: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def reachable(self) -> bool:
        return self.verdict is Verdict.REACHABLE

    def to_dict(self) -> dict:
        d = {
            "verdict": self.verdict.value,
            "method": self.method,
            "bound": self.bound.value if self.bound else None,
            "witness": {str(k): v for k, v in sorted(self.witness.items())} if self.witness else None,
            "certificate": [list(b) for b in self.certificate.blocks] if self.certificate else None,
        }
        if self.states_explored is not None:
            d["states_explored"] = self.states_explored
        if self.notes:
            d["notes"] = list(self.notes)
        if self.warnings:
            d["warnings"] = list(self.warnings)
        return d


@dataclass(frozen=True)
class PruneResult:
    x: int
    pruned: Config


def reverse_rules(rules: Sequence[Rule]) -> list[Rule]:
    return [r.reversed() for r in rules]


def _finish_prune(target: Config, rule: Rule, x: int) -> PruneResult | None:
    pruned = add(target, rule.delta, -x)
    if any(v < 0 for v in pruned):
        return None
    if x >= 1:
        # first and last application of the trailing block must both be legal
        if not dominates(pruned, rule.reactants):
            return None
        if not dominates(add(target, rule.delta, -1), rule.reactants):
            return None
    return PruneResult(x, pruned)


def prune_step(target: Sequence[int], initial: Sequence[int], rule: Rule) -> PruneResult | None:
    """Remove the trailing block of a non-void leaf rule from ``target``.

    Species the rule net-produces are touched by no other rule of a
    single-source system with the rule as a leaf, so each fixes the block
    length ``x``. They must all agree on a non-negative integer. Returns None
    when ``target`` is inconsistent with ``initial`` for this rule.
    """
    if rule.is_void:
        raise PreconditionViolated("prune_step needs a non-void rule")
    target, initial = tuple(target), tuple(initial)
    x = None
    for i, d in enumerate(rule.delta):
        if d > 0:
            diff = target[i] - initial[i]
            if diff < 0 or diff % d:
                return None
            if x is None:
                x = diff // d
            elif x != diff // d:
                return None
    return _finish_prune(target, rule, x)


def prune_void_step(
    target: Sequence[int], initial: Sequence[int], rule: Rule
) -> PruneResult | None:
    """Void-leaf pruning: ``x`` solves ``D[i] - x*delta[i] = I[i]`` for every
    species the rule changes. Exact only when no other rule produces them."""
    target, initial = tuple(target), tuple(initial)
    x = None
    for i, d in enumerate(rule.delta):
        if d:
            diff = target[i] - initial[i]
            if diff % d:
                return None
            q = diff // d
            if q < 0 or (x is not None and x != q):
                return None
            x = q
    return _finish_prune(target, rule, x or 0)


def _first_leaf(candidates: list[int]) -> int:
    return candidates[0]


@dataclass
class _PruneRun:
    verdict: Verdict
    order: list[tuple[int, int]]
    used_void: bool = False
    stuck: str | None = None


def _prune_all(
    crn: Crn,
    initial: Config,
    target: Config,
    allow_void: bool,
    pick: Callable[[list[int]], int] = _first_leaf,
) -> _PruneRun:
    rules = {r.id: r for r in crn.rules}
    order: list[tuple[int, int]] = []
    used_void = False
    d = tuple(target)
    while rules:
        leaves = sorted(leaf_rules(crn.with_rules(rules.values())))
        plain = [rid for rid in leaves if not rules[rid].is_void]
        voids = [rid for rid in leaves if rules[rid].is_void]
        if plain:
            rid = pick(plain)
            res = prune_step(d, initial, rules[rid])
        elif voids and allow_void:
            rid = pick(voids)
            used_void = True
            res = prune_void_step(d, initial, rules[rid])
        else:
            why = "no leaf rule" if not leaves else "only void leaf rules remain"
            return _PruneRun(Verdict.UNKNOWN, order, used_void, why)
        if res is None:
            return _PruneRun(Verdict.UNREACHABLE, order, used_void)
        order.append((rid, res.x))
        d = res.pruned
        del rules[rid]
    return _PruneRun(Verdict.REACHABLE if d == tuple(initial) else Verdict.UNREACHABLE, order, used_void)


def _certificate(order: list[tuple[int, int]]) -> OrderedCertificate:
    # the first rule pruned is the last one applied
    return OrderedCertificate(tuple((rid, x) for rid, x in reversed(order) if x))


def _require_reach(instance: Instance) -> None:
    if instance.problem.kind is not ProblemKind.REACH:
        raise PreconditionViolated("this procedure decides plain reachability only")


def _check_ff(profile: ClassificationProfile, source: bool, void: bool,
              consuming: bool = False, autogenesis: bool = False) -> None:
    if not profile.feed_forward:
        raise PreconditionViolated("CRN is not feed-forward")
    if source and profile.max_source > 1:
        raise PreconditionViolated("CRN is not single-source")
    if consuming and profile.max_consuming > 1:
        raise PreconditionViolated("CRN is not single-consuming")
    if void and profile.has_void:
        raise PreconditionViolated("CRN has void rules")
    if autogenesis and profile.has_autogenesis:
        raise PreconditionViolated("CRN has autogenesis rules")


def decide_ff_1source_novoid(
    instance: Instance, check: bool = True, pick: Callable[[list[int]], int] = _first_leaf
) -> Decision:
    """Feed-forward, single-source, no void rules: prune leaf rules one by one.

    ``pick`` chooses among the current leaf rules (default: lowest id).
    """
    _require_reach(instance)
    if check:
        _check_ff(classify(instance.crn), source=True, void=True)
    run = _prune_all(instance.crn, instance.initial, instance.target, allow_void=False, pick=pick)
    dec = Decision(run.verdict, "ff-ss-nv", witness=dict(run.order))
    if run.stuck:
        dec.notes.append(run.stuck)
    if run.verdict is Verdict.REACHABLE:
        dec.certificate = _certificate(run.order)
    return dec


def decide_ff_1consuming_noautogenesis(instance: Instance, check: bool = True) -> Decision:
    """Feed-forward, single-consuming, no autogenesis: reverse the rules, swap
    the endpoints and prune."""
    _require_reach(instance)
    if check:
        _check_ff(classify(instance.crn), source=False, void=False, consuming=True, autogenesis=True)
    rev = Instance(instance.crn.reversed(), instance.target, instance.initial)
    inner = decide_ff_1source_novoid(rev, check=False)
    dec = Decision(inner.verdict, "ff-sc-na", witness=inner.witness, notes=inner.notes)
    if inner.certificate is not None:
        # a run D -> I under the reversed rules, read backwards, is a run I -> D
        dec.certificate = OrderedCertificate(tuple(reversed(inner.certificate.blocks)))
    return dec


def decide_ff_1source_1consuming(
    instance: Instance, limits: Limits = DEFAULT_LIMITS, check: bool = True
) -> Decision:
    """Feed-forward, single-source and single-consuming, void rules allowed.

    Non-void leaves are pruned first; a void leaf is pruned by solving its
    count equation. That equation ignores other rules producing what the void
    rule consumes, so an unreachable verdict reached after pruning a void rule
    is re-checked with the bounded oracle (method ``fallback``) and any
    disagreement is logged.
    """
    _require_reach(instance)
    if check:
        _check_ff(classify(instance.crn), source=True, void=False, consuming=True)
    run = _prune_all(instance.crn, instance.initial, instance.target, allow_void=True)
    if run.verdict is Verdict.REACHABLE:
        return Decision(run.verdict, "ff-ss-sc", _certificate(run.order), dict(run.order))
    if run.verdict is Verdict.UNREACHABLE and not run.used_void:
        return Decision(run.verdict, "ff-ss-sc", witness=dict(run.order))
    dec = oracle_decision(instance, limits, method="fallback")
    reason = run.stuck or "pruning rejected after a void rule was pruned"
    dec.notes.append(f"pruning inconclusive ({reason}); decided by the bounded oracle")
    if dec.verdict is Verdict.UNKNOWN and not any(r.is_autogenesis for r in instance.crn.rules):
        # single-consuming without autogenesis: the reversal procedure is exact
        exact = decide_ff_1consuming_noautogenesis(instance, check=False)
        dec = Decision(exact.verdict, "fallback", exact.certificate, exact.witness,
                       notes=dec.notes + ["oracle inconclusive; decided by reversal pruning"])
    if run.verdict is not Verdict.UNKNOWN and dec.verdict not in (run.verdict, Verdict.UNKNOWN):
        log.warning(
            "pruning divergence: void-rule pruning says %s, oracle says %s",
            run.verdict.value,
            dec.verdict.value,
        )
        dec.notes.append(f"pruning verdict {run.verdict.value} overridden by oracle")
    return dec


def _require_void2(crn: Crn) -> None:
    if not all(r.size == (2, 0) for r in crn.rules):
        raise NotVoid2System("every rule must have size (2,0)")


def _pair(rule: Rule) -> tuple[int, int]:
    return tuple(i for i, v in enumerate(rule.reactants) for _ in range(v))


def _void2_certificate(witness: dict[int, int]) -> OrderedCertificate:
    # void rules only consume, so any block order of a feasible witness is legal
    return OrderedCertificate(tuple((rid, m) for rid, m in sorted(witness.items()) if m))


def decide_void2_matching(instance: Instance, unary_cap: int = DEFAULT_UNARY_CAP) -> Decision:
    """(2,0) rules: perfect matching on the unary expansion of ``I - D``."""
    _require_reach(instance)
    crn, initial, target = instance.crn, instance.initial, instance.target
    _require_void2(crn)
    if not dominates(initial, target):
        return Decision(Verdict.UNREACHABLE, "void2-matching", notes=["target exceeds initial"])
    excess = [a - b for a, b in zip(initial, target)]
    total = sum(excess)
    if total > unary_cap:
        raise VolumeCapExceeded(f"expanded graph needs {total} vertices, cap is {unary_cap}")
    starts = [0] * crn.n
    for i in range(1, crn.n):
        starts[i] = starts[i - 1] + excess[i - 1]
    group = [i for i, x in enumerate(excess) for _ in range(x)]
    rule_of: dict[tuple[int, int], int] = {}
    for r in crn.rules:
        a, b = _pair(r)
        rule_of.setdefault((min(a, b), max(a, b)), r.id)
    adj: list[list[int]] = [[] for _ in range(total)]
    for (a, b) in rule_of:
        ga = range(starts[a], starts[a] + excess[a])
        gb = range(starts[b], starts[b] + excess[b])
        if a == b:
            for u in ga:
                adj[u].extend(v for v in ga if v != u)
        else:
            for u in ga:
                adj[u].extend(gb)
            for v in gb:
                adj[v].extend(ga)
    mate = maximum_matching(total, adj)
    if any(m == -1 for m in mate):
        return Decision(Verdict.UNREACHABLE, "void2-matching")
    witness: dict[int, int] = {}
    for u, v in enumerate(mate):
        if u < v:
            a, b = group[u], group[v]
            rid = rule_of[(min(a, b), max(a, b))]
            witness[rid] = witness.get(rid, 0) + 1
    return Decision(Verdict.REACHABLE, "void2-matching", _void2_certificate(witness), witness)


def decide_void2_flow(instance: Instance, partition=None) -> Decision:
    """Bipartite (2,0) rules: max flow from one side of the species to the other.

    Reachable when every source edge and every sink edge is saturated, i.e.
    the two sides consume the same amount and the flow carries all of it.
    """
    _require_reach(instance)
    crn, initial, target = instance.crn, instance.initial, instance.target
    _require_void2(crn)
    if partition is None:
        partition = bipartite_partition(crn)
    if partition is None:
        raise NotBipartite("species graph is not bipartite")
    if not dominates(initial, target):
        return Decision(Verdict.UNREACHABLE, "void2-flow", notes=["target exceeds initial"])
    left = {crn.index[s] for s in partition[0]}
    excess = [a - b for a, b in zip(initial, target)]
    net = FlowNetwork()
    src, sink = "source", "sink"
    net.add_edge(src, sink, 0)
    for i, x in enumerate(excess):
        if i in left:
            net.add_edge(src, ("s", i), x)
        else:
            net.add_edge(("s", i), sink, x)
    rule_of: dict[tuple[int, int], int] = {}
    for r in crn.rules:
        a, b = _pair(r)
        if (a in left) == (b in left):
            raise NotBipartite(f"rule {r.id} consumes two species of one side")
        if b in left:
            a, b = b, a
        if (a, b) not in rule_of:
            rule_of[(a, b)] = r.id
            net.add_edge(("s", a), ("s", b), None)
    flow = net.max_flow(src, sink)
    left_total = sum(x for i, x in enumerate(excess) if i in left)
    right_total = sum(excess) - left_total
    if not (flow == left_total == right_total):
        return Decision(Verdict.UNREACHABLE, "void2-flow")
    witness = {}
    for (a, b), rid in rule_of.items():
        f = net.flow(("s", a), ("s", b))
        if f:
            witness[rid] = f
    return Decision(Verdict.REACHABLE, "void2-flow", _void2_certificate(witness), witness)


def _require_unimolecular(crn: Crn) -> None:
    if not all(r.size == (1, 1) for r in crn.rules):
        raise NotUnimolecular("every rule must have size (1,1)")


def _successor_map(crn: Crn) -> dict[int, list[tuple[int, int]]]:
    succ: dict[int, list[tuple[int, int]]] = {}
    for r in crn.rules:
        a = r.reactants.index(1)
        b = r.products.index(1)
        succ.setdefault(a, []).append((b, r.id))
    return succ


def _bfs_paths(succ, start: int) -> dict[int, list[int]]:
    """Species reachable from ``start`` with one rule path to each."""
    paths = {start: []}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v, rid in succ.get(u, ()):
            if v not in paths:
                paths[v] = paths[u] + [rid]
                queue.append(v)
    return paths


def decide_unimolecular(instance: Instance) -> Decision:
    """(1,1) rules move single tokens along a digraph of species, independently.

    D is reachable iff I's tokens can be assigned to D's demand so that every
    token's species can reach its assigned species: a transportation problem
    over the reachability closure, solved as a max flow.
    """
    _require_reach(instance)
    crn, initial, target = instance.crn, instance.initial, instance.target
    _require_unimolecular(crn)
    if volume(initial) != volume(target):
        return Decision(Verdict.UNREACHABLE, "unimolecular", notes=["volumes differ"])
    succ = _successor_map(crn)
    net = FlowNetwork()
    net.add_edge("source", "sink", 0)
    paths = {}
    for u, supply in enumerate(initial):
        if not supply:
            continue
        net.add_edge("source", ("u", u), supply)
        paths[u] = _bfs_paths(succ, u)
        for v in paths[u]:
            if target[v]:
                net.add_edge(("u", u), ("v", v), None)
    for v, demand in enumerate(target):
        if demand:
            net.add_edge(("v", v), "sink", demand)
    if net.max_flow("source", "sink") != volume(target):
        return Decision(Verdict.UNREACHABLE, "unimolecular")
    blocks = []
    for u in paths:
        for v, path in paths[u].items():
            if not target[v] or not path:
                continue
            f = net.flow(("u", u), ("v", v))
            blocks.extend((rid, f) for rid in path if f)
    cert = OrderedCertificate(tuple(blocks))
    witness: dict[int, int] = {}
    for rid, m in blocks:
        witness[rid] = witness.get(rid, 0) + m
    return Decision(Verdict.REACHABLE, "unimolecular", cert, witness)


def produce_unimolecular(instance: Instance) -> Decision:
    """(1,1) production: count I's tokens on species with a path to the target."""
    crn, problem = instance.crn, instance.problem
    if problem.kind is not ProblemKind.PRODUCE:
        raise PreconditionViolated("instance is not a production problem")
    _require_unimolecular(crn)
    t = crn.index[problem.species]
    preds: dict[int, list[int]] = {}
    for a, outs in _successor_map(crn).items():
        for b, _ in outs:
            preds.setdefault(b, []).append(a)
    seen = {t}
    queue = deque([t])
    while queue:
        v = queue.popleft()
        for u in preds.get(v, ()):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    supply = sum(instance.initial[u] for u in seen)
    verdict = Verdict.REACHABLE if supply >= problem.k else Verdict.UNREACHABLE
    return Decision(verdict, "unimolecular-production", notes=[f"{supply} tokens can reach {problem.species}"])


def oracle_decision(instance: Instance, limits: Limits = DEFAULT_LIMITS, method: str = "oracle") -> Decision:
    out = decide_oracle(instance, limits)
    dec = Decision(out.verdict, method, bound=out.bound_hit if out.verdict is Verdict.UNKNOWN else None,
                   states_explored=out.states_explored)
    if out.trace:
        dec.certificate = OrderedCertificate.from_trace(out.trace)
    return dec


METHODS = (
    "unimolecular",
    "ff-ss-nv",
    "ff-sc-na",
    "ff-ss-sc",
    "void2-flow",
    "void2-matching",
    "oracle",
)


def precondition_problem(method: str, profile: ClassificationProfile) -> str | None:
    """Why ``method`` is outside its guaranteed class, or None if it is not."""
    try:
        if method == "ff-ss-nv":
            _check_ff(profile, source=True, void=True)
        elif method == "ff-sc-na":
            _check_ff(profile, source=False, void=False, consuming=True, autogenesis=True)
        elif method == "ff-ss-sc":
            _check_ff(profile, source=True, void=False, consuming=True)
        elif method == "void2-flow" and profile.bipartition is None:
            return "CRN is not a bipartite (2,0) system"
        elif method == "void2-matching" and not profile.is_void2:
            return "CRN is not a (2,0) system"
        elif method == "unimolecular" and not profile.is_unimolecular:
            return "CRN is not unimolecular"
    except PreconditionViolated as exc:
        return str(exc)
    return None


def run_method(
    method: str,
    instance: Instance,
    limits: Limits = DEFAULT_LIMITS,
    unary_cap: int = DEFAULT_UNARY_CAP,
    profile: ClassificationProfile | None = None,
) -> Decision:
    """Run one named procedure, even outside its class (flagged in warnings)."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    profile = profile or classify(instance.crn)
    problem = precondition_problem(method, profile)
    kind = instance.problem.kind
    if method == "oracle":
        dec = oracle_decision(instance, limits)
    elif method == "unimolecular" and kind is ProblemKind.PRODUCE:
        dec = produce_unimolecular(instance)
    elif kind is not ProblemKind.REACH:
        raise PreconditionViolated(f"{method} decides plain reachability only")
    elif method == "unimolecular":
        dec = decide_unimolecular(instance)
    elif method == "ff-ss-nv":
        dec = decide_ff_1source_novoid(instance, check=False)
    elif method == "ff-sc-na":
        dec = decide_ff_1consuming_noautogenesis(instance, check=False)
    elif method == "ff-ss-sc":
        dec = decide_ff_1source_1consuming(instance, limits, check=False)
    elif method == "void2-flow":
        dec = decide_void2_flow(instance)
    else:
        dec = decide_void2_matching(instance, unary_cap)
    if problem is not None:
        dec.warnings.append(f"precondition_violated: {problem}")
    return dec


def dispatch(
    instance: Instance,
    limits: Limits = DEFAULT_LIMITS,
    unary_cap: int = DEFAULT_UNARY_CAP,
    profile: ClassificationProfile | None = None,
) -> Decision:
    """Route an instance to the first procedure whose class contains it."""
    profile = profile or classify(instance.crn)
    kind = instance.problem.kind
    if kind is ProblemKind.PRODUCE:
        if profile.is_unimolecular:
            return produce_unimolecular(instance)
        return oracle_decision(instance, limits)
    if kind is ProblemKind.UNIVERSAL:
        return oracle_decision(instance, limits)
    if profile.is_unimolecular:
        return decide_unimolecular(instance)
    if profile.feed_forward:
        single_source = profile.max_source <= 1
        single_consuming = profile.max_consuming <= 1
        if single_source and not profile.has_void:
            return decide_ff_1source_novoid(instance, check=False)
        # ahead of the reversal procedure so that void-rule pruning, with its
        # logged oracle fallback, is what runs on this class
        if single_source and single_consuming:
            return decide_ff_1source_1consuming(instance, limits, check=False)
        if single_consuming and not profile.has_autogenesis:
            return decide_ff_1consuming_noautogenesis(instance, check=False)
    if profile.is_void2:
        if profile.bipartition is not None:
            return decide_void2_flow(instance, profile.bipartition)
        try:
            return decide_void2_matching(instance, unary_cap)
        except VolumeCapExceeded as exc:
            return Decision(Verdict.UNKNOWN, "void2-matching", bound=Bound.UNARY_CAP, notes=[str(exc)])
    return oracle_decision(instance, limits)
