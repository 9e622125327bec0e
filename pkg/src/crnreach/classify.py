"""Restriction predicates used to pick a decision procedure."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .core import Crn, Rule
from .errors import NotVoid2System


class Monotonicity(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    PRESERVING = "preserving"
    MIXED = "mixed"


def _reactant_set(r: Rule) -> set[int]:
    return {i for i, v in enumerate(r.reactants) if v}


def _product_set(r: Rule) -> set[int]:
    return {i for i, v in enumerate(r.products) if v}


def dependency_edges(rules: Iterable[Rule]) -> dict[int, set[int]]:
    """Rule id -> ids of the other rules that must come after it.

    ``R -> S`` whenever a species occurring among R's products occurs among
    S's reactants. Occurrence includes catalysts; self-loops are dropped.
    """
    rules = list(rules)
    consumers: dict[int, set[int]] = {}
    for r in rules:
        for i in _reactant_set(r):
            consumers.setdefault(i, set()).add(r.id)
    edges = {}
    for r in rules:
        out = set()
        for i in _product_set(r):
            out |= consumers.get(i, set())
        out.discard(r.id)
        edges[r.id] = out
    return edges


def feed_forward_order(crn: Crn) -> tuple[int, ...] | None:
    """A feed-forward ordering of rule ids, or None if none exists.

    Kahn's algorithm, always taking the smallest available id, so the result
    is deterministic.
    """
    edges = dependency_edges(crn.rules)
    indeg = {rid: 0 for rid in edges}
    for out in edges.values():
        for s in out:
            indeg[s] += 1
    ready = [rid for rid, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        rid = heapq.heappop(ready)
        order.append(rid)
        for s in edges[rid]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(ready, s)
    if len(order) != len(edges):
        return None
    return tuple(order)


def is_feed_forward_order(crn: Crn, order: Iterable[int]) -> bool:
    """Check an ordering against the definition directly."""
    pos = {rid: k for k, rid in enumerate(order)}
    if sorted(pos) != sorted(r.id for r in crn.rules):
        return False
    for r in crn.rules:
        prods = _product_set(r)
        for s in crn.rules:
            if s.id != r.id and pos[s.id] < pos[r.id] and prods & _reactant_set(s):
                return False
    return True


@dataclass(frozen=True)
class Degrees:
    source: dict[str, int]
    consuming: dict[str, int]
    max_source: int
    max_consuming: int


def source_consuming_degrees(crn: Crn) -> Degrees:
    """Per species, the number of rules that net-produce / net-consume it."""
    src = [0] * crn.n
    con = [0] * crn.n
    for r in crn.rules:
        for i, d in enumerate(r.delta):
            if d > 0:
                src[i] += 1
            elif d < 0:
                con[i] += 1
    return Degrees(
        source=dict(zip(crn.species, src)),
        consuming=dict(zip(crn.species, con)),
        max_source=max(src, default=0),
        max_consuming=max(con, default=0),
    )


def monotonicity(crn: Crn) -> Monotonicity:
    deltas = [sum(r.delta) for r in crn.rules]
    if all(d == 0 for d in deltas):
        return Monotonicity.PRESERVING
    if all(d > 0 for d in deltas):
        return Monotonicity.INCREASING
    if all(d < 0 for d in deltas):
        return Monotonicity.DECREASING
    return Monotonicity.MIXED


def is_void2(crn: Crn) -> bool:
    return bool(crn.rules) and all(r.size == (2, 0) for r in crn.rules)


def is_unimolecular(crn: Crn) -> bool:
    return all(r.size == (1, 1) for r in crn.rules)


def bipartite_partition(crn: Crn) -> tuple[tuple[str, ...], tuple[str, ...]] | None:
    """Two-colour the species graph of an all-(2,0) CRN.

    Each rule ``a + b -> 0`` is an edge; ``2a -> 0`` is a self-loop and makes
    the system non-bipartite. Species in no rule go to the first part.
    """
    if not all(r.size == (2, 0) for r in crn.rules):
        raise NotVoid2System("every rule must have size (2,0)")
    adj: list[set[int]] = [set() for _ in range(crn.n)]
    for r in crn.rules:
        pair = [i for i, v in enumerate(r.reactants) for _ in range(v)]
        a, b = pair
        if a == b:
            return None
        adj[a].add(b)
        adj[b].add(a)
    color = [-1] * crn.n
    for start in range(crn.n):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    left = tuple(s for s, c in zip(crn.species, color) if c == 0)
    right = tuple(s for s, c in zip(crn.species, color) if c == 1)
    return left, right


def leaf_rules(crn: Crn) -> frozenset[int]:
    """Rules none of whose products occur as reactants of another rule."""
    leaves = set()
    for r in crn.rules:
        prods = _product_set(r)
        if not any(prods & _reactant_set(s) for s in crn.rules if s.id != r.id):
            leaves.add(r.id)
    return frozenset(leaves)


def root_rules(crn: Crn) -> frozenset[int]:
    """Rules none of whose reactants occur as products of another rule."""
    return leaf_rules(crn.reversed())


@dataclass(frozen=True)
class ClassificationProfile:
    feed_forward_order: tuple[int, ...] | None
    degrees: Degrees
    has_void: bool
    has_autogenesis: bool
    has_catalyst: bool
    rule_size_bound: tuple[int, int]
    monotonicity: Monotonicity
    is_population_protocol: bool
    is_unimolecular: bool
    is_void2: bool
    bipartition: tuple[tuple[str, ...], tuple[str, ...]] | None
    leaf_rules: frozenset[int]

    @property
    def feed_forward(self) -> bool:
        return self.feed_forward_order is not None

    @property
    def max_source(self) -> int:
        return self.degrees.max_source

    @property
    def max_consuming(self) -> int:
        return self.degrees.max_consuming

    def to_dict(self) -> dict:
        return {
            "feed_forward": self.feed_forward,
            "feed_forward_order": list(self.feed_forward_order) if self.feed_forward else None,
            "max_source": self.max_source,
            "max_consuming": self.max_consuming,
            "source_degrees": self.degrees.source,
            "consuming_degrees": self.degrees.consuming,
            "has_void": self.has_void,
            "has_autogenesis": self.has_autogenesis,
            "has_catalyst": self.has_catalyst,
            "rule_size_bound": list(self.rule_size_bound),
            "monotonicity": self.monotonicity.value,
            "population_protocol": self.is_population_protocol,
            "unimolecular": self.is_unimolecular,
            "void2": self.is_void2,
            "bipartition": [list(p) for p in self.bipartition] if self.bipartition else None,
            "leaf_rules": sorted(self.leaf_rules),
        }


def classify(crn: Crn) -> ClassificationProfile:
    void2 = is_void2(crn)
    return ClassificationProfile(
        feed_forward_order=feed_forward_order(crn),
        degrees=source_consuming_degrees(crn),
        has_void=any(r.is_void for r in crn.rules),
        has_autogenesis=any(r.is_autogenesis for r in crn.rules),
        has_catalyst=any(
            a == b > 0 for r in crn.rules for a, b in zip(r.reactants, r.products)
        ),
        rule_size_bound=(
            max((r.size[0] for r in crn.rules), default=0),
            max((r.size[1] for r in crn.rules), default=0),
        ),
        monotonicity=monotonicity(crn),
        is_population_protocol=all(r.size == (2, 2) for r in crn.rules),
        is_unimolecular=is_unimolecular(crn),
        is_void2=void2,
        bipartition=bipartite_partition(crn) if void2 else None,
        leaf_rules=leaf_rules(crn),
    )
