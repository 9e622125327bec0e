"""Species, configurations, rules and the application semantics.

A configuration is a plain tuple of non-negative Python ints, one entry per
species of the owning :class:`Crn`. Counts are never truncated, so binary
encoded volumes (``2**40`` and beyond) are handled exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import CrnError, IllegalRun, NotApplicable

Config = tuple  # tuple[int, ...]

SPECIES_RE = re.compile(r"[A-Za-z][A-Za-z0-9_^*'.]*\Z")


def volume(c: Sequence[int]) -> int:
    return sum(c)


def zero(n: int) -> Config:
    return (0,) * n


def check_config(c: Sequence[int], n: int) -> Config:
    c = tuple(c)
    if len(c) != n:
        raise CrnError(f"configuration has {len(c)} entries, expected {n}")
    if {type(v) for v in c} <= {int} and (not c or min(c) >= 0):
        return c
    for v in c:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise CrnError(f"configuration entries must be non-negative ints, got {v!r}")
    return c


def add(c: Sequence[int], d: Sequence[int], k: int = 1) -> Config:
    return tuple(x + k * y for x, y in zip(c, d))


def dominates(c: Sequence[int], r: Sequence[int]) -> bool:
    return all(x >= y for x, y in zip(c, r))


@dataclass(frozen=True)
class Rule:
    """A reaction ``reactants -> products`` with a stable integer id."""

    reactants: Config
    products: Config
    id: int = 0
    delta: Config = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r, p = tuple(self.reactants), tuple(self.products)
        if len(r) != len(p):
            raise CrnError("reactant and product vectors differ in length")
        check_config(r, len(r))
        check_config(p, len(p))
        if not any(r) and not any(p):
            raise CrnError("the empty rule 0 -> 0 is not allowed")
        object.__setattr__(self, "reactants", r)
        object.__setattr__(self, "products", p)
        object.__setattr__(self, "delta", tuple(b - a for a, b in zip(r, p)))

    @property
    def size(self) -> tuple[int, int]:
        return (sum(self.reactants), sum(self.products))

    @property
    def is_void(self) -> bool:
        return all(d <= 0 for d in self.delta)

    @property
    def is_autogenesis(self) -> bool:
        return all(d >= 0 for d in self.delta)

    def reversed(self) -> Rule:
        return Rule(self.products, self.reactants, self.id)


@dataclass(frozen=True)
class RuleTraits:
    application_vector: Config
    size: tuple[int, int]
    is_void: bool
    is_autogenesis: bool
    produced: frozenset
    consumed: frozenset
    catalyst: frozenset
    volume_delta: int


def rule_traits(rule: Rule) -> RuleTraits:
    """Derived facts about one rule; species sets hold species indices."""
    produced, consumed, catalyst = set(), set(), set()
    for i, (a, b) in enumerate(zip(rule.reactants, rule.products)):
        if a < b:
            produced.add(i)
        elif a > b:
            consumed.add(i)
        elif a > 0:
            catalyst.add(i)
    return RuleTraits(
        application_vector=rule.delta,
        size=rule.size,
        is_void=rule.is_void,
        is_autogenesis=rule.is_autogenesis,
        produced=frozenset(produced),
        consumed=frozenset(consumed),
        catalyst=frozenset(catalyst),
        volume_delta=sum(rule.delta),
    )


def is_applicable(c: Sequence[int], rule: Rule) -> bool:
    return dominates(c, rule.reactants)


def apply_once(c: Sequence[int], rule: Rule) -> Config:
    if not is_applicable(c, rule):
        raise NotApplicable(f"rule {rule.id} is not applicable")
    return add(c, rule.delta)


def apply_run(c: Sequence[int], rule: Rule, k: int) -> Config:
    """Apply ``rule`` ``k`` times in a row, in O(|species|).

    Each species count is affine in the application index, so the smallest
    count of every species over the run is attained at the first or the last
    application. Checking applicability at ``c`` and ``c + (k-1)*delta``
    therefore decides legality of the whole block.
    """
    if k < 0:
        raise IllegalRun("negative multiplicity")
    if k == 0:
        return tuple(c)
    if not dominates(c, rule.reactants):
        raise IllegalRun(f"rule {rule.id} is not applicable at the start of the run")
    last = add(c, rule.delta, k - 1)
    if not dominates(last, rule.reactants):
        raise IllegalRun(f"rule {rule.id} is not applicable at application {k}")
    return add(last, rule.delta)


@dataclass(frozen=True)
class Crn:
    """An ordered species alphabet and a list of rules over it, kept in id order."""

    species: tuple[str, ...]
    rules: tuple[Rule, ...]
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        species = tuple(self.species)
        rules = tuple(sorted(self.rules, key=lambda r: r.id))
        for name in species:
            if not SPECIES_RE.match(name):
                raise CrnError(f"invalid species name {name!r}")
        if len(set(species)) != len(species):
            raise CrnError("duplicate species names")
        ids = [r.id for r in rules]
        if len(set(ids)) != len(ids):
            raise CrnError("duplicate rule ids")
        for r in rules:
            if len(r.reactants) != len(species):
                raise CrnError(f"rule {r.id} is not sized to the alphabet")
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(species)})

    @classmethod
    def build(
        cls,
        rules: Iterable[tuple[Mapping[str, int], Mapping[str, int]]],
        species: Iterable[str] = (),
    ) -> Crn:
        """Build from ``(reactants, products)`` count maps.

        Species missing from ``species`` are appended in order of first
        appearance.
        """
        rules = [(dict(a), dict(b)) for a, b in rules]
        names = list(species)
        seen = set(names)
        for a, b in rules:
            for s in list(a) + list(b):
                if s not in seen:
                    seen.add(s)
                    names.append(s)
        idx = {s: i for i, s in enumerate(names)}

        def vec(m):
            v = [0] * len(names)
            for s, k in m.items():
                v[idx[s]] += k
            return tuple(v)

        return cls(tuple(names), tuple(Rule(vec(a), vec(b), i) for i, (a, b) in enumerate(rules)))

    @property
    def n(self) -> int:
        return len(self.species)

    def rule(self, rule_id: int) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def config(self, counts: Mapping[str, int] | None = None, **kw: int) -> Config:
        """Configuration from a name -> count map; unknown names are errors."""
        v = [0] * self.n
        for s, k in {**(counts or {}), **kw}.items():
            if s not in self.index:
                raise CrnError(f"unknown species {s!r}")
            v[self.index[s]] += k
        return check_config(v, self.n)

    def counts(self, c: Sequence[int]) -> dict[str, int]:
        return {s: k for s, k in zip(self.species, c) if k}

    def with_rules(self, rules: Iterable[Rule]) -> Crn:
        return Crn(self.species, tuple(rules))

    def reversed(self) -> Crn:
        return self.with_rules(r.reversed() for r in self.rules)


class ProblemKind(str, Enum):
    REACH = "reach"
    PRODUCE = "produce"
    UNIVERSAL = "universal"


@dataclass(frozen=True)
class Problem:
    kind: ProblemKind = ProblemKind.REACH
    species: str | None = None
    k: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        if self.kind is ProblemKind.PRODUCE:
            if self.species is None or self.k is None:
                raise CrnError("production needs a species and a count")
            if self.k < 1:
                raise CrnError("production count must be at least 1")

    @classmethod
    def produce(cls, species: str, k: int = 1) -> Problem:
        return cls(ProblemKind.PRODUCE, species, k)


REACH = Problem(ProblemKind.REACH)
UNIVERSAL = Problem(ProblemKind.UNIVERSAL)


@dataclass(frozen=True)
class Instance:
    crn: Crn
    initial: Config
    target: Config | None = None
    problem: Problem = REACH

    def __post_init__(self):
        object.__setattr__(self, "initial", check_config(self.initial, self.crn.n))
        if self.target is not None:
            object.__setattr__(self, "target", check_config(self.target, self.crn.n))
        if self.problem.kind is ProblemKind.PRODUCE:
            if self.problem.species not in self.crn.index:
                raise CrnError(f"unknown species {self.problem.species!r}")
        elif self.target is None:
            raise CrnError(f"{self.problem.kind.value} instances need a target")

    def with_problem(self, problem: Problem) -> Instance:
        return Instance(self.crn, self.initial, self.target, problem)
