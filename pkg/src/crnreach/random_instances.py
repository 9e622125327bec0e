"""Seeded random instance families for the agreement suites and ``batch``.

Each generator takes a :class:`random.Random` and returns an
:class:`Instance`. Targets are produced by a short random walk from the
initial configuration and, half of the time, perturbed by one unit, so every
family yields a mix of reachable and unreachable instances.
"""

from __future__ import annotations

import random
from typing import Callable

from .core import Crn, Instance, Rule, add, dominates

Generator = Callable[[random.Random], Instance]


def _names(n: int) -> tuple[str, ...]:
    return tuple(chr(ord("a") + i) for i in range(n))


def _vec(n: int, rng: random.Random, size: int) -> list[int]:
    v = [0] * n
    for _ in range(size):
        v[rng.randrange(n)] += 1
    return v


def _walk(crn: Crn, initial: tuple, rng: random.Random, steps: int) -> tuple:
    c = initial
    for _ in range(steps):
        options = [r for r in crn.rules if dominates(c, r.reactants)]
        if not options:
            break
        c = add(c, rng.choice(options).delta)
    return c


def _target(crn: Crn, initial: tuple, rng: random.Random, steps: int = 8) -> tuple:
    c = list(_walk(crn, initial, rng, rng.randint(0, steps)))
    if rng.random() < 0.5 and c:
        i = rng.randrange(len(c))
        if c[i] and rng.random() < 0.5:
            c[i] -= 1
        else:
            c[i] += 1
    return tuple(c)


def _initial(n: int, rng: random.Random, max_volume: int) -> tuple:
    return tuple(_vec(n, rng, rng.randint(1, max_volume)))


def random_ff_1source_novoid(
    rng: random.Random, max_species: int = 6, max_rules: int = 5, max_volume: int = 10,
    max_side: int = 2,
) -> Instance:
    """Feed-forward, 1-source, no void rules and no autogenesis rules.

    Rules are built in feed-forward order: a new rule's products avoid the
    reactants of all earlier rules. Rule ids are then shuffled so the order
    is not simply the id order.
    """
    want = rng.randint(1, max_rules)
    while True:
        # k rules need k distinct produced species plus one never produced
        n = rng.randint(min(want + 1, max_species), max_species)
        produced_by: dict[int, int] = {}
        earlier_reactants: set[int] = set()
        built: list[tuple[list[int], list[int]]] = []
        for _attempt in range(40 * want):
            if len(built) == want:
                break
            r = _vec(n, rng, rng.randint(1, max_side))
            free = [i for i in range(n) if i not in earlier_reactants]
            if not free:
                break
            p = [0] * n
            for _ in range(rng.randint(1, max_side)):
                # products of a later rule may not feed an earlier one
                p[rng.choice(free + [i for i, v in enumerate(r) if v])] += 1
            delta = [b - a for a, b in zip(r, p)]
            if {i for i, v in enumerate(p) if v} & earlier_reactants:
                continue
            if not any(d > 0 for d in delta) or not any(d < 0 for d in delta):
                continue
            if any(d > 0 and i in produced_by for i, d in enumerate(delta)):
                continue
            for i, d in enumerate(delta):
                if d > 0:
                    produced_by[i] = len(built)
            earlier_reactants |= {i for i, v in enumerate(r) if v}
            built.append((r, p))
        if built:
            break
    ids = list(range(len(built)))
    rng.shuffle(ids)
    crn = Crn(_names(n), tuple(Rule(tuple(r), tuple(p), rid) for rid, (r, p) in zip(ids, built)))
    initial = _initial(n, rng, max_volume)
    return Instance(crn, initial, _target(crn, initial, rng))


def reverse_instance(inst: Instance) -> Instance:
    return Instance(inst.crn.reversed(), inst.target, inst.initial)


def random_ff_1consuming_noautogenesis(rng: random.Random, **kw) -> Instance:
    """Reversal of a feed-forward 1-source no-void instance."""
    return reverse_instance(random_ff_1source_novoid(rng, **kw))


def random_ff_noautogenesis(
    rng: random.Random, max_species: int = 5, max_rules: int = 4, max_volume: int = 8,
    max_side: int = 2,
) -> Instance:
    """Feed-forward without autogenesis rules; void rules and any number of
    sources or consumers allowed."""
    n = rng.randint(2, max_species)
    earlier_reactants: set[int] = set()
    built = []
    for _ in range(rng.randint(1, max_rules)):
        for _attempt in range(20):
            r = _vec(n, rng, rng.randint(1, max_side))
            p = _vec(n, rng, rng.randint(0, max_side))
            delta = [b - a for a, b in zip(r, p)]
            own = {i for i, v in enumerate(r) if v}
            if {i for i, v in enumerate(p) if v} & earlier_reactants:
                continue
            if not any(d < 0 for d in delta):
                continue
            earlier_reactants |= own
            built.append((r, p))
            break
    ids = list(range(len(built)))
    rng.shuffle(ids)
    crn = Crn(_names(n), tuple(Rule(tuple(r), tuple(p), rid) for rid, (r, p) in zip(ids, built)))
    initial = _initial(n, rng, max_volume)
    return Instance(crn, initial, _target(crn, initial, rng))


def random_void2(
    rng: random.Random, max_species: int = 5, max_rules: int = 5, max_volume: int = 12,
    bipartite: bool | None = None,
) -> Instance:
    """All rules of size (2,0). ``bipartite=True`` draws every rule across a
    random two-way split of the species."""
    n = rng.randint(2, max_species)
    if bipartite is None:
        bipartite = rng.random() < 0.5
    side = [rng.randrange(2) for _ in range(n)]
    if bipartite and len(set(side)) < 2:
        side[0], side[1] = 0, 1
    pairs = set()
    for _ in range(rng.randint(1, max_rules)):
        for _attempt in range(20):
            a, b = rng.randrange(n), rng.randrange(n)
            if bipartite and side[a] == side[b]:
                continue
            pairs.add((min(a, b), max(a, b)))
            break
    rules = []
    for rid, (a, b) in enumerate(sorted(pairs)):
        r = [0] * n
        r[a] += 1
        r[b] += 1
        rules.append(Rule(tuple(r), (0,) * n, rid))
    crn = Crn(_names(n), tuple(rules))
    initial = _initial(n, rng, max_volume)
    target = list(_target(crn, initial, rng, steps=max_volume))
    if sum(target) > max_volume:
        # the +1 perturbation may overshoot the volume bound
        target[max(range(n), key=lambda i: target[i])] -= 1
    return Instance(crn, initial, tuple(target))


def random_unimolecular(
    rng: random.Random, max_species: int = 6, max_rules: int = 8, max_volume: int = 6
) -> Instance:
    n = rng.randint(2, max_species)
    pairs = set()
    for _ in range(rng.randint(1, max_rules)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            pairs.add((a, b))
    rules = []
    for rid, (a, b) in enumerate(sorted(pairs)):
        r, p = [0] * n, [0] * n
        r[a], p[b] = 1, 1
        rules.append(Rule(tuple(r), tuple(p), rid))
    crn = Crn(_names(n), tuple(rules))
    initial = _initial(n, rng, max_volume)
    return Instance(crn, initial, _target(crn, initial, rng))


def random_bimolecular(
    rng: random.Random, max_species: int = 4, max_rules: int = 4, max_volume: int = 5
) -> Instance:
    """All rules of size (2,2); target has the initial volume."""
    n = rng.randint(2, max_species)
    rules = []
    seen = set()
    for _ in range(rng.randint(1, max_rules)):
        r, p = tuple(_vec(n, rng, 2)), tuple(_vec(n, rng, 2))
        if r != p and (r, p) not in seen:
            seen.add((r, p))
            rules.append(Rule(r, p, len(rules)))
    if not rules:
        rules.append(Rule((2,) + (0,) * (n - 1), (0, 2) + (0,) * (n - 2), 0))
    crn = Crn(_names(n), tuple(rules))
    initial = _initial(n, rng, max_volume)
    if rng.random() < 0.5:
        target = _walk(crn, initial, rng, rng.randint(0, 8))
    else:
        target = tuple(_vec(n, rng, sum(initial)))
    return Instance(crn, initial, target)


def random_monotone(
    rng: random.Random, increasing: bool, max_species: int = 4, max_rules: int = 4,
    max_volume: int = 6,
) -> Instance:
    """Every rule strictly changes volume in the same direction."""
    n = rng.randint(2, max_species)
    rules = []
    count = rng.randint(1, max_rules)
    while len(rules) < count:
        i = rng.randint(1, 2)
        j = rng.randint(0, i - 1)
        r, p = _vec(n, rng, i), _vec(n, rng, j)
        if increasing:
            r, p = p, r
        if any(r) or any(p):
            rules.append(Rule(tuple(r), tuple(p), len(rules)))
    crn = Crn(_names(n), tuple(rules))
    initial = _initial(n, rng, max_volume)
    return Instance(crn, initial, _target(crn, initial, rng, steps=4))


SUITES: dict[str, Generator] = {
    "ff-ss-nv": random_ff_1source_novoid,
    "ff-sc-na": random_ff_1consuming_noautogenesis,
    "ff-na": random_ff_noautogenesis,
    "void2": random_void2,
    "void2-bipartite": lambda rng: random_void2(rng, bipartite=True),
    "unimolecular": random_unimolecular,
    "bimolecular": random_bimolecular,
    "increasing": lambda rng: random_monotone(rng, True),
    "decreasing": lambda rng: random_monotone(rng, False),
}
