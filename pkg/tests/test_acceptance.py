"""Acceptance suite: one group of tests per criterion.

Each test carries ``@pytest.mark.criterion(n)``; the conftest prints a
``criterion n: PASS|FAIL`` line for every criterion at the end of the run.
"""

import itertools
import logging
import random
import statistics
import time

import numpy as np
import pytest

from crnreach import Instance, Limits, Verdict, classify, decide_reach_oracle, dispatch, verify_certificate
from crnreach.core import Crn, volume
from crnreach.io import parse_crn, parse_digraph, parse_gadgets
from crnreach.random_instances import (
    random_bimolecular,
    random_ff_1consuming_noautogenesis,
    random_ff_1source_novoid,
    random_ff_noautogenesis,
    random_monotone,
    random_void2,
    reverse_instance,
)
from crnreach.reductions import (
    agent_species,
    gen_3dm,
    gen_gadget_crn,
    gen_hampath,
    has_3d_matching,
    has_hamiltonian_path,
    pad_config,
    split_non_monotone,
)
from crnreach.search import OrderedCertificate, decide_oracle, decide_universal_oracle, explore, replay, search_certificate
from crnreach.solvers import (
    decide_ff_1consuming_noautogenesis,
    decide_ff_1source_novoid,
    decide_void2_flow,
    decide_void2_matching,
)

REACHABLE, UNREACHABLE, UNKNOWN = Verdict.REACHABLE, Verdict.UNREACHABLE, Verdict.UNKNOWN


# 1. figure reproduction

CAPTIONS = {
    # file: (feed-forward, max source, max consuming, void, autogenesis, catalyst or None)
    "excrn_a": (False, 2, 2, False, False, None),
    "excrn_b": (True, 1, 2, True, False, None),
    "excrn_c": (True, 2, 2, None, None, True),
    "excrn_d": (False, 1, 1, None, True, None),
    "excrn_e": (False, 1, 2, False, False, None),
}


@pytest.mark.criterion(1)
def test_figure_classification(data_dir):
    start = time.perf_counter()
    matches = 0
    for name, (ff, src, cons, void, auto, cat) in CAPTIONS.items():
        p = classify(parse_crn((data_dir / f"{name}.crn").read_text()))
        got = (p.feed_forward, p.max_source, p.max_consuming, p.has_void, p.has_autogenesis, p.has_catalyst)
        want = (ff, src, cons, void, auto, cat)
        # None: the caption says nothing about that flag
        if all(w is None or g == w for g, w in zip(got, want)):
            matches += 1
    elapsed = time.perf_counter() - start
    assert matches == 5
    assert elapsed < 1.0


@pytest.mark.criterion(1)
def test_figure_b_order(data_dir):
    # the caption's order: first rule, third rule, second rule
    p = classify(parse_crn((data_dir / "excrn_b.crn").read_text()))
    assert p.feed_forward_order == (0, 2, 1)


# 2. Hamiltonian path construction


@pytest.mark.criterion(2)
def test_hampath_figure_trace(data_dir):
    g = parse_digraph((data_dir / "fig_graph.g").read_text())
    gen = gen_hampath(g.vertices, g.edges, g.s, g.t)
    out = decide_reach_oracle(gen.instance)
    assert out.verdict is REACHABLE
    crn = gen.crn
    expected = [
        {"S*0": 1, "A": 1, "B": 1, "C": 1, "T": 1},
        {"S^v": 1, "A*1": 1, "B": 1, "C": 1, "T": 1},
        {"S^v": 1, "A^v": 1, "B*2": 1, "C": 1, "T": 1},
        {"S^v": 1, "A^v": 1, "B^v": 1, "C*3": 1, "T": 1},
        {"S^v": 1, "A^v": 1, "B^v": 1, "C^v": 1, "T*4": 1},
    ]
    configs = [gen.instance.initial]
    for rid in out.trace:
        configs.append(replay(crn, configs[-1], _single(rid)))
    assert [crn.counts(c) for c in configs] == expected


def _single(rid):
    return OrderedCertificate(((rid, 1),))


def _hampath_agrees(vertices, edges, s, t) -> bool:
    out = decide_reach_oracle(gen_hampath(vertices, edges, s, t).instance)
    assert out.verdict is not UNKNOWN
    return (out.verdict is REACHABLE) == has_hamiltonian_path(vertices, edges, s, t)


def _five_vertex_representatives() -> np.ndarray:
    """Edge masks of digraphs on v0..v4 with s = v0, t = v1, one per orbit
    under permutations of v2, v3, v4."""
    n = 5
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    index = {p: k for k, p in enumerate(pairs)}
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    best = masks.copy()
    chunk = 10
    low = masks & ((1 << chunk) - 1)
    high = masks >> chunk
    vals = np.arange(1 << chunk, dtype=np.int64)
    for perm in itertools.permutations(range(2, n)):
        relabel = (0, 1) + perm
        image = [index[(relabel[a], relabel[b])] for a, b in pairs]
        tables = []
        for part in range(2):
            acc = np.zeros(1 << chunk, dtype=np.int64)
            for bit in range(chunk):
                acc |= ((vals >> bit) & 1) << image[part * chunk + bit]
            tables.append(acc)
        np.minimum(best, tables[0][low] | tables[1][high], out=best)
    return masks[best == masks]


@pytest.mark.criterion(2)
def test_hampath_exhaustive_and_random():
    start = time.perf_counter()
    checked = 0
    # n <= 4: every labelled digraph and every ordered pair s != t
    for n in range(2, 5):
        vs = [f"v{i}" for i in range(n)]
        pairs = [(a, b) for a in vs for b in vs if a != b]
        for mask in range(1 << len(pairs)):
            edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
            for s, t in pairs:
                assert _hampath_agrees(vs, edges, s, t), (vs, edges, s, t)
                checked += 1
    # n = 5: all (s, t) choices are equivalent up to relabelling, so fix
    # s = v0, t = v1 and take one graph per orbit of the remaining vertices
    vs = [f"v{i}" for i in range(5)]
    pairs = [(a, b) for a in vs for b in vs if a != b]
    reps = _five_vertex_representatives()
    assert len(reps) > (1 << 20) // 6
    for mask in reps.tolist():
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        assert _hampath_agrees(vs, edges, "v0", "v1"), edges
        checked += 1
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(6, 8)
        vs = [f"v{i}" for i in range(n)]
        density = rng.uniform(0.15, 0.5)
        edges = [(a, b) for a in vs for b in vs if a != b and rng.random() < density]
        s, t = rng.sample(vs, 2)
        assert _hampath_agrees(vs, edges, s, t), (vs, edges, s, t)
        checked += 1
    assert time.perf_counter() - start < 300


# 3. pruning solver


def _agreement_suite(gen, solver, count, seed):
    rng = random.Random(seed)
    times = []
    for _ in range(count):
        inst = gen(rng)
        t0 = time.perf_counter()
        dec = solver(inst)
        times.append(time.perf_counter() - t0)
        oracle = decide_reach_oracle(inst)
        assert oracle.verdict is not UNKNOWN, inst
        assert dec.verdict is oracle.verdict, (inst, dec, oracle.verdict)
        if dec.verdict is REACHABLE:
            assert verify_certificate(inst, dec.certificate), (inst, dec)
        yield inst, dec
    yield statistics.median(times)


@pytest.mark.criterion(3)
def test_pruning_solver_suite():
    out = list(_agreement_suite(random_ff_1source_novoid, decide_ff_1source_novoid, 1000, seed=3))
    median = out.pop()
    assert len(out) == 1000
    assert {d.verdict for _, d in out} == {REACHABLE, UNREACHABLE}
    for inst, _ in out:
        p = classify(inst.crn)
        assert p.feed_forward and p.max_source <= 1 and not p.has_void
        assert inst.crn.n <= 6 and len(inst.crn.rules) <= 5 and volume(inst.initial) <= 10
    assert median < 1e-3


# 4. reversal solver


@pytest.mark.criterion(4)
def test_reversal_solver_suite():
    out = list(_agreement_suite(random_ff_1consuming_noautogenesis, decide_ff_1consuming_noautogenesis,
                                1000, seed=4))
    out.pop()
    assert len(out) == 1000
    for inst, dec in out:
        p = classify(inst.crn)
        assert p.feed_forward and p.max_consuming <= 1 and not p.has_autogenesis
        forward = decide_ff_1source_novoid(reverse_instance(inst))
        assert forward.verdict is dec.verdict, inst


# 5. void-(3,0) reduction


def _hypergraph_representatives() -> list[int]:
    """One edge subset of the complete 3x3x3 hypergraph per orbit under
    vertex relabelling within parts and permutation of the parts."""
    n = 3
    cells = list(itertools.product(range(n), repeat=3))
    index = {e: i for i, e in enumerate(cells)}
    images = set()
    for roles in itertools.permutations(range(3)):
        for px, py, pz in itertools.product(itertools.permutations(range(n)), repeat=3):
            perm = (px, py, pz)
            moved = []
            for e in cells:
                img = [perm[k][e[k]] for k in range(3)]
                moved.append(index[tuple(img[roles[k]] for k in range(3))])
            images.add(tuple(moved))
    chunk = 9
    vals = np.arange(1 << chunk, dtype=np.int64)
    tables = np.zeros((len(images), 3, 1 << chunk), dtype=np.int64)
    for g, moved in enumerate(sorted(images)):
        for part in range(3):
            for bit in range(chunk):
                tables[g, part] |= ((vals >> bit) & 1) << moved[part * chunk + bit]

    def canon(arr):
        parts = [(arr >> (p * chunk)) & ((1 << chunk) - 1) for p in range(3)]
        best = np.full(arr.shape, np.iinfo(np.int64).max)
        for g in range(len(tables)):
            np.minimum(best, tables[g, 0][parts[0]] | tables[g, 1][parts[1]] | tables[g, 2][parts[2]], out=best)
        return best

    # every orbit with k+1 edges contains a one-edge extension of a k-edge representative
    level = np.array([0], dtype=np.int64)
    reps = [0]
    bits = np.int64(1) << np.arange(len(cells), dtype=np.int64)
    for _ in range(len(cells)):
        cand = (level[:, None] | bits[None, :]).ravel()
        cand = cand[np.bitwise_count(cand) == np.bitwise_count(level[0]) + 1]
        level = np.unique(canon(np.unique(cand)))
        reps.extend(level.tolist())
    return reps


def _3dm_agrees(xs, ys, zs, edges) -> bool:
    out = decide_reach_oracle(gen_3dm(xs, ys, zs, edges).instance)
    assert out.verdict is not UNKNOWN
    return (out.verdict is REACHABLE) == has_3d_matching(xs, ys, zs, edges)


@pytest.mark.criterion(5)
def test_3dm_exhaustive_and_random():
    for n in (1, 2):
        xs, ys, zs = ([f"{p}{i}" for i in range(n)] for p in "xyz")
        cells = list(itertools.product(xs, ys, zs))
        for mask in range(1 << len(cells)):
            edges = [e for k, e in enumerate(cells) if mask >> k & 1]
            assert _3dm_agrees(xs, ys, zs, edges), edges
    xs, ys, zs = ([f"{p}{i}" for i in range(3)] for p in "xyz")
    cells = list(itertools.product(xs, ys, zs))
    reps = _hypergraph_representatives()
    assert len(reps) == len(set(reps)) == 111618
    for mask in reps:
        edges = [e for k, e in enumerate(cells) if mask >> k & 1]
        assert _3dm_agrees(xs, ys, zs, edges), edges
    rng = random.Random(5)
    xs, ys, zs = ([f"{p}{i}" for i in range(4)] for p in "xyz")
    cells = list(itertools.product(xs, ys, zs))
    found = set()
    for _ in range(100):
        edges = rng.sample(cells, rng.randint(4, 14))
        assert _3dm_agrees(xs, ys, zs, edges), edges
        found.add(has_3d_matching(xs, ys, zs, edges))
    assert found == {True, False}


# 6. (2,0) solvers


@pytest.mark.criterion(6)
def test_void2_suite():
    rng = random.Random(6)
    bipartite = 0
    for _ in range(500):
        inst = random_void2(rng)
        assert max(volume(inst.initial), volume(inst.target)) <= 12
        matching = decide_void2_matching(inst)
        oracle = decide_reach_oracle(inst)
        assert matching.verdict is oracle.verdict, inst
        if matching.verdict is REACHABLE:
            assert verify_certificate(inst, matching.certificate)
        part = classify(inst.crn).bipartition
        if part is not None:
            bipartite += 1
            assert decide_void2_flow(inst, part).verdict is matching.verdict, inst
    assert bipartite >= 100


@pytest.mark.criterion(6)
def test_void2_flow_huge_counts():
    big = 1 << 40
    crn = Crn.build([({"a": 1, "c": 1}, {}), ({"a": 1, "d": 1}, {}), ({"b": 1, "c": 1}, {}),
                     ({"b": 1, "d": 1}, {})])
    yes = Instance(crn, crn.config(a=big, b=big + 5, c=big + 3, d=big + 2), crn.config())
    no = Instance(crn, crn.config(a=big, b=big + 5, c=big + 3, d=big + 3), crn.config())
    for inst, want in ((yes, REACHABLE), (no, UNREACHABLE)):
        t0 = time.perf_counter()
        dec = decide_void2_flow(inst)
        assert time.perf_counter() - t0 < 0.1
        assert dec.verdict is want
    assert dispatch(yes).method == "void2-flow"


# 7. ordered certificates


@pytest.mark.criterion(7)
def test_certificate_completeness():
    rng = random.Random(7)
    reachable = 0
    for _ in range(3000):
        inst = random_ff_noautogenesis(rng)
        p = classify(inst.crn)
        assert p.feed_forward and not p.has_autogenesis
        assert inst.crn.n <= 5 and volume(inst.initial) <= 8
        if decide_reach_oracle(inst).verdict is not REACHABLE:
            continue
        reachable += 1
        cert = search_certificate(inst)
        assert cert is not None, inst
        assert verify_certificate(inst, cert), (inst, cert)
    assert reachable >= 500


# 8. gadget compiler

GADGETS = {
    "toggle_single": REACHABLE,
    "toggle_locked": UNREACHABLE,
    "toggle_then_lock": REACHABLE,
    "lock_closed": UNREACHABLE,
    "rotate_loop": REACHABLE,
    "rotate_dead_end": UNREACHABLE,
}


def _agent_violations(gen) -> int:
    agents = agent_species(gen)
    rs = explore(gen.crn, gen.instance.initial)
    assert rs.bound_hit is None
    return sum(1 for c in rs.parent if sum(c[i] for i in agents) != 1)


@pytest.mark.criterion(8)
@pytest.mark.parametrize("name", sorted(GADGETS))
def test_gadget_system(name, data_dir):
    system = parse_gadgets((data_dir / f"{name}.gad").read_text())
    prod = gen_gadget_crn(system, "production")
    assert decide_oracle(prod.instance).verdict is GADGETS[name]
    reach = gen_gadget_crn(system, "reachability")
    if decide_reach_oracle(reach.instance).verdict is REACHABLE:
        assert decide_universal_oracle(reach.instance).verdict is REACHABLE
    for gen in (prod, reach, gen_gadget_crn(system, "production", split=True),
                gen_gadget_crn(system, "reachability", split=True)):
        assert _agent_violations(gen) == 0


@pytest.mark.criterion(8)
def test_gadget_suite_shape():
    assert len(GADGETS) >= 5
    assert UNREACHABLE in GADGETS.values()
    assert GADGETS["toggle_then_lock"] is REACHABLE


# 9. non-monotone split


@pytest.mark.criterion(9)
def test_split_preserves_reachability():
    rng = random.Random(9)
    for _ in range(100):
        inst = random_bimolecular(rng)
        assert all(r.size == (2, 2) for r in inst.crn.rules)
        split = split_non_monotone(inst.crn)
        before = decide_reach_oracle(inst)
        after = decide_reach_oracle(Instance(split, pad_config(inst.initial, split), pad_config(inst.target, split)))
        assert UNKNOWN not in (before.verdict, after.verdict)
        assert before.verdict is after.verdict, inst


# 10. monotone trace bound


@pytest.mark.criterion(10)
@pytest.mark.parametrize("increasing", [True, False])
def test_monotone_trace_bound(increasing):
    rng = random.Random(10)
    traces = 0
    for _ in range(500):
        inst = random_monotone(rng, increasing)
        vi, vd = volume(inst.initial), volume(inst.target)
        out = decide_reach_oracle(inst, Limits(volume_cap=max(vi, vd)))
        if out.trace is not None:
            traces += 1
            assert len(out.trace) <= abs(vi - vd), inst
    assert traces >= 50


# 11. known divergence


@pytest.mark.criterion(11)
def test_known_divergence_logged_once(caplog):
    crn = parse_crn("a -> b\nb -> 0\n")
    inst = Instance(crn, crn.config(a=1), crn.config())
    with caplog.at_level(logging.WARNING, logger="crnreach"):
        dec = dispatch(inst)
    assert dec.verdict is REACHABLE
    assert dec.method == "fallback"
    assert verify_certificate(inst, dec.certificate)
    divergence = [r for r in caplog.records if "divergence" in r.getMessage()]
    assert len(divergence) == 1


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
