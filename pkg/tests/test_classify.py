import pytest

from crnreach import Crn, Monotonicity, classify, feed_forward_order, leaf_rules, root_rules
from crnreach.classify import bipartite_partition, is_feed_forward_order, source_consuming_degrees
from crnreach.errors import NotVoid2System
from crnreach.io import parse_crn


def load(data_dir, name):
    return parse_crn((data_dir / f"{name}.crn").read_text())


def test_leaf_rules_of_figure_b(data_dir):
    # a + c -> d is the only rule whose products feed no other rule
    assert leaf_rules(load(data_dir, "excrn_b")) == frozenset({1})


def test_root_rules_is_leaf_rules_of_reversal(data_dir):
    crn = load(data_dir, "excrn_c")
    assert root_rules(crn) == leaf_rules(crn.reversed())


def test_not_feed_forward(data_dir):
    for name in ("excrn_a", "excrn_d", "excrn_e"):
        assert feed_forward_order(load(data_dir, name)) is None


def test_order_checker_agrees(data_dir):
    crn = load(data_dir, "excrn_c")
    order = feed_forward_order(crn)
    assert is_feed_forward_order(crn, order)
    assert not is_feed_forward_order(crn, tuple(reversed(order)))
    assert not is_feed_forward_order(crn, order[:-1])


def test_catalyst_counts_as_occurrence():
    # b + c -> c + d feeds itself only; a -> c feeds it, so a -> c must come first
    crn = parse_crn("b + c -> c + d\na -> c\n")
    assert feed_forward_order(crn) == (1, 0)


def test_degrees_use_net_change(data_dir):
    deg = source_consuming_degrees(load(data_dir, "excrn_d"))
    # b is a catalyst in the first two rules and produced only by d -> d + b
    assert deg.source["b"] == 1 and deg.consuming["b"] == 0
    assert deg.max_source == 1 and deg.max_consuming == 1


def test_monotonicity():
    assert classify(parse_crn("a -> 2a\n")).monotonicity is Monotonicity.INCREASING
    assert classify(parse_crn("a + b -> 0\n")).monotonicity is Monotonicity.DECREASING
    assert classify(parse_crn("a + b -> 2c\n")).monotonicity is Monotonicity.PRESERVING
    assert classify(parse_crn("a -> 0\n0 -> b\na -> a + b\nb -> 0\n")).monotonicity is Monotonicity.MIXED
    assert classify(Crn(("a",), ())).monotonicity is Monotonicity.PRESERVING


def test_bipartition():
    part = bipartite_partition(parse_crn("a + c -> 0\nb + c -> 0\nb + d -> 0\n"))
    assert part is not None
    left, right = part
    assert {frozenset(left), frozenset(right)} == {frozenset("ab"), frozenset("cd")}
    assert bipartite_partition(parse_crn("a + b -> 0\nb + c -> 0\na + c -> 0\n")) is None
    assert bipartite_partition(parse_crn("2a -> 0\n")) is None
    with pytest.raises(NotVoid2System):
        bipartite_partition(parse_crn("a -> b\n"))


def test_profile_shape_flags():
    p = classify(parse_crn("a + b -> c + d\nc + d -> a + b\n"))
    assert p.is_population_protocol and not p.is_unimolecular and not p.is_void2
    assert p.rule_size_bound == (2, 2)
    assert classify(parse_crn("a -> b\nb -> a\n")).is_unimolecular
    v = classify(parse_crn("a + b -> 0\n"))
    assert v.is_void2 and v.bipartition is not None


def test_profile_to_dict_is_plain(data_dir):
    import json

    d = classify(load(data_dir, "excrn_b")).to_dict()
    assert json.loads(json.dumps(d)) == d
    assert d["feed_forward_order"] == [0, 2, 1]
    assert d["leaf_rules"] == [1]
