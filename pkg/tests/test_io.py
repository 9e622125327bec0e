import pytest

from crnreach import Problem, ProblemKind
from crnreach.errors import InvalidWiring, ParseError
from crnreach.io import (
    CrnDocument,
    format_certificate,
    format_crn,
    format_digraph,
    format_dimacs,
    format_document,
    format_gadgets,
    format_hypergraph,
    format_instance,
    parse_certificate,
    parse_crn,
    parse_digraph,
    parse_dimacs,
    parse_document,
    parse_gadgets,
    parse_hypergraph,
    parse_instance,
    parse_multiset,
)
from crnreach.search import OrderedCertificate

WATER = """\
species: H O W
2H + O -> W
config init: 4H + 2O
config target: 2W
problem: reach
"""


def test_water_rule():
    crn = parse_crn("2H + O -> W\n")
    assert crn.species == ("H", "O", "W")
    assert crn.rules[0].reactants == (2, 1, 0) and crn.rules[0].products == (0, 0, 1)


def test_void_rule_and_zero_config():
    doc = parse_document("a + b -> 0\nconfig init: 0\n")
    assert doc.crn.rules[0].size == (2, 0)
    assert doc.configs["init"] == (0, 0)


def test_multiset_forms():
    assert parse_multiset("2H + O") == {"H": 2, "O": 1}
    assert parse_multiset(" 3 a+a ") == {"a": 4}
    assert parse_multiset("0") == {}
    assert parse_multiset("123456789012345678901234567890x") == {"x": 123456789012345678901234567890}


def test_canonical_file_roundtrip_is_byte_identical():
    assert format_document(parse_document(WATER)) == WATER
    inst = parse_instance(WATER)
    assert format_instance(inst) == WATER


def test_noncanonical_file_normalises():
    text = "# water\nH+H+O->W   # two hydrogens\nconfig init: 2 H + O\nconfig target: W\n"
    inst = parse_instance(text)
    again = parse_instance(format_instance(inst))
    assert again == inst


def test_labels_kept_when_ids_sparse():
    doc = parse_document("r3: a -> b\nr1: b -> c\n")
    assert [r.id for r in doc.crn.rules] == [1, 3]
    text = format_crn(doc.crn)
    assert "r1: b -> c" in text and "r3: a -> b" in text
    assert parse_crn(text) == doc.crn


def test_unlabelled_rules_skip_used_ids():
    crn = parse_crn("r0: a -> b\nb -> c\n")
    assert [r.id for r in crn.rules] == [0, 1]


def test_problem_lines():
    base = "a -> b\nconfig init: a\n"
    assert parse_document(base + "problem: produce b 3\n").problem == Problem.produce("b", 3)
    assert parse_document(base + "config target: b\nproblem: universal\n").problem.kind is ProblemKind.UNIVERSAL
    inst = parse_instance(base + "problem: produce b 2\n")
    assert inst.target is None and inst.problem.k == 2
    assert "problem: produce b 2" in format_instance(inst)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("a -> b\na + -> c\n", 2, 5),
        ("a -> b -> c\n", 1, None),
        ("a -> b\nconfig init: x\n", 2, 14),
        ("a -> 0b\n", 1, 6),
        ("frobnicate\n", 1, 1),
        ("a -> b\nproblem: fly\n", 2, 1),
        ("species: a 1b\n", 1, 12),
        ("0 -> 0\n", 1, None),
    ],
)
def test_positioned_errors(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_document(text)
    assert info.value.line == line
    if column is not None:
        assert info.value.column == column
    assert f"line {line}" in str(info.value)


def test_document_level_errors():
    with pytest.raises(ParseError):
        parse_instance("a -> b\n")
    with pytest.raises(ParseError):
        parse_instance("a -> b\nconfig init: a\n")
    with pytest.raises(ParseError):
        parse_document("a -> b\nconfig init: a\nconfig init: b\n")
    with pytest.raises(ParseError):
        parse_document("r1: a -> b\nr1: b -> a\n")
    with pytest.raises(ParseError):
        parse_document("a -> b\nproblem: produce zz 1\n")
    with pytest.raises(ParseError):
        parse_document("a -> b\nproblem: reach\nproblem: reach\n")


def test_rules_may_introduce_species_declared_ones_come_first():
    crn = parse_crn("species: z\na -> b\n")
    assert crn.species == ("z", "a", "b")
    assert format_document(CrnDocument(crn)).startswith("species: z a b\n")


def test_digraph_roundtrip(data_dir):
    g = parse_digraph((data_dir / "fig_graph.g").read_text())
    assert g.vertices == ["S", "A", "B", "C", "T"] and g.s == "S" and g.t == "T"
    assert parse_digraph(format_digraph(g)) == g
    with pytest.raises(ParseError):
        parse_digraph("a -> b -> c\n")


def test_hypergraph_roundtrip():
    text = "X: x1 x2\nY: y1 y2\nZ: z1 z2\nx1 y1 z1\nx2 y2 z2\n"
    h = parse_hypergraph(text)
    assert h.edges == [("x1", "y1", "z1"), ("x2", "y2", "z2")]
    assert format_hypergraph(h) == text
    with pytest.raises(ParseError):
        parse_hypergraph("X: a\nY: b\n")
    with pytest.raises(ParseError):
        parse_hypergraph("X: a\nY: b\nZ: c\na b\n")


def test_dimacs():
    n, clauses = parse_dimacs("c example\np cnf 3 2\n1 -2 3 0\n-1 2\n-3 0\n")
    assert n == 3 and clauses == [(1, -2, 3), (-1, 2, -3)]
    assert parse_dimacs(format_dimacs(n, clauses)) == (n, clauses)
    with pytest.raises(ParseError):
        parse_dimacs("1 2 3 0\n")
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 3 2\n1 2 3 0\n")


def test_gadget_roundtrip(data_dir):
    for path in sorted(data_dir.glob("*.gad")):
        system = parse_gadgets(path.read_text())
        assert parse_gadgets(format_gadgets(system)) == system


def test_gadget_errors():
    with pytest.raises(ParseError):
        parse_gadgets("toggle g maybe\nstart s ab\ntarget s\n")
    with pytest.raises(ParseError):
        parse_gadgets("toggle g unlocked\nwire s - g\nstart s ab\ntarget s\n")
    with pytest.raises(ParseError):
        parse_gadgets("toggle g unlocked\n")
    with pytest.raises(InvalidWiring):
        parse_gadgets("toggle g unlocked\nwire s - g.a\nstart s ab\ntarget s\n")


def test_certificate_roundtrip():
    cert = OrderedCertificate(((3, 2), (0, 1 << 50)))
    assert parse_certificate(format_certificate(cert)) == cert
    assert parse_certificate("# nothing\n") == OrderedCertificate()
    with pytest.raises(ParseError):
        parse_certificate("1 0\n")
    with pytest.raises(ParseError):
        parse_certificate("1\n")
