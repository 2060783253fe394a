import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgpatterns.datasets import toy_graph, toy_triples
from kgpatterns.ingest import (
    IRI,
    NIL_SYMBOL,
    RDF_LANGSTRING,
    RDF_NIL,
    RDF_TYPE,
    XSD_STRING,
    BNode,
    ConversionMap,
    ConversionOptions,
    LabelKind,
    Literal,
    LiteralMode,
    NTriplesParseError,
    Triple,
    graph_to_kg,
    kg_to_graph,
    parse_ntriples,
    parse_term,
    read_ntriples,
    serialize_ntriples,
)
from oracles import random_triples

XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"


def test_parse_basic_forms():
    text = (
        "# a comment\n"
        "<http://a> <http://p> <http://b> .\n"
        "\n"
        '_:x <http://p> "hi"@en-GB .  # trailing comment\n'
        '<http://a> <http://p> "1"^^<http://www.w3.org/2001/XMLSchema#integer> .\n'
        '<http://a> <http://p> "tab\\tq\\"\\u00e9\\U0001F600" .\n'
    )
    ts = parse_ntriples(text)
    assert ts[0] == Triple(IRI("http://a"), IRI("http://p"), IRI("http://b"))
    assert ts[1].subject == BNode("x")
    assert ts[1].object == Literal("hi", lang="en-GB")
    assert ts[1].object.datatype == RDF_LANGSTRING
    assert ts[2].object == Literal("1", XSD_INT)
    assert ts[3].object == Literal('tab\tq"é\U0001F600', XSD_STRING)


def test_parse_bytes_and_lines():
    line = "<http://a> <http://p> <http://b> .\n"
    assert parse_ntriples(line.encode()) == parse_ntriples([line]) == parse_ntriples(line)


@pytest.mark.parametrize(
    "line,fragment",
    [
        ("<http://a> <http://p> .", "unexpected '.'"),
        ('<http://a> <http://p> "x\\q" .', "unknown escape"),
        ("<http://a> <http://p> <http://b>", "expected '.'"),
        ('"lit" <http://p> <http://b> .', "unexpected"),
        ("<http://a> <http://p> <http://b> . extra", "trailing content"),
        ('<http://a> <http://p> "open .', "unterminated"),
        ("<http://a> _:b <http://c> .", "unexpected"),
    ],
)
def test_parse_errors_carry_line_numbers(line, fragment):
    with pytest.raises(NTriplesParseError) as info:
        parse_ntriples("<http://ok> <http://p> <http://o> .\n" + line + "\n")
    assert info.value.line == 2
    assert fragment in str(info.value)


def test_serialize_parse_round_trip():
    rng = random.Random(3)
    for _ in range(30):
        ts = random_triples(rng, 80)
        assert set(parse_ntriples(serialize_ntriples(ts))) == ts


def test_iri_escaping_round_trips():
    t = Triple(IRI("http://x/a b>c"), IRI("http://p"), Literal("back\\slash\r"))
    assert parse_ntriples(serialize_ntriples([t])) == [t]


def test_parse_term():
    assert parse_term("<http://a>") == IRI("http://a")
    assert parse_term('"1"^^<http://t>') == Literal("1", "http://t")
    with pytest.raises(NTriplesParseError):
        parse_term("<http://a> x")


def test_read_ntriples(tmp_path):
    path = tmp_path / "x.nt"
    path.write_text(serialize_ntriples(toy_triples()), encoding="utf-8")
    assert set(read_ntriples(path)) == toy_triples()


def test_conversion_of_toy_matches_hand_built_graph():
    g, m = kg_to_graph(toy_triples())
    assert _same_shape(g, toy_graph())
    assert len(g.alphabet) == 16
    assert m.kind_of("a <Book>") is LabelKind.CLASS
    assert m.kind_of("<author>") is LabelKind.PLAIN


def _same_shape(a, b):
    from kgpatterns.graph import PatternGraph, enumerate_occurrences

    # toy graph is connected, so an embedding of one into the other of equal size is an isomorphism
    pa = PatternGraph.from_graph(a)
    pb = PatternGraph.from_graph(b)
    return (
        len(pa.edges) == len(pb.edges)
        and len(pa.vertex_labels) == len(pb.vertex_labels)
        and len(list(enumerate_occurrences(pa, pb, max_count=1))) == 1
    )


def test_literals_and_nil_get_fresh_vertices():
    a, p, q = IRI("http://a"), IRI("http://p"), IRI("http://q")
    ts = {
        Triple(a, p, Literal("1", XSD_INT)),
        Triple(a, q, Literal("1", XSD_INT)),
        Triple(a, p, IRI(RDF_NIL)),
        Triple(IRI(RDF_NIL), q, a),
    }
    g, m = kg_to_graph(ts)
    assert len(g) == 1 + 2 + 2
    assert sum(1 for _, label in g.vertex_labels if label == NIL_SYMBOL) == 2
    assert m.kind_of(NIL_SYMBOL) is LabelKind.NIL
    assert graph_to_kg(g, m) == ts


def test_vertex_ids_do_not_depend_on_input_order():
    ts = list(random_triples(random.Random(5), 100))
    g1, m1 = kg_to_graph(ts)
    g2, m2 = kg_to_graph(list(reversed(ts)))
    assert g1 == g2 and m1.vertices == m2.vertices


def test_custom_type_predicates():
    a, kind, c = IRI("http://a"), IRI("http://kind"), IRI("http://C")
    ts = {Triple(a, kind, c), Triple(a, IRI(RDF_TYPE), c)}
    g, m = kg_to_graph(ts, ConversionOptions(type_predicates=frozenset({RDF_TYPE, "http://kind"})))
    assert g.labels_of(0) == {"a <http://C>", "<http://kind> <http://C>"}
    assert not g.edges
    assert graph_to_kg(g, m) == ts
    g2, _ = kg_to_graph(ts)  # default: only rdf:type
    assert len(g2.edges) == 1


def test_type_predicate_with_literal_object_stays_an_edge():
    ts = {Triple(IRI("http://a"), IRI(RDF_TYPE), Literal("x"))}
    g, m = kg_to_graph(ts)
    assert len(g.edges) == 1
    assert graph_to_kg(g, m) == ts


def test_datatype_only_mode_merges_literal_values():
    a, p = IRI("http://a"), IRI("http://p")
    ts = {Triple(a, p, Literal("1", XSD_INT)), Triple(a, p, Literal("2", XSD_INT))}
    g, m = kg_to_graph(ts, ConversionOptions(literal_mode=LiteralMode.DATATYPE_ONLY))
    assert {label for _, label in g.vertex_labels} == {f"^^<{XSD_INT}>"}
    assert m.labels[f"^^<{XSD_INT}>"].value is None


def test_conversion_map_json_round_trip():
    ts = random_triples(random.Random(9), 120)
    g, m = kg_to_graph(ts)
    m2 = ConversionMap.from_json(m.to_json())
    assert m2 == m
    assert graph_to_kg(g, m2) == ts


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_property(seed):
    ts = random_triples(random.Random(seed), 150)
    g, m = kg_to_graph(ts)
    assert graph_to_kg(g, m) == ts
