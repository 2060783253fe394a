import json
import re
from collections import Counter

import jsonschema
import pytest
import rdflib

from kgpatterns.codetable import LabelStats, build_ct0
from kgpatterns.cover import compute_cover, total_length
from kgpatterns.datasets import book_author_pattern, toy_triples
from kgpatterns.graph import LabeledMultigraph, PatternGraph, enumerate_occurrences
from kgpatterns.ingest import (
    IRI,
    RDF_NIL,
    RDF_TYPE,
    ConversionError,
    ConversionOptions,
    Literal,
    LiteralMode,
    Triple,
    kg_to_graph,
    serialize_ntriples,
)
from kgpatterns.report import (
    SCHEMA_NAMES,
    compute_metrics,
    load_schema,
    pattern_to_sparql,
    write_csv_atomic,
    write_json_atomic,
)

EX = "http://example.org/"
XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"


def norm(q):
    return re.sub(r"\s+", " ", q).strip()


def run_query(triples, query):
    g = rdflib.Graph()
    g.parse(data=serialize_ntriples(triples), format="nt")
    return list(g.query(query))


def test_book_author_export():
    _, m = kg_to_graph(toy_triples())
    q = pattern_to_sparql(book_author_pattern(), [1, 2], m)
    assert norm(q) == norm("SELECT ?x1 ?x2 WHERE { ?x1 a <Book> ; <author> ?x2 . }")


def test_single_class_vertex():
    _, m = kg_to_graph(toy_triples())
    q = pattern_to_sparql(PatternGraph([1], [(1, "a <Book>")]), [], m)
    assert norm(q) == "SELECT ?x1 WHERE { ?x1 a <Book> . }"


def _cities():
    a = IRI(RDF_TYPE)
    ts = set()
    for i, elev in enumerate([0, 0, 0, 50, 200]):
        city = IRI(f"{EX}city{i}")
        ts.add(Triple(city, a, IRI(EX + "City")))
        ts.add(Triple(city, IRI(EX + "elevation"), Literal(str(elev), XSD_INT)))
    ts.add(Triple(IRI(EX + "x"), IRI(EX + "elevation"), Literal("0", XSD_INT)))
    return ts


def test_non_port_literal_becomes_constant_and_matches_engine():
    ts = _cities()
    g, m = kg_to_graph(ts)
    zero = f'"0"^^<{XSD_INT}>'
    p = PatternGraph([1, 2], [(1, f"a <{EX}City>"), (2, zero)], [(1, 2, f"<{EX}elevation>")])
    q = pattern_to_sparql(p, [1], m)
    assert zero in q and "?x2" not in q
    solutions = Counter(str(row[0]) for row in run_query(ts, q))
    expected = Counter(m.vertices[emb[0]].value for emb in enumerate_occurrences(p, g))
    assert solutions == expected and sum(expected.values()) == 3


def test_port_literal_gets_filter():
    ts = _cities()
    g, m = kg_to_graph(ts)
    zero = f'"0"^^<{XSD_INT}>'
    p = PatternGraph([1, 2], [(2, zero)], [(1, 2, f"<{EX}elevation>")])
    q = pattern_to_sparql(p, [1, 2], m)
    assert "FILTER(sameTerm(?x2" in q
    assert len(run_query(ts, q)) == 4


def test_datatype_only_label_gets_datatype_filter():
    ts = _cities()
    g, m = kg_to_graph(ts, ConversionOptions(literal_mode=LiteralMode.DATATYPE_ONLY))
    p = PatternGraph([1, 2], [(2, f"^^<{XSD_INT}>")], [(1, 2, f"<{EX}elevation>")])
    q = pattern_to_sparql(p, [1], m)
    assert f"FILTER(datatype(?x2) = <{XSD_INT}>)" in q
    assert len(run_query(ts, q)) == 6


def test_nil_vertex_becomes_constant():
    ts = {Triple(IRI(EX + "a"), IRI(EX + "next"), IRI(RDF_NIL)), Triple(IRI(EX + "b"), IRI(EX + "next"), IRI(EX + "a"))}
    g, m = kg_to_graph(ts)
    p = PatternGraph([1, 2], [(2, "rdf:nil")], [(1, 2, f"<{EX}next>")])
    q = pattern_to_sparql(p, [1], m)
    assert f"<{RDF_NIL}>" in q
    assert len(run_query(ts, q)) == 1


def test_distinctness_filter():
    _, m = kg_to_graph(toy_triples())
    p = PatternGraph([1, 2, 3], [(1, "a <Book>"), (2, "a <Book>")], [(1, 3, "<author>"), (2, 3, "<author>")])
    strict = pattern_to_sparql(p, [3], m)
    assert "FILTER(!sameTerm(?x1, ?x2))" in strict
    assert "!sameTerm(?x1, ?x3)" not in strict
    loose = pattern_to_sparql(p, [3], m, strict_filter=False)
    assert "FILTER" not in loose


def test_distinctness_filter_changes_engine_results():
    a = IRI(RDF_TYPE)
    ts = {Triple(IRI(EX + "b1"), a, IRI(EX + "Book")), Triple(IRI(EX + "b1"), IRI(EX + "author"), IRI(EX + "w"))}
    _, m = kg_to_graph(ts)
    book, author = f"a <{EX}Book>", f"<{EX}author>"
    p = PatternGraph([1, 2, 3], [(1, book), (2, book)], [(1, 3, author), (2, 3, author)])
    assert len(run_query(ts, pattern_to_sparql(p, [3], m, strict_filter=False))) == 1
    assert len(run_query(ts, pattern_to_sparql(p, [3], m))) == 0


def test_missing_provenance_is_an_error():
    _, m = kg_to_graph(toy_triples())
    with pytest.raises(ConversionError):
        pattern_to_sparql(PatternGraph([1], [(1, "a <Unknown>")]), [], m)


def test_metrics_of_ct0_baseline():
    g, _ = kg_to_graph(toy_triples())
    ct = build_ct0(g)
    bits, rg = total_length(g, ct)
    met = compute_metrics(rg, ct, g, bits, bits)
    assert met.n_patterns == 0
    assert met.pct_labels_ge2 == 0 and met.pct_labels_ge10 == 0
    assert met.compression_ratio == 1.0


def test_metrics_counting():
    # 10 disjoint copies of a 3-label shape among 100 labels
    g = LabeledMultigraph()
    for c in range(10):
        g.add_vertex_label(2 * c, "A")
        g.add_vertex_label(2 * c + 1, "B")
        g.add_edge(2 * c, 2 * c + 1, "r")
    for k in range(70):
        g.add_vertex_label(100 + k, f"Z{k}")
    p = PatternGraph([1, 2], [(1, "A"), (2, "B")], [(1, 2, "r")])
    ct = build_ct0(g).with_pattern(p)
    rg, _ = compute_cover(g, ct)
    met = compute_metrics(rg, ct, g, 100.0, 80.0)
    assert met.n_patterns == 1
    assert met.pct_labels_ge2 == pytest.approx(0.30)
    assert met.pct_labels_ge10 == 0.0
    assert met.compression_ratio == pytest.approx(0.8)


def test_atomic_writers(tmp_path):
    path = tmp_path / "sub" / "x.json"
    write_json_atomic(path, {"a": 1})
    write_json_atomic(path, {"a": 2})
    assert json.loads(path.read_text()) == {"a": 2}
    write_csv_atomic(tmp_path / "t.csv", ("a", "b"), [(1, 2), (3, 4)])
    assert (tmp_path / "t.csv").read_text() == "a,b\n1,2\n3,4\n"
    assert sorted(p.name for p in tmp_path.rglob("*")) == ["sub", "t.csv", "x.json"]


def test_writer_leaves_old_file_on_failure(tmp_path):
    path = tmp_path / "x.json"
    write_json_atomic(path, {"ok": True})
    with pytest.raises(TypeError):
        write_json_atomic(path, {"bad": object()})
    assert json.loads(path.read_text()) == {"ok": True}
    assert [p.name for p in tmp_path.iterdir()] == ["x.json"]


@pytest.mark.parametrize("name", SCHEMA_NAMES)
def test_schemas_are_valid(name):
    schema = load_schema(name)
    jsonschema.Draft202012Validator.check_schema(schema)


def test_emitted_json_validates():
    g, m = kg_to_graph(toy_triples())
    stats = LabelStats.from_graph(g)
    ct = build_ct0(g)
    bits, rg = total_length(g, ct)
    jsonschema.validate(ct.to_json(stats), load_schema("ct"))
    jsonschema.validate(rg.to_json(ct), load_schema("rewritten"))
    jsonschema.validate(m.to_json(), load_schema("conversion"))
    jsonschema.validate(compute_metrics(rg, ct, g, bits, bits).to_json(), load_schema("metrics"))
