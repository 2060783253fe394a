"""Small reference graphs and synthetic generators.

``toy_graph`` is a 13-vertex knowledge graph about books, writers, cities and
monuments; ``toy_code_table`` is a hand-made five-pattern model for it.
``planted_motif_triples`` and ``synthetic_kg_triples`` produce seeded triple
sets with known repeated structure.
"""

from __future__ import annotations

import random

from .codetable import CodeTable, CodeTableRow
from .graph import LabeledMultigraph, PatternGraph
from .ingest import IRI, RDF_TYPE, XSD, Literal, Triple

XSD_INTEGER = XSD + "integer"

BOOK = "a <Book>"
COUNTRY = "a <Country>"
PERSON = "a <Person>"
WRITER = "a <Writer>"
CITY = "a <City>"
CAPITAL = "a <Capital>"
MONUMENT = "a <Monument>"
LANGUAGE = "a <Language>"
HEIGHT_123 = f'"123"^^<{XSD_INTEGER}>'

AUTHOR = "<author>"
LIVES_IN = "<livesIn>"
LOCATED_IN = "<locatedIn>"
NEAR_TO = "<nearTo>"
HEIGHT = "<height>"
HAS_CAPITAL = "<capital>"
HAS_LANGUAGE = "<language>"


def toy_graph() -> LabeledMultigraph:
    """The 13-vertex example graph, with vertex ids 1..13."""
    vertex_labels = [
        (1, BOOK), (2, BOOK), (3, BOOK),
        (4, COUNTRY),
        (5, PERSON), (5, WRITER), (6, PERSON), (6, WRITER),
        (7, CITY), (7, CAPITAL), (8, CITY), (8, CAPITAL),
        (9, MONUMENT), (10, MONUMENT),
        (11, HEIGHT_123), (12, HEIGHT_123),
        (13, LANGUAGE),
    ]  # fmt: skip
    edges = [
        (1, 5, AUTHOR), (2, 5, AUTHOR), (3, 5, AUTHOR), (3, 6, AUTHOR),
        (5, 8, LIVES_IN), (6, 8, LIVES_IN),
        (9, 7, LOCATED_IN), (10, 7, LOCATED_IN), (7, 4, LOCATED_IN), (13, 4, LOCATED_IN),
        (9, 10, NEAR_TO), (10, 9, NEAR_TO),
        (9, 11, HEIGHT), (10, 12, HEIGHT),
        (4, 7, HAS_CAPITAL),
        (4, 13, HAS_LANGUAGE),
    ]  # fmt: skip
    return LabeledMultigraph(range(1, 14), vertex_labels, edges)


def toy_triples() -> set[Triple]:
    """The toy graph as RDF; converting it gives a graph isomorphic to ``toy_graph``."""
    names = {1: "book1", 2: "book2", 3: "book3", 4: "country", 5: "writer1", 6: "writer2",
             7: "capital", 8: "city", 9: "monument1", 10: "monument2", 13: "language"}  # fmt: skip
    literals = {11: Literal("123", XSD_INTEGER), 12: Literal("123", XSD_INTEGER)}
    g = toy_graph()
    out = set()
    for v, label in g.vertex_labels:
        if v in names:
            out.add(Triple(IRI(names[v]), IRI(RDF_TYPE), IRI(label[3:-1])))
    for u, v, label in g.edges:
        obj = literals[v] if v in literals else IRI(names[v])
        out.add(Triple(IRI(names[u]), IRI(label[1:-1]), obj))
    return out


def book_author_pattern() -> PatternGraph:
    """A book and its author."""
    return PatternGraph([1, 2], [(1, BOOK)], [(1, 2, AUTHOR)])


def toy_patterns() -> dict[str, PatternGraph]:
    return {
        "P1": PatternGraph(
            [1, 2, 3, 4, 5],
            [(2, MONUMENT), (3, MONUMENT), (4, HEIGHT_123), (5, HEIGHT_123)],
            [
                (2, 1, LOCATED_IN), (3, 1, LOCATED_IN),
                (2, 3, NEAR_TO), (3, 2, NEAR_TO),
                (2, 4, HEIGHT), (3, 5, HEIGHT),
            ],
        ),  # fmt: skip
        "P2": PatternGraph([1, 2], [(1, PERSON), (1, WRITER), (2, CITY), (2, CAPITAL)], [(1, 2, LIVES_IN)]),
        "P3": book_author_pattern(),
        "P4": PatternGraph([1, 2], [(2, LANGUAGE)], [(1, 2, HAS_LANGUAGE), (2, 1, LOCATED_IN)]),
        "P5": PatternGraph(
            [1, 2], [(1, CITY), (1, CAPITAL), (2, COUNTRY)], [(1, 2, LOCATED_IN), (2, 1, HAS_CAPITAL)]
        ),
    }


def toy_code_table() -> CodeTable:
    """Five named compound rows that between them describe every toy label.

    The table has no singleton rows; it only covers the toy graph when
    vertex labels may be described more than once.
    """
    return CodeTable(CodeTableRow(p, name=name) for name, p in toy_patterns().items())


# synthetic data ---------------------------------------------------------------

EX = "http://example.org/"

MOTIF_TYPES = ("Person", "Company")
MOTIF_PREDICATES = ("worksFor", "locatedIn", "knows", "bornIn")


def motif_pattern() -> PatternGraph:
    """The stamped motif in converted-label form: 5 vertices, 6 labels."""
    t = {name: f"a <{EX}{name}>" for name in MOTIF_TYPES}
    p = {name: f"<{EX}{name}>" for name in MOTIF_PREDICATES}
    return PatternGraph(
        [1, 2, 3, 4, 5],
        [(1, t["Person"]), (2, t["Company"])],
        [(1, 2, p["worksFor"]), (2, 3, p["locatedIn"]), (1, 4, p["knows"]), (4, 5, p["bornIn"])],
    )


def planted_motif_triples(copies: int = 50, noise: int = 200, seed: int = 7) -> set[Triple]:
    """``copies`` disjoint stamps of the motif plus ``noise`` random triples."""
    rng = random.Random(seed)
    type_iri = IRI(RDF_TYPE)
    out: set[Triple] = set()
    for c in range(copies):
        v = [IRI(f"{EX}m{c}_{i}") for i in range(1, 6)]
        out.add(Triple(v[0], type_iri, IRI(EX + "Person")))
        out.add(Triple(v[1], type_iri, IRI(EX + "Company")))
        out.add(Triple(v[0], IRI(EX + "worksFor"), v[1]))
        out.add(Triple(v[1], IRI(EX + "locatedIn"), v[2]))
        out.add(Triple(v[0], IRI(EX + "knows"), v[3]))
        out.add(Triple(v[3], IRI(EX + "bornIn"), v[4]))
    pool = [IRI(f"{EX}n{i}") for i in range(120)]
    noise_predicates = [IRI(f"{EX}noise{i}") for i in range(12)]
    noise_types = [IRI(f"{EX}Thing{i}") for i in range(6)]
    target = len(out) + noise
    while len(out) < target:
        s = rng.choice(pool)
        if rng.random() < 0.25:
            out.add(Triple(s, type_iri, rng.choice(noise_types)))
        else:
            o = rng.choice(pool)
            if o != s:
                out.add(Triple(s, rng.choice(noise_predicates), o))
    return out


def synthetic_kg_triples(n_countries: int = 36, seed: int = 11) -> set[Triple]:
    """A geography-flavoured KG of roughly 4000 triples at the default size.

    Countries have provinces, provinces have cities, cities may sit on rivers
    and have airports; typed literals repeat from small value sets so that
    literal-carrying shapes recur.
    """
    rng = random.Random(seed)
    a = IRI(RDF_TYPE)

    def iri(name):
        return IRI(EX + name)

    def lit(value):
        return Literal(str(value), XSD_INTEGER)

    out: set[Triple] = set()
    languages = [iri(f"lang{i}") for i in range(8)]
    for lang in languages:
        out.add(Triple(lang, a, iri("Language")))
    rivers = [iri(f"river{i}") for i in range(30)]
    for r in rivers:
        out.add(Triple(r, a, iri("River")))
        out.add(Triple(r, iri("length"), lit(rng.choice((100, 250, 500, 1000)))))
    for c in range(n_countries):
        country = iri(f"country{c}")
        out.add(Triple(country, a, iri("Country")))
        out.add(Triple(country, iri("language"), rng.choice(languages)))
        out.add(Triple(country, iri("memberOf"), iri("org" + str(rng.randrange(3)))))
        for p in range(rng.randint(3, 5)):
            prov = iri(f"prov{c}_{p}")
            out.add(Triple(prov, a, iri("Province")))
            out.add(Triple(prov, iri("inCountry"), country))
            for k in range(rng.randint(3, 6)):
                city = iri(f"city{c}_{p}_{k}")
                out.add(Triple(city, a, iri("City")))
                out.add(Triple(city, iri("inProvince"), prov))
                out.add(Triple(city, iri("inCountry"), country))
                out.add(Triple(city, iri("elevation"), lit(rng.choice((0, 0, 0, 50, 200)))))
                if rng.random() < 0.5:
                    out.add(Triple(city, iri("onRiver"), rng.choice(rivers)))
                if rng.random() < 0.3:
                    airport = iri(f"airport{c}_{p}_{k}")
                    out.add(Triple(airport, a, iri("Airport")))
                    out.add(Triple(airport, iri("serves"), city))
                    out.add(Triple(airport, iri("inCountry"), country))
                if k == 0 and p == 0:
                    out.add(Triple(city, a, iri("Capital")))
                    out.add(Triple(country, iri("capital"), city))
    return out


__all__ = [
    "toy_graph",
    "toy_triples",
    "toy_patterns",
    "toy_code_table",
    "book_author_pattern",
    "motif_pattern",
    "planted_motif_triples",
    "synthetic_kg_triples",
]
