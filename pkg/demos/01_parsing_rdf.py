"""Loading RDF: N-Triples, the Turtle subset, and graph merging.

Run:  python3 demos/01_parsing_rdf.py
"""

from sparqlcomplete import graph_merge, parse_ntriples, parse_turtle, render_ntriples

# The same small vocabulary in both supported serializations.

TURTLE = """
@prefix dc:  <http://purl.org/dc/elements/1.1/> .
@prefix ex:  <http://shop.example/> .

ex:book1 dc:title "Der Prozess"@de , "The Trial"@en ;
         ex:pages 255 .
"""

NTRIPLES = """
<http://shop.example/book2> <http://purl.org/dc/elements/1.1/title> "Amerika"@de .
<http://shop.example/book2> <http://shop.example/pages> "299"^^<http://www.w3.org/2001/XMLSchema#integer> .
this line is broken and will be reported, not fatal
"""

g1 = parse_turtle(TURTLE)
print(f"turtle fixture: {len(g1)} triples")
for t in g1.sorted_triples():
    print("  ", t.subject, t.predicate.local_name, t.object)

diagnostics = []
g2 = parse_ntriples(NTRIPLES, diagnostics=diagnostics)
print(f"\nn-triples fixture: {len(g2)} triples, {len(diagnostics)} diagnostic(s)")
for d in diagnostics:
    print(f"   line {d.line}: {d.message}")

merged = graph_merge([g1, g2])
print(f"\nmerged graph has {len(merged)} triples; rendered back out as N-Triples:\n")
print(render_ntriples(merged))
