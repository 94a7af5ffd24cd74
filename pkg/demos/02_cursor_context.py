"""Watching the grammatical context evolve as a query is typed.

The derivation is total: every prefix of the text, well-formed or not,
yields a context.  Run:  python3 demos/02_cursor_context.py
"""

from sparqlcomplete import connected_individuals, derive_context, pattern_node_text

QUERY = (
    "PREFIX sio: <http://semanticscience.org/resource/> "
    "SELECT ?protein WHERE { "
    "<http://lab.example/data/brca1> sio:SIO_010081 ?protein . "
    "?protein sio:"
)

print("query under construction:")
print(f"  {QUERY!r}\n")

checkpoints = [16, 52, 59, 69, 83, 120, 136, len(QUERY.encode())]
for cursor in checkpoints:
    ctx = derive_context(QUERY, cursor)
    line = f"byte {cursor:3d}: {ctx.position.value:14s} partial={ctx.partial_token!r}"
    if ctx.focus_subject is not None:
        line += f" focus={pattern_node_text(ctx.focus_subject)}"
    print(line)

ctx = derive_context(QUERY)
print("\nat the end of the text:")
print(f"  position        {ctx.position.value}")
print(f"  partial token   {ctx.partial_token!r}")
print(f"  variables       {list(ctx.variables)}")
print(f"  prefixes        { {k: v.value for k, v in ctx.prefixes.items()} }")
print(f"  patterns        {len(ctx.patterns)} completed")

print("\nwho is ?protein connected to?")
for iri, path in connected_individuals(ctx, "protein", max_depth=2):
    hops = " -> ".join(f"{p.local_name}({d.value})" for p, d in path)
    print(f"  {iri.value}  via  {hops}")
