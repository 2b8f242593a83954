"""
Witnesses that force an extra edge
==================================

Some unit-distance graphs have a non-adjacent pair that sits at distance 1 in
every drawing.  A dense candidate containing such a graph, with that pair
still non-adjacent, cannot be as dense as possible: the edge is free.
"""

from unitdist.graphcore import emit_graph6
from unitdist.pipeline import default_catalog
from unitdist.tuud import is_reducible, validate_entry

catalog = default_catalog()
for i, entry in enumerate(catalog.entries):
    w = entry.witness
    print(i, emit_graph6(w), "n=%d m=%d pair=%s" % (w.n, w.m, entry.pair), "valid:", validate_entry(entry))

# Hang a new vertex off two vertices of the first witness and look for it again.
entry = catalog.entries[0]
host = entry.witness.add_vertex(0b000011)
hit = is_reducible(host, catalog)
p, q = catalog.entries[hit.entry_index].pair
print("host", emit_graph6(host), "contains entry", hit.entry_index,
      "with pair mapped to", (hit.embedding[p], hit.embedding[q]))
