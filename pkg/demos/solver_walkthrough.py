"""
Deciding unit-distance embeddability
====================================

Vertices are complex numbers; an edge asks for a unit difference.  The
solver keeps a linear system whose kernel holds every candidate placement
and refines it until it either finds points or a contradiction.
"""

import numpy as np

from unitdist.embed import solve, verify_embedding
from unitdist.graphcore import Graph

# K4 has three 4-cycles, and each of them says two opposite corners sum to
# the same point.  Together they pin two vertices onto each other.
k4 = Graph.complete(4)
out = solve(k4)
print("K4:", out.tag, [mv.kind for mv in out.trace])

# K2,3 fails the same way: its three degree-2 vertices are forced together.
k23 = Graph.complete_bipartite(2, 3)
out = solve(k23)
print("K2,3:", out.tag, [mv.kind for mv in out.trace])

# A triangle has no 4-cycles, so the solver splits on the two orientations
# of an equilateral triangle and then picks coordinates at random.
out = solve(Graph.complete(3))
print("K3:", out.tag, "branch", out.branch)
print(np.round(out.coords, 6))

# The Moser spindle: two unit rhombi hinged at a vertex, tips 1 apart.
moser = Graph.from_edges(7, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3),
                             (0, 4), (0, 5), (4, 5), (4, 6), (5, 6), (3, 6)])
out = solve(moser)
z = out.coords
lengths = [abs(z[u] - z[v]) for u, v in moser.edges()]
print("Moser:", out.tag, "worst edge error %.1e" % max(abs(d - 1) for d in lengths))
print("verified:", verify_embedding(moser, z))
