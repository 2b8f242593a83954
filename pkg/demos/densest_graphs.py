"""
Densest graphs avoiding the forbidden family
============================================

Every n-vertex graph has an (n-1)-vertex induced subgraph that keeps most of
its edges, so the densest candidates grow one vertex at a time from smaller
levels.  The forbidden family shipped with the package holds the 74 minimal
non-unit-distance graphs on at most nine vertices.
"""

import time

from unitdist.enumeration import LevelStore
from unitdist.pipeline import KNOWN_COUNTS, default_family

family = default_family()
print(len(family), "forbidden graphs")

store = LevelStore(family)
known = {row[0]: row for row in KNOWN_COUNTS}
print(" n  max edges  graphs  known")
for n in range(1, 11):
    t = time.perf_counter()
    u, level = store.max_density(n)
    print("%2d %10d %7d  %s  (%.1fs)" % (n, u, len(level), known[n][1] == u, time.perf_counter() - t))

# a level is a sorted tuple of canonical graph6 codes
print(store.max_density(8)[1].codes)
