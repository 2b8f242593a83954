"""Compact simple graphs, graph6 I/O, canonical labeling and subgraph search.

Adjacency is stored as one Python int per vertex (bit ``u`` of ``rows[v]`` is
set when ``{u, v}`` is an edge).  Graphs are immutable once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

MAX_VERTICES = 64


class Graph6Error(ValueError):
    """Malformed graph6 input; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class Graph:
    __slots__ = ("n", "rows", "_m")

    def __init__(self, n: int, rows: Sequence[int] | None = None):
        if not 0 <= n <= MAX_VERTICES:
            raise ValueError(f"vertex count {n} outside 0..{MAX_VERTICES}")
        rows = tuple(rows) if rows is not None else (0,) * n
        if len(rows) != n:
            raise ValueError("need one adjacency row per vertex")
        full = (1 << n) - 1
        for v, r in enumerate(rows):
            if r & ~full or (r >> v) & 1:
                raise ValueError(f"bad adjacency row for vertex {v}")
            for u in _bits(r):
                if not (rows[u] >> v) & 1:
                    raise ValueError(f"adjacency not symmetric at {{{u}, {v}}}")
        self.n = n
        self.rows = rows
        self._m = sum(r.bit_count() for r in rows) // 2

    @classmethod
    def _trusted(cls, n: int, rows: tuple[int, ...]) -> Graph:
        g = object.__new__(cls)
        g.n = n
        g.rows = rows
        g._m = sum(r.bit_count() for r in rows) // 2
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {{{u}, {v}}} out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls._trusted(n, tuple(rows))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls.from_edges(n, combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> Graph:
        return cls.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])

    @property
    def m(self) -> int:
        return self._m

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v, r in enumerate(self.rows):
            for u in _bits(r >> (v + 1)):
                out.append((v, v + 1 + u))
        return out

    def non_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in combinations(range(self.n), 2) if not (self.rows[u] >> v) & 1]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    @property
    def min_degree(self) -> int | None:
        """Smallest vertex degree, or None for the graph with no vertices."""
        return min(self.degrees()) if self.n else None

    def min_degree_mask(self) -> int:
        delta = self.min_degree
        mask = 0
        for v, r in enumerate(self.rows):
            if r.bit_count() == delta:
                mask |= 1 << v
        return mask

    def add_edge(self, u: int, v: int) -> Graph:
        if u == v:
            raise ValueError("loops are not allowed")
        rows = list(self.rows)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        return Graph._trusted(self.n, tuple(rows))

    def remove_edge(self, u: int, v: int) -> Graph:
        rows = list(self.rows)
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
        return Graph._trusted(self.n, tuple(rows))

    def add_vertex(self, neighborhood: int) -> Graph:
        """Append vertex ``n`` adjacent to the vertices in bitmask ``neighborhood``."""
        if neighborhood >> self.n:
            raise ValueError("neighborhood refers to missing vertices")
        if self.n >= MAX_VERTICES:
            raise ValueError("graph capacity exceeded")
        bit = 1 << self.n
        rows = [r | bit if (neighborhood >> v) & 1 else r for v, r in enumerate(self.rows)]
        rows.append(neighborhood)
        return Graph._trusted(self.n + 1, tuple(rows))

    def induced(self, vertices: Sequence[int]) -> Graph:
        """Induced subgraph; ``vertices[i]`` becomes vertex ``i``."""
        pos = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            r = 0
            for u in _bits(self.rows[v]):
                if u in pos:
                    r |= 1 << pos[u]
            rows.append(r)
        return Graph._trusted(len(vertices), tuple(rows))

    def remove_vertex(self, v: int) -> Graph:
        return self.induced([u for u in range(self.n) if u != v])

    def permute(self, perm: Sequence[int]) -> Graph:
        """Relabel so that vertex ``v`` becomes ``perm[v]``."""
        rows = [0] * self.n
        for v, r in enumerate(self.rows):
            nr = 0
            for u in _bits(r):
                nr |= 1 << perm[u]
            rows[perm[v]] = nr
        return Graph._trusted(self.n, tuple(rows))

    def components(self) -> list[int]:
        """Connected components as vertex bitmasks, ordered by lowest vertex."""
        seen = 0
        comps = []
        for v in range(self.n):
            if (seen >> v) & 1:
                continue
            comp = frontier = 1 << v
            while frontier:
                nxt = 0
                for u in _bits(frontier):
                    nxt |= self.rows[u]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            comps.append(comp)
        return comps

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, graph6={emit_graph6(self)!r})"

    def __reduce__(self):
        return (Graph, (self.n, self.rows))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> list[int]:
    return list(_bits(mask))


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


# --------------------------------------------------------------------------
# graph6
# --------------------------------------------------------------------------


def parse_graph6(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode("ascii")
    data = text.strip("\r\n")
    if data.startswith(">>graph6<<"):
        data = data[10:]
    if not data:
        raise Graph6Error("empty graph6 string", 0)
    for i, ch in enumerate(data):
        if not 63 <= ord(ch) <= 126:
            raise Graph6Error(f"character {ch!r} outside 63..126", i)
    if data[0] != "~":
        n, start = ord(data[0]) - 63, 1
    else:
        if len(data) < 4:
            raise Graph6Error("truncated vertex count", len(data))
        if data[1] == "~":
            raise Graph6Error("vertex counts above 258047 are not supported", 1)
        n = 0
        for ch in data[1:4]:
            n = (n << 6) | (ord(ch) - 63)
        start = 4
        if n > MAX_VERTICES:
            raise Graph6Error(f"{n} vertices exceeds capacity {MAX_VERTICES}", 1)
    nbits = n * (n - 1) // 2
    nchars = (nbits + 5) // 6
    body = data[start:]
    if len(body) != nchars:
        raise Graph6Error(f"expected {nchars} data bytes for n={n}, got {len(body)}", start + min(len(body), nchars))
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            c = ord(body[k // 6]) - 63
            if (c >> (5 - k % 6)) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    if nchars:
        pad = nchars * 6 - nbits
        if (ord(body[-1]) - 63) & ((1 << pad) - 1):
            raise Graph6Error("nonzero padding bits", start + nchars - 1)
    return Graph._trusted(n, tuple(rows))


def emit_graph6(g: Graph) -> str:
    n = g.n
    if n <= 62:
        out = [chr(n + 63)]
    else:
        out = ["~", chr((n >> 12) + 63), chr(((n >> 6) & 63) + 63), chr((n & 63) + 63)]
    acc = 0
    k = 0
    rows = g.rows
    for j in range(1, n):
        for i in range(j):
            acc = (acc << 1) | ((rows[i] >> j) & 1)
            k += 1
            if k == 6:
                out.append(chr(acc + 63))
                acc = k = 0
    if k:
        out.append(chr((acc << (6 - k)) + 63))
    return "".join(out)


# --------------------------------------------------------------------------
# canonical labeling
# --------------------------------------------------------------------------


def _refine(rows: tuple[int, ...], cells: list[list[int]]) -> list[list[int]]:
    """Coarsest equitable refinement of an ordered partition."""
    while True:
        masks = [mask_of(c) for c in cells]
        out: list[list[int]] = []
        for c in cells:
            if len(c) == 1:
                out.append(c)
                continue
            groups: dict[tuple[int, ...], list[int]] = {}
            for v in c:
                r = rows[v]
                groups.setdefault(tuple((r & mk).bit_count() for mk in masks), []).append(v)
            if len(groups) == 1:
                out.append(c)
            else:
                out.extend(groups[key] for key in sorted(groups))
        if len(out) == len(cells):
            return out
        cells = out


def _interchangeable(rows: tuple[int, ...], cell: list[int]) -> bool:
    # any permutation of the cell is an automorphism fixing everything else
    cmask = mask_of(cell)
    inside = rows[cell[0]] & cmask
    clique = inside == cmask & ~(1 << cell[0])
    if not clique and inside:
        return False
    outside = rows[cell[0]] & ~cmask
    for v in cell[1:]:
        r = rows[v]
        if r & ~cmask != outside:
            return False
        if (r & cmask) != (cmask & ~(1 << v) if clique else 0):
            return False
    return True


def _orbit_reps(perms: list[tuple[int, ...]], n: int) -> list[int]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for v in range(n):
            a, b = find(v), find(p[v])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(v) for v in range(n)]


def canonical_labeling(g: Graph, colors: Sequence[int] | None = None) -> list[int]:
    """Return ``lab`` such that ``lab[i]`` is the vertex placed at position ``i``.

    Vertex colors, when given, are preserved: only color-respecting
    relabelings are considered and colors are ordered by value.
    """
    n = g.n
    rows = g.rows
    if n == 0:
        return []
    if colors is None:
        degs = g.degrees()
        key = degs
    else:
        key = [(c, r.bit_count()) for c, r in zip(colors, rows)]
    initial: dict = {}
    for v in range(n):
        initial.setdefault(key[v], []).append(v)
    cells = [initial[k] for k in sorted(initial)]

    best_code: tuple[int, ...] | None = None
    best_lab: list[int] | None = None
    autos: list[tuple[int, ...]] = []

    def code_of(lab: list[int]) -> tuple[int, ...]:
        pos = [0] * n
        for i, v in enumerate(lab):
            pos[v] = i
        out = []
        for v in lab:
            r = 0
            for u in _bits(rows[v]):
                r |= 1 << pos[u]
            out.append(r)
        return tuple(out)

    def search(cells: list[list[int]], fixed: list[int]) -> None:
        nonlocal best_code, best_lab
        cells = _refine(rows, cells)
        target_idx = -1
        for i, c in enumerate(cells):
            if len(c) > 1 and (target_idx < 0 or len(c) < len(cells[target_idx])):
                target_idx = i
        if target_idx < 0:
            lab = [c[0] for c in cells]
            code = code_of(lab)
            if best_code is None or code > best_code:
                best_code, best_lab = code, lab
            elif code == best_code:
                # lab and best_lab give the same graph: record the automorphism
                aut = [0] * n
                for a, b in zip(best_lab, lab):
                    aut[a] = b
                autos.append(tuple(aut))
            return
        target = cells[target_idx]
        if _interchangeable(rows, target):
            candidates = target[:1]
        else:
            candidates = target
        tried: list[int] = []
        for v in candidates:
            if tried:
                stab = [p for p in autos if all(p[w] == w for w in fixed)]
                if stab:
                    reps = _orbit_reps(stab, n)
                    if any(reps[v] == reps[w] for w in tried):
                        continue
            tried.append(v)
            rest = [w for w in target if w != v]
            search(cells[:target_idx] + [[v], rest] + cells[target_idx + 1:], fixed + [v])

    search(cells, [])
    assert best_lab is not None
    return best_lab


def canonical_graph(g: Graph) -> Graph:
    lab = canonical_labeling(g)
    perm = [0] * g.n
    for i, v in enumerate(lab):
        perm[v] = i
    return g.permute(perm)


def canonical_form(g: Graph) -> str:
    """Canonical graph6 code: equal for two graphs iff they are isomorphic."""
    return emit_graph6(canonical_graph(g))


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and g.m == h.m and sorted(g.degrees()) == sorted(h.degrees()) and (
        canonical_form(g) == canonical_form(h)
    )


# --------------------------------------------------------------------------
# subgraph search
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Anchor:
    """Constraint tying pattern vertices to host vertices.

    With ``as_set`` the pattern vertices must map onto the host vertices as a
    set (any bijection between them); otherwise position ``i`` maps to
    position ``i``.
    """

    pattern_vertices: tuple[int, ...]
    host_vertices: tuple[int, ...]
    as_set: bool = True

    def __post_init__(self):
        if len(self.pattern_vertices) != len(self.host_vertices):
            raise ValueError("anchor sides must have equal length")
        if len(set(self.pattern_vertices)) != len(self.pattern_vertices) or len(set(self.host_vertices)) != len(
            self.host_vertices
        ):
            raise ValueError("anchor entries must be distinct")


def search_order(pattern: Graph, first: Sequence[int] = ()) -> list[int]:
    """Greedy connectivity-first vertex order; ``first`` vertices lead."""
    degs = pattern.degrees()
    order: list[int] = []
    placed = 0

    def pick(pool: list[int]) -> int:
        return max(pool, key=lambda v: ((pattern.rows[v] & placed).bit_count(), degs[v], -v))

    pool = list(first)
    while pool:
        v = pick(pool)
        pool.remove(v)
        order.append(v)
        placed |= 1 << v
    pool = [v for v in range(pattern.n) if not (placed >> v) & 1]
    while pool:
        v = pick(pool)
        pool.remove(v)
        order.append(v)
        placed |= 1 << v
    return order


def _embeddings(
    host: Graph,
    pattern: Graph,
    order: list[int],
    allowed: list[int],
) -> Iterator[list[int]]:
    """Backtracking core: ``allowed[i]`` masks host candidates for ``order[i]``."""
    k = len(order)
    hrows = host.rows
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[u] for u in _bits(pattern.rows[v]) if pos[u] < i] for i, v in enumerate(order)]
    image = [0] * k
    full = (1 << host.n) - 1

    def rec(i: int, used: int) -> Iterator[list[int]]:
        if i == k:
            yield image[:]
            return
        cand = allowed[i] & ~used
        for j in back[i]:
            cand &= hrows[image[j]]
            if not cand:
                return
        while cand:
            low = cand & -cand
            cand ^= low
            image[i] = low.bit_length() - 1
            yield from rec(i + 1, used | low)

    if k == 0:
        yield []
        return
    if any(not (a & full) for a in allowed):
        return
    yield from rec(0, 0)


def _degree_masks(host: Graph, pattern: Graph) -> list[int]:
    hdeg = host.degrees()
    out = []
    for d in pattern.degrees():
        mask = 0
        for v, hd in enumerate(hdeg):
            if hd >= d:
                mask |= 1 << v
        out.append(mask)
    return out


def subgraph_embeddings(host: Graph, pattern: Graph, anchor: Anchor | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every injective edge-preserving map (not necessarily induced).

    Each map is a tuple ``phi`` with ``phi[v]`` the host image of pattern vertex ``v``.
    """
    if pattern.n > host.n or pattern.m > host.m:
        return
    dmask = _degree_masks(host, pattern)
    first: Sequence[int] = anchor.pattern_vertices if anchor else ()
    order = search_order(pattern, first)
    allowed = [dmask[v] for v in order]
    if anchor is not None:
        hmask = mask_of(anchor.host_vertices)
        target = dict(zip(anchor.pattern_vertices, anchor.host_vertices))
        for i, v in enumerate(order):
            if v in target:
                allowed[i] &= hmask if anchor.as_set else 1 << target[v]
            elif anchor.as_set:
                allowed[i] &= ~hmask
    for image in _embeddings(host, pattern, order, allowed):
        phi = [0] * pattern.n
        for v, h in zip(order, image):
            phi[v] = h
        yield tuple(phi)


def _could_contain(host: Graph, pattern: Graph) -> bool:
    if pattern.n > host.n or pattern.m > host.m:
        return False
    hd = sorted(host.degrees(), reverse=True)
    pd = sorted(pattern.degrees(), reverse=True)
    return all(a >= b for a, b in zip(hd, pd))


def contains_subgraph(host: Graph, family: Iterable[Graph]) -> bool:
    for pattern in family:
        if _could_contain(host, pattern) and next(subgraph_embeddings(host, pattern), None) is not None:
            return True
    return False
