"""Level-by-level construction of forbidden-subgraph-free graphs.

A level ``(n, m)`` is the set of F-free graphs with ``n`` vertices and ``m``
edges, stored as sorted canonical graph6 codes.  Level ``(n, m)`` is grown
from the levels ``(n - 1, m')`` with ``m' >= ceil(m (n - 2) / n)`` by adding
one vertex of degree ``m - m'`` whose neighbourhood avoids every "bad"
vertex set of the host.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .graphcore import (
    Graph,
    _degree_masks,
    are_isomorphic,
    bits,
    canonical_form,
    canonical_labeling,
    contains_subgraph,
    emit_graph6,
    parse_graph6,
    search_order,
)

log = logging.getLogger(__name__)


class DependencyError(LookupError):
    """A lower level required by build_level is missing."""

    def __init__(self, n: int, m: int):
        super().__init__(f"missing lower level (n={n}, m={m})")
        self.n = n
        self.m = m


class BudgetExceeded(RuntimeError):
    """Raised when a run exceeds its graph budget; carries the sealed levels."""

    def __init__(self, message: str, completed: dict):
        super().__init__(message)
        self.completed = completed


def schade_bound(n: int, m: int) -> int:
    """Least edge count guaranteed in some (n-1)-vertex induced subgraph: ceil(m (n-2) / n)."""
    if n < 1:
        raise ValueError("schade_bound needs n >= 1")
    if m < 0:
        raise ValueError("edge count must be nonnegative")
    return max(0, -((-m * (n - 2)) // n))


# --------------------------------------------------------------------------
# forbidden family
# --------------------------------------------------------------------------


@dataclass
class ForbiddenFamily:
    members: list[Graph]
    source: str | None = None

    def __post_init__(self):
        for g in self.members:
            if any(d == 0 for d in g.degrees()):
                raise ValueError(f"family member {emit_graph6(g)} has an isolated vertex")

    def validate(self) -> None:
        """Check pairwise non-isomorphism and minimality (no member inside another)."""
        ms = self.members
        for i, a in enumerate(ms):
            for j, b in enumerate(ms):
                if i == j:
                    continue
                if i < j and are_isomorphic(a, b):
                    raise ValueError(f"members {i} and {j} are isomorphic")
                if (a.n, a.m) < (b.n, b.m) and contains_subgraph(b, [a]):
                    raise ValueError(f"member {j} contains member {i}")

    @property
    def max_vertices(self) -> int:
        return max((g.n for g in self.members), default=0)

    def restricted(self, max_vertices: int) -> ForbiddenFamily:
        return ForbiddenFamily([g for g in self.members if g.n <= max_vertices], self.source)

    def __len__(self) -> int:
        return len(self.members)


def load_family(path: str | os.PathLike) -> ForbiddenFamily:
    members = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                members.append(parse_graph6(line.split()[0]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return ForbiddenFamily(members, str(path))


def save_family(family: ForbiddenFamily, path: str | os.PathLike, header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [canonical_form(g) for g in family.members]
    _atomic_write(Path(path), "\n".join(lines) + "\n")


@dataclass(frozen=True)
class RootedForbidden:
    reduced: Graph
    root_neighborhood: tuple[int, ...]

    @property
    def root_mask(self) -> int:
        m = 0
        for v in self.root_neighborhood:
            m |= 1 << v
        return m


def derive_rooted_family(family: ForbiddenFamily | Sequence[Graph]) -> list[RootedForbidden]:
    """One ``(F - v, N(v))`` pair per member and vertex; empty neighbourhoods dropped."""
    members = family.members if isinstance(family, ForbiddenFamily) else list(family)
    if not members:
        raise ValueError("family is empty")
    out = []
    for f in members:
        for v in range(f.n):
            nb = f.neighbors(v)
            if not nb:
                continue
            keep = [u for u in range(f.n) if u != v]
            pos = {u: i for i, u in enumerate(keep)}
            out.append(RootedForbidden(f.induced(keep), tuple(pos[u] for u in nb)))
    return out


def unique_rooted(rooted: Iterable[RootedForbidden]) -> list[RootedForbidden]:
    """Drop rooted patterns isomorphic (as graph plus marked set) to an earlier one."""
    seen = set()
    out = []
    for r in rooted:
        colors = [1 if (r.root_mask >> v) & 1 else 0 for v in range(r.reduced.n)]
        lab = canonical_labeling(r.reduced, colors)
        perm = [0] * r.reduced.n
        for i, v in enumerate(lab):
            perm[v] = i
        key = (emit_graph6(r.reduced.permute(perm)), tuple(sorted(perm[v] for v in r.root_neighborhood)))
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


# --------------------------------------------------------------------------
# bad neighbourhoods and extension
# --------------------------------------------------------------------------


@dataclass
class BadNeighborhoods:
    host: Graph
    minimal_sets: list[int]  # vertex bitmasks, antichain

    def blocks(self, neighborhood: int) -> bool:
        return any(t & ~neighborhood == 0 for t in self.minimal_sets)

    def as_sets(self) -> list[frozenset[int]]:
        return [frozenset(bits(t)) for t in self.minimal_sets]


def _minimal(sets: Iterable[int]) -> list[int]:
    out: list[int] = []
    for t in sorted(set(sets), key=lambda s: (s.bit_count(), s)):
        if not any(b & ~t == 0 for b in out):
            out.append(t)
    return out


def _images_of_root(host: Graph, r: RootedForbidden, max_size: int, required: int, found: list[int]) -> list[int]:
    """Sets ``image(S) | required`` over copies of ``F'`` in host, pruned by size and known sets."""
    pattern = r.reduced
    if pattern.n > host.n or pattern.m > host.m:
        return []
    roots = r.root_neighborhood
    order = search_order(pattern, roots)
    k_root = len(roots)
    dmask = _degree_masks(host, pattern)
    hrows = host.rows
    pos = {v: i for i, v in enumerate(order)}
    back = [[pos[u] for u in bits(pattern.rows[v]) if pos[u] < i] for i, v in enumerate(order)]
    allowed = [dmask[v] for v in order]
    k = len(order)
    image = [0] * k
    results: list[int] = []

    def blocked(t: int) -> bool:
        return t.bit_count() > max_size or any(b & ~t == 0 for b in found) or any(b & ~t == 0 for b in results)

    def rest(i: int, used: int) -> bool:
        if i == k:
            return True
        cand = allowed[i] & ~used
        for j in back[i]:
            cand &= hrows[image[j]]
        while cand:
            low = cand & -cand
            cand ^= low
            image[i] = low.bit_length() - 1
            if rest(i + 1, used | low):
                return True
        return False

    def place_roots(i: int, used: int, t: int) -> None:
        if i == k_root:
            if not blocked(t) and rest(i, used):
                results.append(t)
            return
        cand = allowed[i] & ~used
        for j in back[i]:
            cand &= hrows[image[j]]
        while cand:
            low = cand & -cand
            cand ^= low
            t2 = t | low
            if blocked(t2):
                continue
            image[i] = low.bit_length() - 1
            place_roots(i + 1, used | low, t2)

    place_roots(0, 0, required)
    return results


def bad_neighborhoods(
    host: Graph,
    rooted: Sequence[RootedForbidden],
    max_size: int,
    required: int = 0,
) -> BadNeighborhoods:
    """Minimal vertex sets T such that joining a new vertex to a superset of T creates a forbidden copy.

    With ``required`` (a bitmask) every considered neighbourhood is known to
    contain those vertices, so the sets recorded are ``image(S) | required``.
    """
    max_size = min(max_size, host.n)
    found: list[int] = []
    for r in sorted(rooted, key=lambda r: len(r.root_neighborhood)):
        if len(r.root_neighborhood) > max_size:
            continue
        found.extend(_images_of_root(host, r, max_size, required, found))
    return BadNeighborhoods(host, _minimal(found))


def extend(host: Graph, degree: int, bad: BadNeighborhoods, required: int = 0) -> Iterator[Graph]:
    """Host plus one new vertex of the given degree, over all admissible neighbourhoods.

    Neighbourhoods are produced in lexicographic order of their sorted vertex tuples.
    """
    if degree < 0 or degree > host.n:
        return
    need = bits(required)
    if len(need) > degree:
        return
    free = [v for v in range(host.n) if not (required >> v) & 1]
    bad_sets = bad.minimal_sets
    for extra in combinations(free, degree - len(need)):
        nb = required
        for v in extra:
            nb |= 1 << v
        if any(t & ~nb == 0 for t in bad_sets):
            continue
        yield host.add_vertex(nb)


# --------------------------------------------------------------------------
# levels
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Level:
    n: int
    m: int
    codes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "codes", tuple(sorted(set(self.codes))))

    def graphs(self) -> list[Graph]:
        return [parse_graph6(c) for c in self.codes]

    def __len__(self) -> int:
        return len(self.codes)


@dataclass
class EnumConfig:
    prune: bool = True
    jobs: int = 1
    batch_size: int = 512
    checkpoint: str | None = None
    max_graphs: int | None = None  # budget on hosts processed per run
    # test hook: called after every sealed batch with (n, m, m_prime, index)
    on_batch: Callable | None = field(default=None, repr=False, compare=False)


def _host_plan(host: Graph, d: int, prune: bool) -> tuple[bool, int]:
    """Apply the minimum-degree rules; returns (keep, required mask)."""
    if not prune or host.n == 0:
        return True, 0
    delta = host.min_degree
    if delta <= d - 2:
        return False, 0
    if delta == d - 1:
        mins = host.min_degree_mask()
        if mins.bit_count() > d:
            return False, 0
        return True, mins
    return True, 0


def _extend_codes(host_codes: Sequence[str], d: int, rooted: Sequence[RootedForbidden], max_s: int, prune: bool):
    out = set()
    for code in host_codes:
        host = parse_graph6(code)
        keep, required = _host_plan(host, d, prune)
        if not keep:
            continue
        # images have at most max_s vertices; the required set can push |T| up to d
        bad = bad_neighborhoods(host, rooted, d if required else min(max_s, d), required)
        for child in extend(host, d, bad, required):
            out.add(canonical_form(child))
    return out


_WORKER_ROOTED: list[RootedForbidden] = []


def _worker_init(rooted):
    global _WORKER_ROOTED
    _WORKER_ROOTED = rooted


def _worker_extend(args):
    host_codes, d, max_s, prune = args
    return _extend_codes(host_codes, d, _WORKER_ROOTED, max_s, prune)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def level_path(directory: str | os.PathLike, n: int, m: int) -> Path:
    return Path(directory) / f"U_{n}_{m}.g6"


def write_level(directory: str | os.PathLike, level: Level, complete: bool = True) -> Path:
    path = level_path(directory, level.n, level.m)
    _atomic_write(path, "".join(c + "\n" for c in level.codes))
    meta = {"n": level.n, "m": level.m, "count": len(level), "complete": complete}
    _atomic_write(path.with_suffix(".json"), json.dumps(meta, indent=1) + "\n")
    return path


def read_level(directory: str | os.PathLike, n: int, m: int) -> Level | None:
    path = level_path(directory, n, m)
    meta_path = path.with_suffix(".json")
    if not path.exists() or not meta_path.exists():
        return None
    meta = json.loads(meta_path.read_text())
    if not meta.get("complete"):
        return None
    codes = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    if len(codes) != meta["count"]:
        return None
    return Level(n, m, tuple(codes))


class _Rooted:
    """Rooted family cache keyed by the vertex bound used."""

    def __init__(self, family: ForbiddenFamily):
        self.family = family
        self._cache: dict[int, list[RootedForbidden]] = {}

    def upto(self, nverts: int) -> list[RootedForbidden]:
        # a member with more than nverts vertices cannot appear in an nverts-vertex graph
        key = min(nverts, self.family.max_vertices)
        if key not in self._cache:
            members = [g for g in self.family.members if g.n <= key]
            self._cache[key] = unique_rooted(derive_rooted_family(members)) if members else []
        return self._cache[key]


def build_level(
    target_n: int,
    target_m: int,
    lower: dict[tuple[int, int], Level],
    family: ForbiddenFamily,
    config: EnumConfig | None = None,
    rooted: list[RootedForbidden] | None = None,
) -> Level:
    """F-free graphs with ``target_n`` vertices and ``target_m`` edges from the (n-1)-vertex levels."""
    config = config or EnumConfig()
    n1 = target_n - 1
    if target_n == 0:
        return Level(0, 0, ("?",)) if target_m == 0 else Level(0, target_m)
    if target_m > comb(target_n, 2):
        return Level(target_n, target_m)
    lo = max(schade_bound(target_n, target_m), target_m - n1)
    needed = []
    for mp in range(target_m, lo - 1, -1):
        if mp > comb(n1, 2):
            continue
        if (n1, mp) not in lower:
            raise DependencyError(n1, mp)
        needed.append(mp)
    if rooted is None:
        rooted = _Rooted(family).upto(target_n)
    max_s = max((len(r.root_neighborhood) for r in rooted), default=0)

    ckpt = Path(config.checkpoint) if config.checkpoint else None
    codes: set[str] = set()
    resume_mp, resume_idx = None, 0
    if ckpt is not None:
        partial = level_path(ckpt, target_n, target_m).with_suffix(".partial.json")
        if partial.exists():
            state = json.loads(partial.read_text())
            resume_mp, resume_idx = state["m_prime"], state["index"]
            codes.update(state["codes"])

    executor = None
    if config.jobs > 1:
        executor = ProcessPoolExecutor(config.jobs, initializer=_worker_init, initargs=(list(rooted),))
    try:
        for mp in needed:
            if resume_mp is not None and mp > resume_mp:
                continue
            d = target_m - mp
            hosts = lower[(n1, mp)].codes
            start = resume_idx if mp == resume_mp else 0
            for idx in range(start, len(hosts), config.batch_size):
                batch = hosts[idx: idx + config.batch_size]
                if executor is not None:
                    chunk = max(1, len(batch) // (4 * config.jobs))
                    parts = [batch[i: i + chunk] for i in range(0, len(batch), chunk)]
                    for res in executor.map(_worker_extend, [(p, d, max_s, config.prune) for p in parts]):
                        codes |= res
                else:
                    codes |= _extend_codes(batch, d, rooted, max_s, config.prune)
                if ckpt is not None:
                    state = {"m_prime": mp, "index": idx + len(batch), "codes": sorted(codes)}
                    _atomic_write(level_path(ckpt, target_n, target_m).with_suffix(".partial.json"),
                                  json.dumps(state))
                if config.on_batch is not None:
                    config.on_batch(target_n, target_m, mp, idx + len(batch))
            resume_mp = None
    finally:
        if executor is not None:
            executor.shutdown()
    level = Level(target_n, target_m, tuple(codes))
    if ckpt is not None:
        write_level(ckpt, level)
        partial = level_path(ckpt, target_n, target_m).with_suffix(".partial.json")
        if partial.exists():
            partial.unlink()
    return level


class LevelStore:
    """Memoised levels with on-demand construction of their dependencies."""

    def __init__(self, family: ForbiddenFamily, config: EnumConfig | None = None):
        self.family = family
        self.config = config or EnumConfig()
        self.levels: dict[tuple[int, int], Level] = {}
        self.max_m: dict[int, int] = {}  # known u-bar values
        self._rooted = _Rooted(family)
        self._hosts_done = 0

    def get(self, n: int, m: int) -> Level:
        key = (n, m)
        if key in self.levels:
            return self.levels[key]
        if m < 0 or m > comb(n, 2) or (n in self.max_m and m > self.max_m[n]):
            level = Level(n, m)
        elif self.config.checkpoint and (cached := read_level(self.config.checkpoint, n, m)) is not None:
            level = cached
        elif n == 0:
            level = Level(0, 0, ("?",))
        else:
            lo = max(schade_bound(n, m), m - (n - 1))
            lower = {}
            for mp in range(m, lo - 1, -1):
                if mp <= comb(n - 1, 2):
                    lower[(n - 1, mp)] = self.get(n - 1, mp)
            if self.config.max_graphs is not None:
                self._hosts_done += sum(len(lv) for lv in lower.values())
                if self._hosts_done > self.config.max_graphs:
                    raise BudgetExceeded(f"graph budget exhausted at level ({n}, {m})", dict(self.levels))
            if all(len(lv) == 0 for lv in lower.values()):
                level = Level(n, m)
                if self.config.checkpoint:
                    write_level(self.config.checkpoint, level)
            else:
                level = build_level(n, m, lower, self.family, self.config, self._rooted.upto(n))
        self.levels[key] = level
        return level

    def all_levels(self, n: int) -> dict[int, Level]:
        """Every level with n vertices, for all edge counts."""
        return {m: self.get(n, m) for m in range(comb(n, 2) + 1)}

    def max_density(self, n: int) -> tuple[int, Level]:
        if n in self.max_m:
            return self.max_m[n], self.get(n, self.max_m[n])
        if n <= 1:
            self.max_m[n] = 0
            return 0, self.get(n, 0)
        prev, _ = self.max_density(n - 1)
        top = comb(n, 2)
        while top > 0 and schade_bound(n, top) > prev:
            top -= 1
        for m in range(top, -1, -1):
            level = self.get(n, m)
            if len(level):
                self.max_m[n] = m
                return m, level
        raise AssertionError("the empty graph is always F-free")


def max_density(n: int, family: ForbiddenFamily, config: EnumConfig | None = None,
                store: LevelStore | None = None) -> tuple[int, Level]:
    """Largest edge count of an F-free n-vertex graph, with all graphs attaining it."""
    store = store or LevelStore(family, config)
    return store.max_density(n)


def naive_level(n: int, m: int, family: Sequence[Graph], previous: Level | None = None) -> Level:
    """Reference enumeration by single-edge augmentation of the (n, m-1) level.

    F-freeness is closed under taking subgraphs, so every F-free graph with
    m edges arises from an F-free graph with m - 1 edges by adding an edge.
    """
    if m == 0:
        return Level(n, 0, (canonical_form(Graph(n)),))
    if previous is None:
        previous = naive_level(n, m - 1, family)
    out = set()
    for g in previous.graphs():
        for u, v in g.non_edges():
            h = g.add_edge(u, v)
            code = canonical_form(h)
            if code in out:
                continue
            if not contains_subgraph(h, family):
                out.add(code)
    return Level(n, m, tuple(out))
