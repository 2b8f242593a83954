"""Totally unfaithful unit-distance graphs.

Such a graph has a non-adjacent pair that lands at distance 1 in every unit
embedding.  A maximum-density candidate that contains one with the pair
non-adjacent cannot be unit-distance: the pair edge could be added.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embed import EmbedConfig, Embedded, _edge_vectors, _locked_pairs, initial_system, iter_leaves, solve, _BudgetExceeded
from .graphcore import Graph, Graph6Error, parse_graph6, subgraph_embeddings


class LoadError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TuudEntry:
    witness: Graph
    pair: tuple[int, int]

    def __post_init__(self):
        p, q = self.pair
        n = self.witness.n
        if not (0 <= p < n and 0 <= q < n) or p == q:
            raise ValueError(f"pair {self.pair} is not two distinct vertices of a {n}-vertex graph")
        if self.witness.has_edge(p, q):
            raise ValueError(f"pair {self.pair} is an edge of the witness")


@dataclass
class TuudCatalog:
    entries: list[TuudEntry] = field(default_factory=list)
    source: str = ""

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Witness:
    entry_index: int
    embedding: tuple[int, ...]  # witness vertex i -> host vertex embedding[i]


def load_catalog(path: str | os.PathLike) -> TuudCatalog:
    """Read ``graph6 p q`` lines; blank lines and ``#`` comments are skipped."""
    entries = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise LoadError(f"expected 'graph6 p q', got {line!r}", lineno)
        try:
            g = parse_graph6(parts[0])
            p, q = int(parts[1]), int(parts[2])
            entries.append(TuudEntry(g, (p, q)))
        except (Graph6Error, ValueError) as exc:
            raise LoadError(str(exc), lineno) from exc
    return TuudCatalog(entries, str(path))


def save_catalog(catalog: TuudCatalog, path: str | os.PathLike, header: str = "") -> None:
    from .graphcore import emit_graph6

    lines = [f"# {h}" for h in header.splitlines()]
    lines += [f"{emit_graph6(e.witness)} {e.pair[0]} {e.pair[1]}" for e in catalog.entries]
    Path(path).write_text("\n".join(lines) + "\n")


def is_reducible(g: Graph, catalog: TuudCatalog) -> Witness | None:
    """First catalog entry found in ``g`` with its pair mapped to a non-edge."""
    for idx, entry in enumerate(catalog.entries):
        w = entry.witness
        if w.n > g.n or w.m > g.m:
            continue
        p, q = entry.pair
        for phi in subgraph_embeddings(g, w):
            if not g.has_edge(phi[p], phi[q]):
                return Witness(idx, tuple(phi))
    return None


class Inconclusive(RuntimeError):
    pass


def pair_forced(leaf, pair: tuple[int, int], config: EmbedConfig) -> bool:
    """Whether a saturated branch pins the pair at distance 1."""
    p, q = pair
    if leaf.graph.has_edge(p, q):
        return True
    edges = leaf.graph.edges()
    diff = _edge_vectors(leaf, [(p, q)])
    edge_vecs = _edge_vectors(leaf, edges)
    return any(abs(abs(omega) - 1) <= config.eps_mod for _, _, omega in _locked_pairs(diff, edge_vecs, config.eps_res))


def validate_entry(entry: TuudEntry, embedder=solve, config: EmbedConfig | None = None,
                   strict: bool = False) -> bool:
    """Witness embeds, every surviving branch forces the pair, and witness plus pair edge embeds.

    An undecided solver run makes the entry invalid; with ``strict`` it raises
    ``Inconclusive`` instead.
    """
    config = config or EmbedConfig()
    w = entry.witness
    first = embedder(w, config)
    if not isinstance(first, Embedded):
        if strict and first.tag == "unknown":
            raise Inconclusive(f"solver undecided on witness: {first.reason}")
        return False
    try:
        leaves = list(iter_leaves(initial_system(w, config), config, []))
    except _BudgetExceeded:
        if strict:
            raise Inconclusive("branch budget exceeded") from None
        return False
    if not leaves or not all(pair_forced(leaf, entry.pair, config) for leaf in leaves):
        return False
    closed = embedder(w.add_edge(*entry.pair), config)
    if not isinstance(closed, Embedded):
        if strict and closed.tag == "unknown":
            raise Inconclusive(f"solver undecided on closed witness: {closed.reason}")
        return False
    z = np.asarray(first.coords)
    # the witness embedding found first must already realise the pair at unit distance
    return bool(abs(abs(z[entry.pair[0]] - z[entry.pair[1]]) - 1) <= 1e-6)
