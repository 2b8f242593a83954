import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MOSER
from unitdist.embed import EmbedConfig, Unknown
from unitdist.enumeration import LevelStore
from unitdist.graphcore import Graph, parse_graph6
from unitdist.pipeline import default_family
from unitdist.tuud import (
    Inconclusive,
    LoadError,
    TuudCatalog,
    TuudEntry,
    is_reducible,
    load_catalog,
    save_catalog,
    validate_entry,
)


class TestCatalogFiles:
    def test_shipped_catalog(self, catalog):
        assert len(catalog) == 6
        first = catalog.entries[0]
        assert (first.witness.n, first.witness.m) == (6, 8)
        assert first.pair == (1, 5)
        assert [e.witness.n for e in catalog.entries] == [6, 7, 7, 8, 8, 8]

    def test_round_trip(self, tmp_path, catalog):
        path = tmp_path / "cat.txt"
        save_catalog(catalog, path, header="copy")
        again = load_catalog(path)
        assert again.entries == catalog.entries

    def test_comments_and_blanks(self, tmp_path):
        path = tmp_path / "cat.txt"
        path.write_text("# header\n\nElcg 1 5\n")
        assert len(load_catalog(path)) == 1

    @pytest.mark.parametrize("body,line", [
        ("Elcg 1 5\nElcg 1\n", 2),
        ("# c\nElcg 0 1\n", 2),   # 0-1 is an edge
        ("Elcg 1 1\n", 1),
        ("Elcg 1 9\n", 1),
        ("Elc! 1 5\n", 1),
        ("Elcg x 5\n", 1),
    ])
    def test_errors_carry_line_numbers(self, tmp_path, body, line):
        path = tmp_path / "cat.txt"
        path.write_text(body)
        with pytest.raises(LoadError) as exc:
            load_catalog(path)
        assert exc.value.line == line

    def test_empty_file(self, tmp_path):
        path = tmp_path / "cat.txt"
        path.write_text("")
        assert len(load_catalog(path)) == 0

    def test_entry_validation(self):
        with pytest.raises(ValueError):
            TuudEntry(Graph.path(3), (0, 1))
        TuudEntry(Graph.path(3), (0, 2))


class TestReducible:
    def test_witness_is_reducible(self, catalog):
        for i, entry in enumerate(catalog.entries):
            hit = is_reducible(entry.witness, catalog)
            assert hit is not None and hit.entry_index <= i

    def test_closed_witness_is_not_reduced_by_its_own_entry(self, catalog):
        entry = catalog.entries[0]
        closed = entry.witness.add_edge(*entry.pair)
        hit = is_reducible(closed, TuudCatalog([entry]))
        # every copy of the witness in the closed graph may still find another non-edge
        if hit is not None:
            phi = hit.embedding
            p, q = entry.pair
            assert not closed.has_edge(phi[p], phi[q])

    def test_embedding_is_a_subgraph_map(self, catalog):
        entry = catalog.entries[3]
        host = entry.witness.add_vertex(0b11)
        hit = is_reducible(host, catalog)
        w = catalog.entries[hit.entry_index]
        phi = hit.embedding
        assert len(set(phi)) == len(phi)
        assert all(host.has_edge(phi[u], phi[v]) for u, v in w.witness.edges())
        assert not host.has_edge(phi[w.pair[0]], phi[w.pair[1]])

    def test_small_graphs(self, catalog):
        for g in (MOSER, Graph.complete(3), Graph(0)):
            assert is_reducible(g, catalog) is None

    @settings(max_examples=30)
    @given(idx=st.integers(0, 5), rnd=st.randoms(use_true_random=False))
    def test_relabelling_invariance(self, idx, rnd, catalog):
        g = catalog.entries[idx].witness
        perm = list(range(g.n))
        rnd.shuffle(perm)
        assert (is_reducible(g, catalog) is None) == (is_reducible(g.permute(perm), catalog) is None)

    def test_max_density_graphs_up_to_twelve_survive(self, catalog):
        store = LevelStore(default_family())
        for n in range(13):
            _, level = store.max_density(n)
            for code in level.codes:
                assert is_reducible(parse_graph6(code), catalog) is None, (n, code)


class TestValidate:
    @pytest.mark.parametrize("idx", range(6))
    def test_catalog_entries(self, idx, catalog):
        assert validate_entry(catalog.entries[idx]) is True

    def test_four_cycle_is_not_totally_unfaithful(self):
        assert validate_entry(TuudEntry(Graph.cycle(4), (0, 2))) is False

    def test_free_vertex_is_not_forced(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2)])
        assert validate_entry(TuudEntry(g, (0, 3))) is False

    def test_non_embeddable_witness(self):
        g = Graph.complete(4).add_vertex(0)
        assert validate_entry(TuudEntry(g, (0, 4))) is False

    def test_inconclusive_when_strict(self, catalog):
        def undecided(g, config):
            return Unknown("branch budget", ())

        entry = catalog.entries[0]
        assert validate_entry(entry, embedder=undecided) is False
        with pytest.raises(Inconclusive):
            validate_entry(entry, embedder=undecided, strict=True)

    def test_seed_does_not_matter(self, catalog):
        rng = random.Random(0)
        for _ in range(3):
            cfg = EmbedConfig(rng_seed=rng.randrange(10**6))
            assert validate_entry(catalog.entries[0], config=cfg)
