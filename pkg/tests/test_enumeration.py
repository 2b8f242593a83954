import itertools
import json
import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import K4, K23, graphs, nx_contains
from unitdist.enumeration import (
    BudgetExceeded,
    DependencyError,
    EnumConfig,
    ForbiddenFamily,
    Level,
    LevelStore,
    bad_neighborhoods,
    build_level,
    derive_rooted_family,
    extend,
    load_family,
    max_density,
    naive_level,
    read_level,
    save_family,
    schade_bound,
    unique_rooted,
    write_level,
)
from unitdist.graphcore import Graph, are_isomorphic, canonical_form, mask_of, parse_graph6

DIAMOND = parse_graph6("C^")


def brute_level(n, m, family):
    """All n-vertex m-edge graphs by edge subsets, filtered with networkx."""
    out = set()
    for edges in itertools.combinations(itertools.combinations(range(n), 2), m):
        g = Graph.from_edges(n, edges)
        if not any(nx_contains(g, f) for f in family):
            out.add(canonical_form(g))
    return out


class TestSchade:
    @pytest.mark.parametrize("n,m,expected", [(22, 61, 56), (21, 57, 52), (5, 0, 0), (1, 0, 0), (2, 1, 0), (3, 3, 1)])
    def test_values(self, n, m, expected):
        assert schade_bound(n, m) == expected

    def test_domain(self):
        with pytest.raises(ValueError):
            schade_bound(0, 0)

    @given(st.integers(1, 200), st.integers(0, 5000))
    def test_is_exact_ceiling(self, n, m):
        b = schade_bound(n, m)
        assert b * n >= m * (n - 2) and (b - 1) * n < m * (n - 2) or b == 0

    @given(graphs(min_n=4, max_n=12, p=0.5))
    def test_lemma_on_random_graphs(self, g):
        best = max(g.remove_vertex(v).m for v in range(g.n))
        assert best >= schade_bound(g.n, g.m)


class TestFamily:
    def test_rejects_isolated_vertex(self):
        with pytest.raises(ValueError):
            ForbiddenFamily([Graph(3, None)])

    def test_validate(self, family74):
        family74.validate()
        with pytest.raises(ValueError):
            ForbiddenFamily([K4, Graph.complete(5)]).validate()
        with pytest.raises(ValueError):
            ForbiddenFamily([Graph.cycle(4), Graph.complete_bipartite(2, 2)]).validate()

    def test_shipped_family(self, family74):
        sizes = [g.n for g in family74.members]
        assert len(family74) == 74
        assert [sizes.count(k) for k in range(4, 10)] == [1, 1, 1, 3, 13, 55]
        assert are_isomorphic(family74.members[0], K4)
        assert are_isomorphic(family74.members[1], K23)

    def test_round_trip(self, tmp_path, family74):
        path = tmp_path / "f.g6"
        save_family(family74, path, header="test")
        back = load_family(path)
        assert [canonical_form(g) for g in back.members] == [canonical_form(g) for g in family74.members]

    def test_load_error_names_line(self, tmp_path):
        path = tmp_path / "bad.g6"
        path.write_text("C~\nnot-a-code\n")
        with pytest.raises(ValueError, match=":2:"):
            load_family(path)


class TestRooted:
    def test_k4(self):
        rooted = derive_rooted_family([K4])
        assert len(rooted) == 4
        for r in rooted:
            assert are_isomorphic(r.reduced, Graph.complete(3)) and sorted(r.root_neighborhood) == [0, 1, 2]

    def test_k23(self):
        rooted = derive_rooted_family([K23])
        k13 = [r for r in rooted if are_isomorphic(r.reduced, Graph.complete_bipartite(1, 3))]
        c4 = [r for r in rooted if are_isomorphic(r.reduced, Graph.cycle(4))]
        assert len(k13) == 2 and len(c4) == 3
        for r in k13:
            leaves = {v for v in range(4) if r.reduced.degree(v) == 1}
            assert set(r.root_neighborhood) == leaves
        for r in c4:
            a, b = r.root_neighborhood
            assert not r.reduced.has_edge(a, b)

    def test_k3(self):
        rooted = derive_rooted_family([Graph.complete(3)])
        assert len(rooted) == 3 and all(len(r.root_neighborhood) == 2 for r in rooted)

    def test_isolated_roots_dropped(self):
        g = Graph.from_edges(3, [(0, 1)])
        assert len(derive_rooted_family([g])) == 2

    def test_unique(self):
        assert len(unique_rooted(derive_rooted_family([K4]))) == 1
        assert len(unique_rooted(derive_rooted_family([K23]))) == 2


def brute_bad_sets(host, family, max_size):
    """Minimal T (|T| <= max_size) with host + vertex joined to T containing a family member."""
    bad = []
    for k in range(1, max_size + 1):
        for t in itertools.combinations(range(host.n), k):
            if any(set(b) <= set(t) for b in bad):
                continue
            if any(nx_contains(host.add_vertex(mask_of(t)), f) for f in family):
                bad.append(t)
    return {frozenset(t) for t in bad}


class TestBadNeighborhoods:
    def test_triangle_k4(self):
        bad = bad_neighborhoods(Graph.complete(3), derive_rooted_family([K4]), 3)
        assert bad.as_sets() == [frozenset({0, 1, 2})]

    def test_path_k4(self):
        assert bad_neighborhoods(Graph.path(3), derive_rooted_family([K4]), 3).minimal_sets == []

    def test_square_k23(self):
        bad = bad_neighborhoods(Graph.cycle(4), derive_rooted_family([K23]), 4)
        assert {frozenset({0, 2}), frozenset({1, 3})} <= set(bad.as_sets())

    @given(graphs(min_n=1, max_n=6))
    def test_matches_brute_force(self, host):
        family = [K4, K23]
        bad = bad_neighborhoods(host, derive_rooted_family(family), host.n)
        # the characterisation assumes an F-free host
        if any(nx_contains(host, f) for f in family):
            return
        assert set(bad.as_sets()) == brute_bad_sets(host, family, host.n)

    @given(graphs(min_n=1, max_n=7))
    def test_antichain(self, host):
        sets = bad_neighborhoods(host, derive_rooted_family([K4, K23]), host.n).as_sets()
        assert not any(a < b for a in sets for b in sets)


class TestExtend:
    def test_triangle_full(self):
        bad = bad_neighborhoods(Graph.complete(3), derive_rooted_family([K4]), 3)
        assert list(extend(Graph.complete(3), 3, bad)) == []

    def test_triangle_two(self):
        bad = bad_neighborhoods(Graph.complete(3), derive_rooted_family([K4]), 3)
        out = list(extend(Graph.complete(3), 2, bad))
        assert len(out) == 3 and all(are_isomorphic(g, DIAMOND) for g in out)

    def test_diamond_two(self):
        family = [K4, K23]
        bad = bad_neighborhoods(DIAMOND, derive_rooted_family(family), 2)
        got = [canonical_form(g) for g in extend(DIAMOND, 2, bad)]
        expected = [canonical_form(DIAMOND.add_vertex(mask_of(t))) for t in itertools.combinations(range(4), 2)
                    if not any(nx_contains(DIAMOND.add_vertex(mask_of(t)), f) for f in family)]
        assert got == expected
        assert len(got) == 4  # {0,1} and {2,3} both close a K2,3

    def test_required_vertices(self):
        bad = bad_neighborhoods(Graph.path(4), [], 0)
        out = list(extend(Graph.path(4), 2, bad, required=0b1))
        assert len(out) == 3 and all(g.has_edge(0, 4) for g in out)

    def test_lexicographic(self):
        bad = bad_neighborhoods(Graph(4), [], 0)
        nbs = [g.neighbors(4) for g in extend(Graph(4), 2, bad)]
        assert nbs == sorted(nbs)


class TestBuildLevel:
    def test_diamond_from_triangles(self):
        family = ForbiddenFamily([K4])
        store = LevelStore(family)
        lower = {(3, mp): store.get(3, mp) for mp in (3, 2)}
        level = build_level(4, 5, lower, family)
        assert level.codes == (canonical_form(DIAMOND),)

    def test_missing_dependency(self):
        with pytest.raises(DependencyError) as exc:
            build_level(5, 7, {}, ForbiddenFamily([K4]))
        assert (exc.value.n, exc.value.m) == (4, 7 - 0) or exc.value.n == 4

    def test_too_many_edges(self):
        assert len(build_level(4, 7, {}, ForbiddenFamily([K4]))) == 0

    def test_table_rows(self, family74):
        store = LevelStore(family74)
        assert len(store.get(6, 9)) == 4
        assert len(store.get(8, 15)) == 0
        assert len(store.get(8, 14)) == 3

    def test_every_graph_is_f_free(self, family74):
        store = LevelStore(family74)
        rng = random.Random(0)
        for m in range(0, 19):
            for code in rng.sample(store.get(8, m).codes, min(5, len(store.get(8, m)))):
                g = parse_graph6(code)
                assert (g.n, g.m) == (8, m)
                assert not any(nx_contains(g, f) for f in family74.members if f.n <= 8)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_against_subset_enumeration(self, n):
        family = [K4, K23]
        store = LevelStore(ForbiddenFamily(family))
        for m in range(comb(n, 2) + 1):
            assert set(store.get(n, m).codes) == brute_level(n, m, family), (n, m)

    @pytest.mark.parametrize("n", [5, 6, 7])
    def test_against_naive_augmentation(self, n, family74):
        members = [f for f in family74.members if f.n <= n]
        store = LevelStore(family74)
        prev = None
        for m in range(comb(n, 2) + 1):
            prev = naive_level(n, m, members, prev)
            assert store.get(n, m).codes == prev.codes, (n, m)

    def test_parallel_equals_serial(self, family74):
        serial = LevelStore(family74).get(8, 13)
        parallel = LevelStore(family74, EnumConfig(jobs=2, batch_size=8)).get(8, 13)
        assert serial == parallel


class TestMaxDensity:
    @pytest.mark.parametrize("n,u,count", [(7, 12, 1), (11, 23, 2), (12, 27, 1)])
    def test_table_rows(self, n, u, count, family74):
        got, level = max_density(n, family74)
        assert (got, len(level)) == (u, count)

    def test_monotone(self, family74):
        store = LevelStore(family74)
        us = [store.max_density(n)[0] for n in range(1, 11)]
        assert all(a <= b <= a + n for n, (a, b) in enumerate(zip(us, us[1:]), start=1))

    def test_small_family_overshoots(self):
        # with only K4 and K2,3 forbidden the bound is weaker from six vertices on
        u, _ = max_density(6, ForbiddenFamily([K4, K23]))
        assert u == 10

    def test_budget(self, family74):
        store = LevelStore(family74, EnumConfig(max_graphs=50))
        with pytest.raises(BudgetExceeded) as exc:
            store.max_density(10)
        assert exc.value.completed


class TestCheckpoint:
    def test_files(self, tmp_path, family74):
        level = LevelStore(family74).get(6, 9)
        path = write_level(tmp_path, level)
        assert path.name == "U_6_9.g6"
        meta = json.loads(path.with_suffix(".json").read_text())
        assert meta == {"n": 6, "m": 9, "count": 4, "complete": True}
        assert read_level(tmp_path, 6, 9) == level

    def test_incomplete_level_is_ignored(self, tmp_path):
        write_level(tmp_path, Level(3, 1, ("BG",)), complete=False)
        assert read_level(tmp_path, 3, 1) is None

    def test_resume_is_byte_identical(self, tmp_path, family74):
        ref_dir, run_dir = tmp_path / "ref", tmp_path / "run"
        LevelStore(family74, EnumConfig(checkpoint=str(ref_dir), batch_size=4)).max_density(9)

        class Stop(Exception):
            pass

        calls = {"k": 0}

        def interrupt(n, m, mp, idx):
            calls["k"] += 1
            if n == 9 and calls["k"] % 7 == 0:
                raise Stop

        for _ in range(200):
            try:
                LevelStore(family74, EnumConfig(checkpoint=str(run_dir), batch_size=4, on_batch=interrupt)).max_density(9)
                break
            except Stop:
                continue
        else:
            pytest.fail("run never finished")
        ref = {p.name: p.read_bytes() for p in ref_dir.glob("U_*")}
        run = {p.name: p.read_bytes() for p in run_dir.glob("U_*")}
        assert ref == run
        assert not list(run_dir.glob("*.partial.json"))


class TestPruning:
    @pytest.mark.parametrize("n", [6, 7, 8])
    def test_rules_do_not_change_levels(self, n, family74):
        on = LevelStore(family74, EnumConfig(prune=True))
        off = LevelStore(family74, EnumConfig(prune=False))
        for m in range(comb(n, 2) + 1):
            assert on.get(n, m) == off.get(n, m), (n, m)
