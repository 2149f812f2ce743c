"""The hardness-reduction construction and its structural audit."""

import random

import pytest

from cspgame.model import shortest_distance, two_coloring, validate_instance
from cspgame.q3sat import QFormula, pad_formula
from cspgame.reduction import (
    Label,
    build_reduction,
    verify_reduction,
    write_labels,
)

F43 = QFormula(4, ("e", "a", "e", "a"), ((1, -1, 2), (2, 3, 4), (-2, -3, -4)))
F65 = QFormula(6, ("e", "a", "e", "a", "e", "a"),
               ((1, -1, 2), (2, 3, 4), (-2, -3, -4), (5, 6, -1), (-5, -6, 3)))


@pytest.fixture(scope="module")
def art43():
    return build_reduction(F43)


@pytest.fixture(scope="module")
def art65():
    return build_reduction(F65)


class TestCounts:
    def test_customer_total(self, art43):
        n, m = 4, 3
        assert len(art43.pre_subdivision.instance.customers) == \
            3 * n * n + 10 * m + 3 * n - 5 == 85

    def test_cache_customers(self, art43):
        pre = art43.pre_subdivision
        cache = sum(1 for v in pre.instance.customers if pre.parts[v] == "cache")
        assert cache == 5 * 3 + 4 - 6 == 13

    def test_majority_threshold_identity(self, art43):
        n, m = 4, 3
        vc = len(art43.pre_subdivision.instance.customers)
        assert vc // 2 + 1 == 3 * n * n // 2 + 5 * m + 3 * n // 2 - 2 == 43

    def test_b_equals_half_square(self, art43):
        assert art43.B == 8   # 2n = 8 = n^2/2 at n=4

    def test_vertex_total_delta_documented(self, art43):
        n, m = 4, 3
        formula = 2 * n ** 4 + 3 * m * n * n // 2 + 3 * n * n - 3 * m * n + 12 * m + 3 * n - 4
        assert formula == 640
        enum = art43.pre_subdivision.instance.graph.vertex_count
        assert enum - formula == n ** 3 + 2

    def test_audits_pass(self, art43, art65):
        for art in (art43, art65):
            rep = verify_reduction(art)
            assert rep.ok, rep.format_table()


class TestStructure:
    def test_instance_valid(self, art43):
        assert validate_instance(art43.pre_subdivision.instance) == []
        assert validate_instance(art43.instance) == []

    def test_start_distance(self, art43):
        pre = art43.pre_subdivision.instance
        sub = art43.instance
        assert shortest_distance(pre, pre.starts_i[0], pre.starts_ii[0]) == 1
        assert shortest_distance(sub, sub.starts_i[0], sub.starts_ii[0]) == 2

    def test_subdivided_bipartite(self, art43):
        assert two_coloring(art43.instance.graph) is not None
        assert two_coloring(art43.pre_subdivision.instance.graph) is None

    def test_subdivision_metric_doubles(self, art43):
        pre = art43.pre_subdivision.instance
        sub = art43.instance
        rng = random.Random(5)
        n = pre.graph.vertex_count
        for _ in range(50):
            u, v = rng.randrange(n), rng.randrange(n)
            assert shortest_distance(sub, u, v) == 2 * shortest_distance(pre, u, v)

    def test_determinism(self):
        a = build_reduction(F43)
        b = build_reduction(F43)
        assert a.pre_subdivision.labels == b.pre_subdivision.labels
        assert a.pre_subdivision.instance == b.pre_subdivision.instance
        assert a.instance == b.instance

    def test_label_totality_and_parts(self, art43):
        for labeled in (art43.pre_subdivision, art43.subdivided):
            n = labeled.instance.graph.vertex_count
            assert set(labeled.labels) == set(range(n))
            assert set(labeled.parts) == set(range(n))
            assert set(labeled.parts.values()) <= {"main", "cache"}
        pre = art43.pre_subdivision
        for v, lab in pre.labels.items():
            if lab.family == "q":
                assert pre.parts[v] == "cache"
            if lab.family == "d":
                expected = "main" if lab.indices[0] == 0 else "cache"
                assert pre.parts[v] == expected

    def test_families_nonempty_iff_ranges(self, art43):
        fams = {}
        for lab in art43.pre_subdivision.labels.values():
            fams[lab.family] = fams.get(lab.family, 0) + 1
        n, m, B = 4, 3, 8
        assert fams["x"] == fams["xbar"] == n
        assert fams["u"] == 2 * n * n + n * n
        assert fams["y"] == 3 * m
        assert fams["p"] == 3 * m * (B - n)
        assert fams["q"] == (2 * n + 1) * n ** 3
        assert fams["d"] == 5 * m + n - 5
        assert fams["v0"] == fams["vI"] == fams["vII"] == 1

    def test_feedback_paths_reach_their_literals(self, art43):
        pre = art43.pre_subdivision
        ids = {lab: v for v, lab in pre.labels.items()}
        adj = pre.instance.graph.adjacency
        B, n = art43.B, art43.n
        for j, clause in enumerate(art43.formula.clauses, 1):
            for k, lit in enumerate(clause, 1):
                lit_lab = Label("x", (lit,)) if lit > 0 else Label("xbar", (-lit,))
                chain = [ids[Label("y", (j, k))]]
                chain += [ids[Label("p", (k, j, h))] for h in range(1, B - n + 1)]
                chain.append(ids[lit_lab])
                assert len(chain) - 2 == B - n
                for a, b in zip(chain, chain[1:]):
                    assert b in adj[a]

    def test_clamp_events_counted(self, art43):
        n, m = 4, 3
        assert len(art43.clamps) == n + 2 + 3 * m + 1

    def test_not_normalized_rejected(self):
        with pytest.raises(ValueError):
            build_reduction(QFormula(3, ("e", "a", "e"), ((1, -1, 2),)))
        with pytest.raises(ValueError):
            build_reduction(QFormula(2, ("e", "a"), ((1, 2, 2),)))

    def test_no_subdivide(self):
        art = build_reduction(F43, subdivide=False)
        assert art.subdivided is None
        assert art.instance == art.pre_subdivision.instance
        rep = verify_reduction(art)
        assert any("skipped" in note for note in rep.notes)

    def test_padded_pipeline(self):
        f = pad_formula(QFormula(1, ("e",), ((1, -1, 1),)))
        art = build_reduction(f)
        assert (art.n, art.m) == (4, 3)
        assert verify_reduction(art).ok


class TestSidecar:
    def test_label_file_shape(self, art43, tmp_path):
        path = tmp_path / "red.labels"
        write_labels(art43.pre_subdivision, path)
        lines = path.read_text().splitlines()
        assert len(lines) == art43.pre_subdivision.instance.graph.vertex_count
        first = lines[0].split()
        assert len(first) == 3 and first[2] in ("main", "cache")
        assert first[0] == "0"
        # every line parses back as id, label, part
        for ln in lines[:50]:
            vid, label, part = ln.split()
            int(vid)
            assert part in ("main", "cache")
