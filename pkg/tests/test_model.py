import pytest
from hypothesis import given, strategies as st

from querykg import (
    EntityLink,
    QrelSet,
    QueryKG,
    RunList,
    binarize_qrels,
)


class TestBinarize:
    def test_above_threshold(self):
        q = QrelSet("document", {("t", "a"): 2})
        assert binarize_qrels(q, 1).entries[("t", "a")] == 1

    def test_zero_stays_zero(self):
        q = QrelSet("document", {("t", "a"): 0})
        for threshold in (1, 2, 5):
            assert binarize_qrels(q, threshold).entries[("t", "a")] == 0

    def test_threshold_two(self):
        q = QrelSet("document", {("t", "a"): 0, ("t", "b"): 1, ("t", "c"): 3})
        out = binarize_qrels(q, 2)
        # oracle: elementwise grade >= 2
        assert dict(out.entries) == {("t", "a"): 0, ("t", "b"): 0, ("t", "c"): 1}

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            binarize_qrels(QrelSet("document", {}), 0)

    @given(
        st.dictionaries(
            st.tuples(st.text(min_size=1, max_size=3), st.text(min_size=1, max_size=3)),
            st.integers(min_value=0, max_value=5),
        ),
        st.integers(min_value=1, max_value=5),
    )
    def test_properties(self, entries, threshold):
        q = QrelSet("document", entries)
        out = binarize_qrels(q, threshold)
        assert len(out) == len(q)
        assert all(g in (0, 1) for g in out.entries.values())
        # idempotent at threshold 1 on already-binary qrels
        assert binarize_qrels(out, 1) == out


class TestEntityLink:
    def test_confidence_out_of_range(self):
        with pytest.raises(ValueError, match="confidence out of range"):
            EntityLink("d1", "e1", confidence=1.5)

    def test_span_order(self):
        with pytest.raises(ValueError):
            EntityLink("d1", "e1", span_start=10, span_end=3)

    def test_absent_spans_allowed(self):
        link = EntityLink("d1", "e1")
        assert link.span_start == -1 and link.confidence == 1.0


class TestRunList:
    def test_rank_gap_rejected(self):
        with pytest.raises(ValueError):
            RunList("t", "document", (("a", 1, 2.0), ("b", 3, 1.0)))

    def test_duplicate_item_rejected(self):
        with pytest.raises(ValueError):
            RunList("t", "document", (("a", 1, 2.0), ("a", 2, 1.0)))

    def test_increasing_scores_rejected(self):
        with pytest.raises(ValueError):
            RunList("t", "document", (("a", 1, 1.0), ("b", 2, 2.0)))

    def test_from_scores_sorts_and_breaks_ties_by_id(self):
        run = RunList.from_scores("t", "document", [("b", 1.0), ("a", 1.0), ("c", 2.0)])
        assert run.item_ids() == ["c", "a", "b"]
        assert [rank for _, rank, _ in run.items] == [1, 2, 3]


class TestQueryKG:
    def test_edge_endpoints_must_exist(self):
        with pytest.raises(ValueError):
            QueryKG("t", {"d1": 1.0}, {}, {"d1": 1.0}, {}, {("d1", "e1"): 1.0})

    def test_query_edges_mirror_nodes(self):
        with pytest.raises(ValueError):
            QueryKG("t", {"d1": 1.0}, {}, {}, {}, {})

    def test_from_nodes(self):
        kg = QueryKG.from_nodes("t", {"d1": 0.5}, {"e1": 0.2}, {("d1", "e1"): 2.0})
        assert dict(kg.qd_edges) == {"d1": 0.5}
        assert dict(kg.qe_edges) == {"e1": 0.2}
