import pytest

from neighborwalk.access import ApiSession, BudgetExhausted, ProfileTable
from neighborwalk.labeling import PropertyMap

from .conftest import N1, N2, N3


@pytest.fixture
def session(g3):
    return ApiSession(g3, [PropertyMap("flag", [0.0, 1.0, 0.0])], budget=2)


def test_first_fetch_costs_one_query(session):
    infos = session.fetch_neighbors(N1)
    assert session.queries_used() == 1
    assert [(e.node, e.d_out, e.d_in) for e in infos] == [(N2, 2, 1), (N2, 2, 1)]
    assert infos[0].properties == {"flag": 1.0}


def test_refetch_is_free_and_identical(session):
    first = session.fetch_neighbors(N1)
    again = session.fetch_neighbors(N1)
    assert again == first
    assert session.queries_used() == 1


def test_budget_exhaustion_leaves_session_untouched(g3):
    s = ApiSession(g3, budget=1)
    s.fetch_neighbors(N1)
    before = (s.query_count, dict(s._cache))
    with pytest.raises(BudgetExhausted):
        s.fetch_neighbors(N2)
    assert (s.query_count, dict(s._cache)) == before
    assert not s.is_cached(N2)
    # cached nodes stay available after the budget is spent
    assert len(s.fetch_neighbors(N1)) == 2


def test_is_cached(g3):
    s = ApiSession(g3, budget=3)
    assert not s.is_cached(0)
    s.fetch_neighbors(N1)
    assert s.is_cached(N1)


def test_queries_count_distinct_nodes(g3):
    s = ApiSession(g3, budget=5)
    assert s.queries_used() == 0
    for v in (N1, N2, N3):
        s.fetch_neighbors(v)
    assert s.queries_used() == 3
    for v in (N1, N2, N3, N1, N2):
        s.fetch_neighbors(v)
    assert s.queries_used() == 3
    assert s.queries_used() == len(s._cache)


def test_neighbor_info_matches_graph(dba_small):
    s = ApiSession(dba_small, budget=50)
    for v in range(0, 500, 37):
        for e in s.fetch_neighbors(v):
            d = dba_small.degrees(e.node)
            assert (e.d_out, e.d_in) == (d.d_out, d.d_in)


def test_observed_and_profile(g3):
    s = ApiSession(g3, budget=3)
    s.fetch_neighbors(N3)
    assert s.observed() == {N2, N3}
    assert s.profile(N2).d_sum == 3
    with pytest.raises(KeyError):
        s.profile(N1)


def test_shared_table_needs_same_graph(g3, dba_small):
    table = ProfileTable(dba_small)
    with pytest.raises(ValueError):
        ApiSession(g3, budget=1, table=table)


def test_invalid_budget_and_node(g3):
    with pytest.raises(ValueError):
        ApiSession(g3, budget=0)
    with pytest.raises(IndexError):
        ApiSession(g3, budget=1).fetch_neighbors(7)


def test_budget_larger_than_graph_ends_when_all_fetched(g3):
    s = ApiSession(g3, budget=10)
    for v in (N1, N2):
        s.fetch_neighbors(v)
    assert not s.exhausted
    s.fetch_neighbors(N3)
    assert s.exhausted
    assert not ApiSession(g3).exhausted
