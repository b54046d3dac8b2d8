import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthgraph.graph import EdgeListError, Graph, check_invariants, load_edge_list, save_edge_list


def test_add_edge_first_insertion():
    g = Graph(2)
    assert g.add_edge(0, 1) is True
    assert g.degree(0) == g.degree(1) == 1


def test_add_edge_rejects_self_loop():
    g = Graph(2)
    assert g.add_edge(0, 0) is False
    assert g.edge_count == 0


def test_add_edge_dedup():
    g = Graph(2)
    g.add_edge(0, 1)
    assert g.add_edge(0, 1) is False
    assert g.add_edge(1, 0) is False
    assert g.degree(0) == 1 and g.edge_count == 1


def test_add_edge_out_of_range():
    g = Graph(3)
    with pytest.raises(IndexError):
        g.add_edge(0, 3)
    with pytest.raises(IndexError):
        g.add_edge(-1, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=200))))
def test_random_insertions_keep_invariants(case):
    n, ops = case
    g = Graph(n)
    expected = set()
    for u, v in ops:
        added = g.add_edge(u, v)
        key = (min(u, v), max(u, v))
        assert added == (u != v and key not in expected)
        if added:
            expected.add(key)
    check_invariants(g)
    assert sum(g.degrees()) == 2 * g.edge_count
    assert set(g.edges()) == expected


def write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_path_graph(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 2\n"))
    assert g.vertex_count == 3
    assert g.degrees().tolist() == [1, 2, 1]


def test_load_orientation_and_duplicates(tmp_path):
    g = load_edge_list(write(tmp_path, "1 0\n0 1\n"))
    assert g.vertex_count == 2 and g.edge_count == 1
    assert list(g.edges()) == [(0, 1)]


def test_round_trip_triangle(tmp_path):
    text = "0 1\n0 2\n1 2\n"
    g = load_edge_list(write(tmp_path, text))
    out = tmp_path / "out.txt"
    save_edge_list(g, out)
    assert out.read_text() == text


def test_canonical_form_sorts_and_orients(tmp_path):
    g = load_edge_list(write(tmp_path, "2 1\n\n1 0\n2 0\n2 1\n"))
    out = tmp_path / "out.txt"
    save_edge_list(g, out)
    assert out.read_text() == "0 1\n0 2\n1 2\n"


def test_isolated_vertices_survive(tmp_path):
    g = Graph.from_edges(6, [(0, 2), (2, 3)])
    out = tmp_path / "iso.txt"
    save_edge_list(g, out)
    assert out.read_text().startswith("# vertices 6\n")
    assert load_edge_list(out) == g


def test_sparse_ids_remapped(tmp_path):
    g = load_edge_list(write(tmp_path, "10 20\n20 35\n"))
    assert g.vertex_count == 3
    assert list(g.edges()) == [(0, 1), (1, 2)]


@pytest.mark.parametrize("text,lineno", [
    ("0 1\n1 x\n", 2),
    ("0 1\n-1 2\n", 2),
    ("0 1 2\n", 1),
    ("# vertices 2\n0 5\n", 2),
])
def test_parse_errors_carry_line_number(tmp_path, text, lineno):
    with pytest.raises(EdgeListError) as ei:
        load_edge_list(write(tmp_path, text))
    assert ei.value.lineno == lineno
    assert f":{lineno}:" in str(ei.value)


def test_from_edges_matches_incremental():
    edges = [(3, 1), (1, 3), (0, 4), (4, 4), (2, 0)]
    g = Graph(5)
    for u, v in edges:
        g.add_edge(u, v)
    assert Graph.from_edges(5, edges) == g
    check_invariants(Graph.from_edges(5, edges))
