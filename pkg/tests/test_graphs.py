import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patternboost.problems import graphs as gr
from patternboost.oracles import count_c4_enum, count_triangles_enum


def random_graph(n, rng, p=0.5):
    bits = bytes(int(b) for b in rng.random(n * (n - 1) // 2) < p)
    return gr.GraphBits(n, bits)


def test_edge_index_bijection():
    for n in (2, 3, 5, 8, 20):
        seen = set()
        for i in range(n):
            for j in range(i + 1, n):
                idx = gr.edge_index(n, i, j)
                assert gr.index_edge(n, idx) == (i, j)
                seen.add(idx)
        assert seen == set(range(n * (n - 1) // 2))


def test_score_triangle_empty_graph():
    g = gr.GraphBits(20, bytes(190))
    assert gr.score_triangle(g) == 0


def test_score_triangle_k3():
    g = gr.graph_from_edges(3, [(0, 1), (0, 2), (1, 2)])
    assert count_triangles_enum(g) == 1
    assert gr.score_triangle(g) == 3 - 2 * 1 == 1


def k_10_10():
    return gr.graph_from_edges(
        20, [(i, 10 + j) for i in range(10) for j in range(10)]
    )


def test_score_triangle_complete_bipartite():
    assert gr.score_triangle(k_10_10()) == 100


def test_triangle_counts_match_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(3, 9))
        g = random_graph(n, rng)
        assert gr.triangle_count(g) == count_triangles_enum(g)


def test_c4_counts_match_enumeration():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(4, 9))
        g = random_graph(n, rng)
        assert gr.c4_count(g) == count_c4_enum(g)


def test_local_search_triangle_fixes_k3():
    for seed in range(20):
        out = gr.local_search_triangle(
            gr.graph_from_edges(3, [(0, 1), (0, 2), (1, 2)]),
            np.random.default_rng(seed),
        )
        assert out.edge_count() == 2


def test_local_search_triangle_preserves_maximal_input():
    out = gr.local_search_triangle(k_10_10(), np.random.default_rng(0))
    assert out == k_10_10()


def test_local_search_triangle_output_contract():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(4, 10))
        out = gr.local_search_triangle(random_graph(n, rng), rng)
        assert gr.is_maximal_triangle_free(out)


def test_local_search_never_decreases_score():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = int(rng.integers(4, 10))
        g = random_graph(n, rng)
        assert gr.score_triangle(gr.local_search_triangle(g, rng)) >= \
            gr.score_triangle(g)
        assert gr.score_c4(gr.local_search_c4(g, rng)) >= gr.score_c4(g)


def test_star_is_c4_free():
    star = gr.graph_from_edges(20, [(0, i) for i in range(1, 20)])
    assert gr.is_c4_free(star)
    assert gr.score_c4(star) == 19


def test_local_search_c4_output_contract():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(4, 10))
        out = gr.local_search_c4(random_graph(n, rng), rng)
        assert gr.is_maximal_c4_free(out)


def test_c4_free_graphs_may_keep_triangles():
    g = gr.graph_from_edges(3, [(0, 1), (0, 2), (1, 2)])
    assert gr.is_c4_free(g)
    out = gr.local_search_c4(g, np.random.default_rng(0))
    assert out == g


@given(st.integers(0, 2 ** 15 - 1))
@settings(max_examples=200, deadline=None)
def test_triangle_score_formula_property(mask):
    n = 6
    bits = bytes((mask >> i) & 1 for i in range(15))
    g = gr.GraphBits(n, bits)
    assert gr.score_triangle(g) == g.edge_count() - 2 * count_triangles_enum(g)
    assert gr.score_c4(g) == g.edge_count() - 2 * count_c4_enum(g)


def test_graphbits_validation():
    with pytest.raises(ValueError):
        gr.GraphBits(4, bytes(5))
    with pytest.raises(ValueError):
        gr.GraphBits(3, bytes([0, 2, 0]))
