import numpy as np
import pytest

from patternboost import oracles as orc
from patternboost.fixtures import all_fixtures, load_cube, load_sperner
from patternboost.problems import graphs as gr


def test_brute_best_triangle_mantel():
    # complete bipartite: floor(n^2/4)
    assert orc.brute_best("triangle", 4) == 4
    assert orc.brute_best("triangle", 5) == 6
    assert orc.brute_best("triangle", 6) == 9


def test_brute_best_isosceles_n4():
    assert orc.brute_best("isosceles", 4) == 6


def test_brute_best_c4_small():
    # frozen from exhaustive enumeration over all graphs
    assert orc.brute_best("c4", 4) == 4
    assert orc.brute_best("c4", 5) == 6
    assert orc.brute_best("c4", 6) == 7


def test_brute_best_cube_d3():
    # frozen from exhaustive enumeration: 9 edges = 2^3 + C(3,1) - 2
    assert orc.brute_best("cube", 3) == -9


def test_brute_best_sphere_n2():
    # all eight corners are cospherical; four points are the maximum
    assert orc.brute_best("sphere", 2) == 4


def test_brute_best_cross_sperner_pi42():
    assert orc.brute_best("cross_sperner", 4, k=2) == 16


def test_brute_best_boxes_d2():
    assert orc.brute_best("boxes", 2) == -6


def test_brute_best_refuses_large_sizes():
    with pytest.raises(ValueError):
        orc.brute_best("triangle", 8)
    with pytest.raises(ValueError):
        orc.brute_best("unknown", 3)


def test_brute_best_matches_local_search_reachability():
    # every exhaustive optimum is attained by some local-search run
    rng = np.random.default_rng(0)
    best = max(
        gr.local_search_triangle(gr.GraphBits(6, bytes(15)), rng).edge_count()
        for _ in range(200)
    )
    assert best == orc.brute_best("triangle", 6)


def test_count_structures_examples():
    k4 = gr.graph_from_edges(4, [(i, j) for i in range(4)
                                 for j in range(i + 1, 4)])
    assert orc.count_triangles_enum(k4) == 4
    k22 = gr.graph_from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert orc.count_c4_enum(k22) == 1


def test_fixture_reports_all_named():
    reports = {r.fixture for r in map(orc.verify_fixture, all_fixtures())}
    assert "cube_81" in reports
    assert "sperner_108" in reports
    assert "boxes_41" in reports


def test_cube_fixture_verifies():
    rep = orc.verify_fixture(load_cube())
    assert rep.ok, rep.lines()


def test_cube_fixture_with_edge_removed_fails():
    fix = load_cube()
    broken = orc.verify_fixture(
        type(fix)(fix.problem_kind, fix.name,
                  {"d": 6, "edges": fix.payload["edges"][:-1]},
                  fix.claims)
    )
    assert not broken.ok
    failing = {a.name for a in broken.assertions if not a.ok}
    assert failing & {"edge_count", "spanning_connected", "diameter"}


def test_sperner_fixture_with_set_removed_fails():
    fix = load_sperner()
    payload = dict(fix.payload)
    payload["masks"] = payload["masks"][:-1]
    broken = orc.verify_fixture(
        type(fix)(fix.problem_kind, fix.name, payload, fix.claims)
    )
    assert not broken.ok
