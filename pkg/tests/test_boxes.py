import numpy as np
import pytest

from patternboost.problems import boxes as bx


def B(*factors):
    return tuple(sum(1 << v for v in f) for f in factors)


def test_properness():
    assert bx.is_proper(B((0,), (1, 2)))
    assert not bx.is_proper(B((0, 1, 2), (1,)))


def test_unit_boxes_double_cover():
    d = 2
    cover = [B((x,), (y,)) for x in (0, 1, 2) for y in (0, 1, 2)] * 2
    assert bx.verify_double_cover(cover, d)
    assert bx.score_box_cover(cover, d) == -18


def test_improper_box_fails_verify_and_scores_sentinel():
    d = 2
    cover = [B((0, 1, 2), (0,))]
    assert not bx.verify_double_cover(cover, d)
    assert bx.score_box_cover(cover, d) == bx.INVALID_SCORE


def test_score_penalties():
    d = 1
    # {0,1} twice: points 0,1 covered twice, point 2 uncovered twice
    cover = [B((0, 1)), B((0, 1))]
    assert bx.score_box_cover(cover, d, over_weight=3, under_weight=1) == \
        -2 - 0 - 1 * 2
    # triple cover of point 0, points 1 and 2 exactly covered
    cover = [B((0,))] * 3 + [B((1, 2))] * 2
    score = bx.score_box_cover(cover, d, over_weight=3, under_weight=1)
    assert score == -5 - 3 * 1 - 1 * 0


def test_double_cover_may_repeat_boxes():
    d = 1
    cover = [B((0, 1)), B((0, 1)), B((2,)), B((2,))]
    assert bx.verify_double_cover(cover, d)


def test_local_search_boxes_contract():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3):
        for _ in range(5):
            out = bx.local_search_boxes([], d, rng)
            assert bx.verify_double_cover(out, d)
    # repair an over-covered start
    start = [B((0, 1), (0, 1))] * 4
    out = bx.local_search_boxes(start, 2, rng)
    assert bx.verify_double_cover(out, 2)


def test_local_search_keeps_valid_cover_unchanged():
    rng = np.random.default_rng(1)
    cover = [B((0, 1)), B((0, 1)), B((2,)), B((2,))]
    out = bx.local_search_boxes(cover, 1, rng)
    assert sorted(out) == sorted(cover)
