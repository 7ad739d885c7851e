import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patternboost.core import (
    Construction,
    Pool,
    ScoredConstruction,
    ScoreOverflowError,
    ShapeError,
    pool_insert,
    pool_load,
    pool_save,
)


def sc(score, payload, problem="toy"):
    return ScoredConstruction(score, Construction(problem, bytes(payload)))


def test_insert_and_order():
    pool = Pool("toy", 3, capacity=2)
    assert pool.insert(sc(5, [0, 1, 0]))
    assert pool.insert(sc(7, [1, 1, 0]))
    assert [e.score for e in pool.entries()] == [7, 5]


def test_duplicate_insert_is_noop():
    pool = Pool("toy", 3, capacity=4)
    pool.insert(sc(5, [0, 1, 0]))
    assert not pool.insert(sc(5, [0, 1, 0]))
    assert len(pool) == 1


def test_below_minimum_rejected_when_full():
    pool = Pool("toy", 2, capacity=3)
    for score in (70, 70, 70):
        pool.insert(sc(70, [score % 2, (score // 2) % 2]))
    pool = Pool("toy", 2, capacity=3)
    pool.insert(sc(70, [0, 0]))
    pool.insert(sc(70, [0, 1]))
    pool.insert(sc(70, [1, 0]))
    assert not pool.insert(sc(60, [1, 1]))
    assert sorted(e.score for e in pool.entries()) == [70, 70, 70]


def test_shape_mismatch_rejected():
    pool = Pool("toy", 3, capacity=2)
    with pytest.raises(ShapeError):
        pool.insert(sc(1, [0, 1]))
    with pytest.raises(ShapeError):
        pool.insert(sc(1, [0, 1, 0], problem="other"))


def test_score_overflow_flagged():
    with pytest.raises(ScoreOverflowError):
        ScoredConstruction(1 << 63, Construction("toy", b"\x00"))
    ScoredConstruction((1 << 63) - 1, Construction("toy", b"\x00"))


def test_selection_fraction_retention():
    # 40,000 baseline scores into a 10,000-capacity pool keeps the top 25%
    rng = np.random.default_rng(0)
    pool = Pool("toy", 4, capacity=10_000)
    scores = rng.integers(0, 100, size=40_000)
    for i, s in enumerate(scores):
        payload = [(i >> (8 * j)) & 0xFF for j in range(4)]
        pool.insert(ScoredConstruction(int(s), Construction("toy", bytes(payload))))
    assert len(pool) == 10_000
    kept_min = pool.min_score()
    assert kept_min >= int(np.sort(scores)[-10_000])


@given(st.lists(st.tuples(st.integers(-50, 50),
                          st.binary(min_size=3, max_size=3)), max_size=120))
@settings(max_examples=60, deadline=None)
def test_topk_matches_sort_oracle(items):
    pool = Pool("toy", 3, capacity=10)
    for score, payload in items:
        pool.insert(ScoredConstruction(score, Construction("toy", payload)))
    dedup = {}
    for score, payload in items:
        dedup.setdefault(payload, score)
    expected = sorted(
        ((s, p) for p, s in dedup.items()),
        key=lambda t: (-t[0], t[1])
    )[:10]
    got = [(e.score, e.construction.payload) for e in pool.entries()]
    assert got == expected


def test_insert_idempotent_for_identical_payload():
    pool = Pool("toy", 1, capacity=1)
    pool_insert(pool, sc(3, [1]))
    pool_insert(pool, sc(3, [1]))
    assert len(pool) == 1


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    pool = Pool("toy", 5, capacity=50)
    for _ in range(80):
        payload = bytes(int(b) for b in rng.integers(0, 2, size=5))
        pool.insert(ScoredConstruction(int(rng.integers(-20, 20)),
                                       Construction("toy", payload)))
    path = tmp_path / "pool.txt"
    pool_save(pool, path)
    assert pool_load(path) == pool
    # re-save is byte identical
    path2 = tmp_path / "pool2.txt"
    pool_save(pool_load(path), path2)
    assert path.read_text() == path2.read_text()


def test_save_empty_pool_header_only(tmp_path):
    pool = Pool("toy", 4, capacity=3)
    path = tmp_path / "pool.txt"
    pool_save(pool, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("patternboost-pool v1 toy 4")
    assert pool_load(path) == pool


def test_load_reports_bad_line_number(tmp_path):
    path = tmp_path / "pool.txt"
    path.write_text(
        "patternboost-pool v1 toy 3 10 1\n5\t010\n7\t01\n"
    )
    with pytest.raises(ValueError, match="line 3"):
        pool_load(path)


def test_best_score_never_decreases():
    rng = np.random.default_rng(1)
    pool = Pool("toy", 2, capacity=3)
    best = None
    for _ in range(200):
        payload = bytes(int(b) for b in rng.integers(0, 2, size=2))
        pool.insert(ScoredConstruction(int(rng.integers(0, 40)),
                                       Construction("toy", payload)))
        if len(pool):
            now = pool.best_score()
            assert best is None or now >= best
            best = now
