import numpy as np
import pytest

from patternboost.problems import matrices as mx
from patternboost.oracles import contains_312_enum


def from_grid(rows):
    n = len(rows)
    bits = bytes(int(ch) for row in rows for ch in row)
    return mx.BinaryMatrix(n, bits)


def random_matrix(n, rng, p=0.5):
    return mx.BinaryMatrix(n, bytes(int(b) for b in rng.random(n * n) < p))


def test_contains_312_definition_instance():
    m = from_grid(["001", "100", "010"])
    assert mx.contains_312(m)


def test_identity_is_312_free():
    for n in (1, 3, 5, 8):
        bits = bytearray(n * n)
        for i in range(n):
            bits[i * n + i] = 1
        assert not mx.contains_312(mx.BinaryMatrix(n, bytes(bits)))


def test_all_ones_3x3_contains_312():
    assert mx.contains_312(from_grid(["111", "111", "111"]))


def test_contains_312_matches_brute_force_all_3x3():
    for mask in range(512):
        bits = bytes((mask >> i) & 1 for i in range(9))
        m = mx.BinaryMatrix(3, bits)
        assert mx.contains_312(m) == contains_312_enum(m)


def test_contains_312_matches_brute_force_random_larger():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        m = random_matrix(n, rng, p=float(rng.uniform(0.1, 0.9)))
        assert mx.contains_312(m) == contains_312_enum(m)


def test_creates_312_agrees_with_recheck():
    rng = np.random.default_rng(1)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        m = random_matrix(n, rng, p=0.3)
        if mx.contains_312(m):
            continue
        rows = m.row_masks()
        r, c = int(rng.integers(n)), int(rng.integers(n))
        if (rows[r] >> c) & 1:
            continue
        rows2 = list(rows)
        rows2[r] |= 1 << c
        after = mx.contains_312(mx.matrix_from_rows(rows2, n))
        assert mx.creates_312(rows, n, r, c) == after


def test_permanent_identity_and_antidiagonal():
    for n in (1, 3, 5, 7):
        ident = bytearray(n * n)
        anti = bytearray(n * n)
        for i in range(n):
            ident[i * n + i] = 1
            anti[i * n + (n - 1 - i)] = 1
        assert mx.permanent(mx.BinaryMatrix(n, bytes(ident))) == 1
        assert mx.permanent(mx.BinaryMatrix(n, bytes(anti))) == 1


def test_permanent_all_ones_is_factorial():
    m = from_grid(["1111"] * 4)
    assert mx.permanent_naive(m) == 24
    assert mx.permanent(m) == 24


def test_permanent_ryser_matches_naive():
    rng = np.random.default_rng(2)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        m = random_matrix(n, rng, p=float(rng.uniform(0.2, 0.9)))
        assert mx.permanent(m) == mx.permanent_naive(m)


def test_permanent_size_guard():
    with pytest.raises(ValueError):
        mx.permanent(mx.BinaryMatrix(31, bytes(31 * 31)))


def test_local_search_312_contract():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(3, 8))
        out = mx.local_search_312(random_matrix(n, rng), rng)
        assert mx.is_312_free_maximal(out)


def test_local_search_312_from_all_ones():
    out = mx.local_search_312(from_grid(["111"] * 3), np.random.default_rng(0))
    assert not mx.contains_312(out)


def test_local_search_312_monotone_on_valid_input():
    rng = np.random.default_rng(4)
    for _ in range(10):
        n = 5
        m = mx.local_search_312(random_matrix(n, rng, 0.2), rng)
        again = mx.local_search_312(m, rng)
        assert mx.permanent(again) >= mx.permanent(m)
