"""Binary matrices avoiding the 312 pattern, scored by their permanent.

A matrix contains the pattern when rows r1 < r2 < r3 and columns
c1 < c2 < c3 exist with ones at (r1, c3), (r2, c1) and (r3, c2).  Matrices
are stored row-major as n*n bits; the working form is one column bitmask
per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

PERMANENT_MAX_N = 30


@dataclass(frozen=True)
class BinaryMatrix:
    n: int
    bits: bytes  # row-major, n*n entries

    def __post_init__(self):
        if len(self.bits) != self.n * self.n:
            raise ValueError(f"expected {self.n * self.n} entries")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("matrix entries must be 0/1")

    def row_masks(self) -> list[int]:
        n = self.n
        return [
            sum(1 << j for j in range(n) if self.bits[i * n + j])
            for i in range(n)
        ]


def matrix_from_rows(rows: list[int], n: int) -> BinaryMatrix:
    bits = bytearray(n * n)
    for i in range(n):
        for j in range(n):
            bits[i * n + j] = (rows[i] >> j) & 1
    return BinaryMatrix(n, bytes(bits))


def _range_mask(lo: int, hi: int) -> int:
    """Bitmask of columns strictly between lo and hi."""
    if hi - lo < 2:
        return 0
    return ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)


def contains_312(m: BinaryMatrix) -> bool:
    """True iff some middle one at (r2, c1) sees a one above it in a larger
    column c3 and a one below it in a column strictly between c1 and c3."""
    rows = m.row_masks()
    n = m.n
    above_max = -1  # largest column of any one strictly above the current row
    below = [0] * n  # union of the row masks strictly below row r
    for r in range(n - 2, -1, -1):
        below[r] = below[r + 1] | rows[r + 1]
    for r2 in range(n):
        if above_max >= 2 and rows[r2]:
            for c1 in _iter_bits(rows[r2]):
                if c1 >= above_max - 1:
                    break
                if below[r2] & _range_mask(c1, above_max):
                    return True
        if rows[r2]:
            above_max = max(above_max, rows[r2].bit_length() - 1)
    return False


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def find_312(m: BinaryMatrix):
    """Return a witness ((r1,c3), (r2,c1), (r3,c2)) or None."""
    rows = m.row_masks()
    n = m.n
    for r2 in range(n):
        for c1 in _iter_bits(rows[r2]):
            for r1 in range(r2):
                c3_mask = rows[r1] >> (c1 + 2)
                if not c3_mask:
                    continue
                c3 = c3_mask.bit_length() - 1 + c1 + 2
                for r3 in range(r2 + 1, n):
                    mid = rows[r3] & _range_mask(c1, c3)
                    if mid:
                        c2 = (mid & -mid).bit_length() - 1
                        return ((r1, c3), (r2, c1), (r3, c2))
    return None


def creates_312(rows: list[int], n: int, r: int, c: int) -> bool:
    """Would setting entry (r, c) to one create a 312 pattern, assuming the
    current matrix is pattern-free?  Checks the new one in each of the three
    pattern roles."""
    # role (r2, c1): one above in column > c+1, one below strictly between
    above_max = -1
    for u in range(r):
        if rows[u]:
            above_max = max(above_max, rows[u].bit_length() - 1)
    if above_max >= c + 2:
        rng_mask = _range_mask(c, above_max)
        for u in range(r + 1, n):
            if rows[u] & rng_mask:
                return True
    # role (r1, c3): below r, a one at c1 then a later one at c2, c1 < c2 < c
    if c >= 2:
        min_c1 = None
        low_mask = (1 << (c - 1)) - 1  # columns <= c-2
        for u in range(r + 1, n):
            if min_c1 is not None and rows[u] & _range_mask(min_c1, c):
                return True
            small = rows[u] & low_mask
            if small:
                lo = (small & -small).bit_length() - 1
                if min_c1 is None or lo < min_c1:
                    min_c1 = lo
    # role (r3, c2): above r, a one at c3 > c preceded by a one at c1 < c
    max_c3 = -1
    below_c = (1 << c) - 1
    for u in range(r):
        if max_c3 > c and rows[u] & below_c:
            return True
        high = rows[u] >> (c + 1)
        if high:
            max_c3 = max(max_c3, high.bit_length() - 1 + c + 1)
    return False


def permanent_naive(m: BinaryMatrix) -> int:
    """Factorial-time definition; the oracle for small n."""
    n = m.n
    if n > 9:
        raise ValueError("naive permanent limited to n <= 9")
    rows = m.row_masks()
    total = 0
    for perm in permutations(range(n)):
        prod = 1
        for i, j in enumerate(perm):
            if not (rows[i] >> j) & 1:
                prod = 0
                break
        total += prod
    return total


def permanent(m: BinaryMatrix) -> int:
    """Exact permanent via Ryser's inclusion-exclusion over column subsets,
    walked in Gray-code order so each step flips one column in or out.

    Row sums are updated only for rows with a one in the flipped column; the
    running product is maintained through the count of zero row sums and the
    exact product of the nonzero ones, so each step costs O(ones in column)
    arbitrary-precision operations.
    """
    n = m.n
    if n > PERMANENT_MAX_N:
        raise ValueError(f"permanent limited to n <= {PERMANENT_MAX_N}")
    if n == 0:
        return 1
    rows = m.row_masks()
    col_rows = [[i for i in range(n) if (rows[i] >> j) & 1] for j in range(n)]
    rowsum = [0] * n
    zero_rows = n
    prod_nonzero = 1
    size_parity = 0  # parity of |S|
    total = 0
    for step in range(1, 1 << n):
        j = (step & -step).bit_length() - 1  # column flipped by the Gray code
        gray_bit = ((step ^ (step >> 1)) >> j) & 1
        delta = 1 if gray_bit else -1
        for i in col_rows[j]:
            old = rowsum[i]
            new = old + delta
            rowsum[i] = new
            if old == 0:
                zero_rows -= 1
            else:
                prod_nonzero //= old
            if new == 0:
                zero_rows += 1
            else:
                prod_nonzero *= new
        size_parity ^= 1
        if zero_rows == 0:
            total += prod_nonzero if size_parity == n % 2 else -prod_nonzero
    return total


def local_search_312(m: BinaryMatrix, rng) -> BinaryMatrix:
    """Delete a random entry of some 312 pattern until pattern-free, then add
    ones at random admissible positions until maximal."""
    n = m.n
    cur = m
    rows = cur.row_masks()
    while True:
        witness = find_312(matrix_from_rows(rows, n))
        if witness is None:
            break
        r, c = witness[rng.integers(3)]
        rows[r] &= ~(1 << c)
    cells = [(i, j) for i in range(n) for j in range(n)]
    for t in rng.permutation(len(cells)):
        r, c = cells[t]
        if not (rows[r] >> c) & 1 and not creates_312(rows, n, r, c):
            rows[r] |= 1 << c
    return matrix_from_rows(rows, n)


def is_312_free_maximal(m: BinaryMatrix) -> bool:
    if contains_312(m):
        return False
    rows = m.row_masks()
    n = m.n
    for r in range(n):
        for c in range(n):
            if not (rows[r] >> c) & 1 and not creates_312(rows, n, r, c):
                return False
    return True
