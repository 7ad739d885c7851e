"""Double covers of {0,1,2}^d by proper sub-boxes, minimizing the box count.

A box is a d-tuple of nonempty subsets of {0,1,2}, each stored as a 3-bit
mask in 1..7; it is proper when no factor is the full set (mask 7).  A valid
construction covers every point of the grid exactly twice.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

Box = tuple[int, ...]  # one factor mask per axis

FULL = 7
PROPER_FACTORS = (1, 2, 3, 4, 5, 6)  # nonempty proper subsets of {0,1,2}
INVALID_SCORE = -(1 << 62)  # sentinel for covers containing improper boxes


def is_proper(box: Box) -> bool:
    return all(1 <= f <= 6 for f in box)


def box_contains(box: Box, point: tuple[int, ...]) -> bool:
    return all((f >> c) & 1 for f, c in zip(box, point))


@lru_cache(maxsize=None)
def grid_points(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(product((0, 1, 2), repeat=d))


def cover_counts(boxes, d: int) -> dict[tuple[int, ...], int]:
    counts = {p: 0 for p in grid_points(d)}
    for box in boxes:
        for p in _box_points(tuple(box)):
            counts[p] += 1
    return counts


@lru_cache(maxsize=None)
def _factor_values(f: int) -> tuple[int, ...]:
    return tuple(v for v in (0, 1, 2) if (f >> v) & 1)


def _box_points(box: Box):
    return product(*(_factor_values(f) for f in box))


def verify_double_cover(boxes, d: int) -> bool:
    """Every box proper and every point of {0,1,2}^d covered exactly twice."""
    boxes = [tuple(b) for b in boxes]
    if not all(is_proper(b) for b in boxes):
        return False
    return all(c == 2 for c in cover_counts(boxes, d).values())


def score_box_cover(boxes, d: int, over_weight: int = 3,
                    under_weight: int = 1) -> int:
    """-(box count) minus weighted penalties: covering a point more than
    twice costs more than covering it less than twice."""
    boxes = [tuple(b) for b in boxes]
    if not all(is_proper(b) for b in boxes):
        return INVALID_SCORE
    over = under = 0
    for c in cover_counts(boxes, d).values():
        if c > 2:
            over += c - 2
        elif c < 2:
            under += 2 - c
    return -len(boxes) - over_weight * over - under_weight * under


def _random_proper_box_at(point: tuple[int, ...], rng) -> Box:
    """Uniform proper box containing the point: per axis one of the three
    proper nonempty subsets containing that coordinate."""
    box = []
    for c in point:
        others = [v for v in (0, 1, 2) if v != c]
        pick = rng.integers(3)
        if pick == 0:
            box.append(1 << c)
        else:
            box.append((1 << c) | (1 << others[pick - 1]))
    return tuple(box)


def local_search_boxes(boxes, d: int, rng) -> tuple[Box, ...]:
    """Remove boxes at over-covered points, then fill under-covered points
    with random proper boxes that never push a point past two (unit boxes as
    the fallback), yielding an exact double cover."""
    cur = [tuple(b) for b in boxes if is_proper(tuple(b))]
    counts = cover_counts(cur, d)
    while True:
        over = [p for p, c in counts.items() if c > 2]
        if not over:
            break
        p = over[rng.integers(len(over))]
        hitting = [i for i, b in enumerate(cur) if box_contains(b, p)]
        victim = cur.pop(hitting[rng.integers(len(hitting))])
        for q in _box_points(victim):
            counts[q] -= 1
    while True:
        under = [p for p, c in counts.items() if c < 2]
        if not under:
            break
        p = under[rng.integers(len(under))]
        placed = None
        for _ in range(24):
            cand = _random_proper_box_at(p, rng)
            if all(counts[q] < 2 for q in _box_points(cand)):
                placed = cand
                break
        if placed is None:
            placed = tuple(1 << c for c in p)  # unit box only covers p
        cur.append(placed)
        for q in _box_points(placed):
            counts[q] += 1
    return tuple(sorted(cur))
