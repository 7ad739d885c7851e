"""Point sets in square and cubic grids with exact integer geometry.

Two problems live here: choosing points in [n]^2 with no (possibly flat)
isosceles triangle, and choosing points in [n]^3 with no five points on a
common sphere or plane.  All distance and sphere tests are exact integer
arithmetic; no floating point anywhere.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product

import numpy as np

Point2 = tuple[int, int]
Point3 = tuple[int, int, int]


# ---------------------------------------------------------------------------
# isosceles-free point sets in [n]^2


def _sqdist(a, b) -> int:
    return sum((x - y) * (x - y) for x, y in zip(a, b))


def is_isosceles_free(points) -> bool:
    """No ordered triple of distinct points a, b, c with d(b,a) = d(b,c);
    collinear three-term progressions count (flat triangles)."""
    pts = list(points)
    for b in pts:
        seen = set()
        for a in pts:
            if a == b:
                continue
            d2 = _sqdist(a, b)
            if d2 in seen:
                return False
            seen.add(d2)
    return True


def _iso_violations(pts: list[Point2]) -> dict[Point2, int]:
    """Per-point count of isosceles triples it participates in."""
    counts = {p: 0 for p in pts}
    for b in pts:
        groups: dict[int, list[Point2]] = {}
        for a in pts:
            if a != b:
                groups.setdefault(_sqdist(a, b), []).append(a)
        for members in groups.values():
            if len(members) < 2:
                continue
            for a, c in combinations(members, 2):
                counts[a] += 1
                counts[b] += 1
                counts[c] += 1
    return counts


def local_search_iso(points, n: int, rng) -> frozenset[Point2]:
    """Greedily remove the most-violating point until isosceles-free, then
    add random admissible grid points until maximal."""
    pts = sorted(set(points))
    while True:
        counts = _iso_violations(pts)
        top = max(counts.values(), default=0)
        if top == 0:
            break
        worst = [p for p, c in counts.items() if c == top]
        pts.remove(worst[rng.integers(len(worst))])
    members = set(pts)
    # squared distances within the current set, keyed by centre point
    dists: dict[Point2, set[int]] = {
        b: {_sqdist(a, b) for a in members if a != b} for b in members
    }
    grid = [(x, y) for x in range(n) for y in range(n)]
    for t in rng.permutation(len(grid)):
        p = grid[t]
        if p in members:
            continue
        to_p = [_sqdist(p, s) for s in members]
        if len(set(to_p)) != len(to_p):
            continue  # p would be the peak of an isosceles triple
        ok = True
        for s in members:
            if _sqdist(p, s) in dists[s]:
                ok = False  # s becomes a peak
                break
        if not ok:
            continue
        for s in members:
            dists[s].add(_sqdist(p, s))
        dists[p] = set(to_p)
        members.add(p)
    return frozenset(members)


def is_maximal_isosceles_free(points, n: int) -> bool:
    members = set(points)
    if not is_isosceles_free(members):
        return False
    for p in product(range(n), repeat=2):
        if p in members:
            continue
        if is_isosceles_free(members | {p}):
            return False
    return True


# ---------------------------------------------------------------------------
# no five points on a common sphere or plane in [n]^3


def cosphere_det(xi, xj, xk, xl, xm) -> int:
    """Exact 5x5 determinant with rows (x, y, z, x^2+y^2+z^2, 1); zero iff
    the five points are cospherical or coplanar.

    The all-ones column is eliminated by subtracting the first row from the
    others, leaving a 4x4 integer determinant.
    """
    rows = []
    base = _lift(xi)
    for p in (xj, xk, xl, xm):
        lifted = _lift(p)
        rows.append([lifted[c] - base[c] for c in range(4)])
    return _det4(rows)


def _lift(p) -> tuple[int, int, int, int]:
    x, y, z = p
    return (x, y, z, x * x + y * y + z * z)


def _det2(a, b, c, d) -> int:
    return a * d - b * c


def _det4(r) -> int:
    """4x4 integer determinant by Laplace expansion along the first two rows."""
    m01 = _det2(r[0][0], r[0][1], r[1][0], r[1][1])
    m02 = _det2(r[0][0], r[0][2], r[1][0], r[1][2])
    m03 = _det2(r[0][0], r[0][3], r[1][0], r[1][3])
    m12 = _det2(r[0][1], r[0][2], r[1][1], r[1][2])
    m13 = _det2(r[0][1], r[0][3], r[1][1], r[1][3])
    m23 = _det2(r[0][2], r[0][3], r[1][2], r[1][3])
    n01 = _det2(r[2][0], r[2][1], r[3][0], r[3][1])
    n02 = _det2(r[2][0], r[2][2], r[3][0], r[3][2])
    n03 = _det2(r[2][0], r[2][3], r[3][0], r[3][3])
    n12 = _det2(r[2][1], r[2][2], r[3][1], r[3][2])
    n13 = _det2(r[2][1], r[2][3], r[3][1], r[3][3])
    n23 = _det2(r[2][2], r[2][3], r[3][2], r[3][3])
    return m01 * n23 - m02 * n13 + m03 * n12 + m12 * n03 - m13 * n02 + m23 * n01


@lru_cache(maxsize=64)
def _combo4(m: int) -> np.ndarray:
    return np.array(list(combinations(range(m), 4)), dtype=np.int64)


def _det4_batch(rows: np.ndarray) -> np.ndarray:
    """Determinants of a batch of 4x4 int64 matrices, shape (N, 4, 4)."""
    a, b = rows[:, 0, :], rows[:, 1, :]
    c, d = rows[:, 2, :], rows[:, 3, :]

    def d2(u, v, i, j):
        return u[:, i] * v[:, j] - u[:, j] * v[:, i]

    return (
        d2(a, b, 0, 1) * d2(c, d, 2, 3)
        - d2(a, b, 0, 2) * d2(c, d, 1, 3)
        + d2(a, b, 0, 3) * d2(c, d, 1, 2)
        + d2(a, b, 1, 2) * d2(c, d, 0, 3)
        - d2(a, b, 1, 3) * d2(c, d, 0, 2)
        + d2(a, b, 2, 3) * d2(c, d, 0, 1)
    )


def _addable_sphere(lifted: np.ndarray, p: Point3) -> bool:
    """Can p join the lifted set without five points on a sphere/plane?"""
    m = len(lifted)
    if m < 4:
        return True
    rows = lifted[_combo4(m)] - np.array(_lift(p), dtype=np.int64)
    return bool(np.all(_det4_batch(rows) != 0))


def has_five_cospherical(points) -> bool:
    pts = sorted(set(points))
    if len(pts) < 5:
        return False
    lifted = np.array([_lift(p) for p in pts], dtype=np.int64)
    for idx in range(4, len(pts)):
        head = lifted[:idx]
        rows = head[_combo4(idx)] - lifted[idx]
        if np.any(_det4_batch(rows) == 0):
            return True
    return False


def local_search_sphere(seed, n: int, rng) -> frozenset[Point3]:
    """Attempt the seed points in order (duplicates and sphere violations
    skipped), then sweep the remaining grid points in random order until no
    point can be added."""
    members: list[Point3] = []
    member_set: set[Point3] = set()
    lifted = np.zeros((0, 4), dtype=np.int64)

    def try_add(p: Point3) -> None:
        nonlocal lifted
        if p in member_set:
            return
        if not _addable_sphere(lifted, p):
            return
        members.append(p)
        member_set.add(p)
        lifted = np.vstack([lifted, np.array([_lift(p)], dtype=np.int64)])

    for p in seed:
        if not all(0 <= c < n for c in p):
            continue
        try_add(tuple(p))
    grid = [p for p in product(range(n), repeat=3)]
    for t in rng.permutation(len(grid)):
        try_add(grid[t])
    return frozenset(member_set)


def is_maximal_sphere_free(points, n: int) -> bool:
    pts = set(points)
    if has_five_cospherical(pts):
        return False
    lifted = np.array([_lift(p) for p in sorted(pts)], dtype=np.int64)
    for p in product(range(n), repeat=3):
        if p not in pts and _addable_sphere(lifted, p):
            return False
    return True


def cube_symmetries(points, n: int) -> list[frozenset[Point3]]:
    """The 48 images of a point set under coordinate permutations composed
    with per-axis reflections x -> n-1-x.  Images may coincide when the set
    has symmetries; all images score equal."""
    images = []
    for perm in permutations(range(3)):
        for flips in product((False, True), repeat=3):
            img = set()
            for p in points:
                q = [p[perm[0]], p[perm[1]], p[perm[2]]]
                q = [n - 1 - c if f else c for c, f in zip(q, flips)]
                img.add(tuple(q))
            images.append(frozenset(img))
    return images
