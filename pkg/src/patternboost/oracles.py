"""Independent brute-force references and fixture verification.

Everything here recomputes structure by direct enumeration, deliberately
sharing no code path with the fast checks in the problem modules; these are
the trust anchors the fast implementations are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

from .fixtures import Fixture, all_fixtures
from .problems import boxes as bx
from .problems import graphs as gr
from .problems import hypercube as hc
from .problems import matrices as mx
from .problems import pointsets as ps
from .problems import setfamilies as sf

ENUM_BOUNDS = {
    "triangle": 7,       # graphs: exhaustive over 2^(n(n-1)/2)
    "c4": 7,
    "isosceles": 4,      # grids: exhaustive over 2^(n^2)
    "cube": 3,           # subgraphs: exhaustive over 2^(edge count)
    "sperner": 4,        # families: exhaustive over 2^(2^n)
    "cross_sperner": 4,  # k=2 only; compatible-set closure per family
    "perm312": 4,
    "sphere": 2,
    "boxes": 2,
}


# ---------------------------------------------------------------------------
# enumeration-style counts (the oracles)


def count_triangles_enum(g: gr.GraphBits) -> int:
    n = g.n
    present = set()
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            if g.bits[idx]:
                present.add((i, j))
            idx += 1
    total = 0
    for a, b, c in combinations(range(n), 3):
        if (a, b) in present and (a, c) in present and (b, c) in present:
            total += 1
    return total


def count_c4_enum(g: gr.GraphBits) -> int:
    n = g.n
    present = set()
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            if g.bits[idx]:
                present.add(frozenset((i, j)))
            idx += 1

    def e(x, y):
        return frozenset((x, y)) in present

    total = 0
    for a, b, c, d in combinations(range(n), 4):
        # the three cyclic orderings of four vertices
        for w, x, y, z in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            if e(w, x) and e(x, y) and e(y, z) and e(z, w):
                total += 1
    return total


def contains_312_enum(m: mx.BinaryMatrix) -> bool:
    ones = [(r, c) for r in range(m.n) for c in range(m.n)
            if m.bits[r * m.n + c]]
    for (r1, c3), (r2, c1), (r3, c2) in product(ones, repeat=3):
        if r1 < r2 < r3 and c1 < c2 < c3:
            return True
    return False


def longest_chain_enum(family) -> int:
    """Longest nested chain by plain recursion over supersets."""
    masks = sorted(set(family))

    def extend(m: int) -> int:
        best = 1
        for t in masks:
            if t != m and (m & t) == m:
                best = max(best, 1 + extend(t))
        return best

    return max((extend(m) for m in masks), default=0)


def is_isosceles_free_enum(points) -> bool:
    pts = list(points)
    for a, b, c in product(pts, repeat=3):
        if a == b or b == c or a == c:
            continue
        da = sum((x - y) ** 2 for x, y in zip(a, b))
        dc = sum((x - y) ** 2 for x, y in zip(c, b))
        if da == dc:
            return False
    return True


def count_cospherical_5tuples(n: int, workers: int = 1,
                              progress: bool = False) -> tuple[int, int]:
    """Exact count of 5-point subsets of [n]^3 with a vanishing sphere
    determinant, plus the total number of 5-subsets.  Enumeration splits by
    the smallest point index; each range is evaluated as one vectorized
    batch, so the ranges can also be farmed out to workers."""
    pts = np.array(
        [(x, y, z, x * x + y * y + z * z)
         for x, y, z in product(range(n), repeat=3)],
        dtype=np.int64,
    )
    m = len(pts)
    total = comb(m, 5)
    args = [(pts, a) for a in range(m - 4)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            zeros = sum(pool.map(_cosphere_range_count, args))
    else:
        zeros = sum(_cosphere_range_count(arg) for arg in args)
    return int(zeros), total


def _cosphere_range_count(args) -> int:
    pts, a = args
    m = len(pts)
    rest = np.array(list(combinations(range(a + 1, m), 4)), dtype=np.int64)
    if len(rest) == 0:
        return 0
    rows = pts[rest] - pts[a]
    return int(np.count_nonzero(ps._det4_batch(rows) == 0))


# ---------------------------------------------------------------------------
# exhaustive optima for tiny instances


def _superset_closure(bad: np.ndarray, nbits: int) -> np.ndarray:
    """bad[S] := any marked subset of S, via the usual subset-sum sweep."""
    for b in range(nbits):
        view = bad.reshape(-1, 2, 1 << b)
        np.logical_or(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
    return bad


def _graph_brute_best(n: int, forbidden_edge_masks) -> int:
    nedges = n * (n - 1) // 2
    bad = np.zeros(1 << nedges, dtype=bool)
    for mask in forbidden_edge_masks:
        bad[mask] = True
    _superset_closure(bad, nedges)
    sizes = np.bitwise_count(np.arange(1 << nedges, dtype=np.uint64))
    return int(sizes[~bad].max())


def _triangle_masks(n: int):
    for a, b, c in combinations(range(n), 3):
        yield (1 << gr.edge_index(n, a, b)) | (1 << gr.edge_index(n, a, c)) \
            | (1 << gr.edge_index(n, b, c))


def _c4_masks(n: int):
    for a, b, c, d in combinations(range(n), 4):
        for w, x, y, z in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            yield (
                (1 << gr.edge_index(n, *sorted((w, x))))
                | (1 << gr.edge_index(n, *sorted((x, y))))
                | (1 << gr.edge_index(n, *sorted((y, z))))
                | (1 << gr.edge_index(n, *sorted((z, w))))
            )


def brute_best(kind: str, size: int, k: int = 2) -> int:
    """Exact optimum of the problem's score over all valid constructions,
    by exhaustive enumeration; refuses sizes past the documented bounds."""
    bound = ENUM_BOUNDS.get(kind)
    if bound is None:
        raise ValueError(f"unknown problem kind {kind!r}")
    if size > bound:
        raise ValueError(
            f"brute_best({kind!r}) is limited to size <= {bound}, got {size}"
        )
    if kind == "triangle":
        return _graph_brute_best(size, _triangle_masks(size))
    if kind == "c4":
        return _graph_brute_best(size, _c4_masks(size))
    if kind == "isosceles":
        return _iso_brute_best(size)
    if kind == "cube":
        return _cube_brute_best(size)
    if kind == "sperner":
        return _sperner_brute_best(size, k)
    if kind == "cross_sperner":
        if k != 2:
            raise ValueError("cross_sperner enumeration supports k=2 only")
        return _cross_brute_best(size)
    if kind == "perm312":
        return _perm312_brute_best(size)
    if kind == "sphere":
        return _sphere_brute_best(size)
    if kind == "boxes":
        return -_boxes_brute_min(size)
    raise AssertionError


def _iso_brute_best(n: int) -> int:
    pts = [(x, y) for x in range(n) for y in range(n)]
    npts = len(pts)
    bad = np.zeros(1 << npts, dtype=bool)
    for b in range(npts):
        groups: dict[int, list[int]] = {}
        for a in range(npts):
            if a == b:
                continue
            d2 = (pts[a][0] - pts[b][0]) ** 2 + (pts[a][1] - pts[b][1]) ** 2
            groups.setdefault(d2, []).append(a)
        for members in groups.values():
            for a, c in combinations(members, 2):
                bad[(1 << a) | (1 << b) | (1 << c)] = True
    _superset_closure(bad, npts)
    sizes = np.bitwise_count(np.arange(1 << npts, dtype=np.uint64))
    return int(sizes[~bad].max())


def _cube_brute_best(d: int) -> int:
    nedges = hc.edge_count(d)
    best = None
    for mask in range(1 << nedges):
        bits = bytes((mask >> i) & 1 for i in range(nedges))
        s = hc.CubeSubgraph(d, bits)
        if hc.cube_diameter_ok(s):
            edges = s.num_edges()
            best = edges if best is None else min(best, edges)
    if best is None:
        raise RuntimeError("no valid subgraph found")
    return -best


def _sperner_brute_best(n: int, k: int) -> int:
    nsets = 1 << n
    best = None
    for fam_mask in range(1, 1 << nsets):
        family = [m for m in range(nsets) if (fam_mask >> m) & 1]
        if sf.is_saturated_k_sperner(family, n, k):
            size = len(family)
            best = size if best is None else min(best, size)
    if best is None:
        raise RuntimeError(f"no saturated {k}-Sperner family on n={n}")
    return -best


def _cross_brute_best(n: int) -> int:
    nsets = 1 << n
    related = []
    for s in range(nsets):
        mask = 0
        for t in range(nsets):
            if (s & t) == s or (s & t) == t:
                mask |= 1 << t
        related.append(mask)
    full = (1 << nsets) - 1
    best = 0
    for fam_mask in range(1, 1 << nsets):
        union_rel = 0
        m = fam_mask
        while m:
            low = m & -m
            union_rel |= related[low.bit_length() - 1]
            m ^= low
        compatible = full & ~union_rel
        best = max(best, fam_mask.bit_count() * compatible.bit_count())
    return best


def _perm312_brute_best(n: int) -> int:
    best = 0
    for mask in range(1 << (n * n)):
        bits = bytes((mask >> i) & 1 for i in range(n * n))
        m = mx.BinaryMatrix(n, bits)
        if not contains_312_enum(m):
            best = max(best, mx.permanent_naive(m))
    return best


def _sphere_brute_best(n: int) -> int:
    pts = list(product(range(n), repeat=3))
    best = 0
    for mask in range(1 << len(pts)):
        chosen = [pts[i] for i in range(len(pts)) if (mask >> i) & 1]
        if len(chosen) <= best:
            continue
        if not ps.has_five_cospherical(chosen):
            best = len(chosen)
    return best


def _boxes_brute_min(d: int) -> int:
    points = bx.grid_points(d)
    all_boxes = [b for b in product(bx.PROPER_FACTORS, repeat=d)]
    covers = [frozenset(bx._box_points(b)) for b in all_boxes]
    best = [2 * len(points)]  # 2 * 3^d unit boxes always work
    counts = {p: 0 for p in points}

    def dfs(start: int, used: int) -> None:
        target = next((p for p in points if counts[p] < 2), None)
        if target is None:
            best[0] = min(best[0], used)
            return
        if used + 1 >= best[0]:
            return
        for i in range(start, len(all_boxes)):
            if target not in covers[i]:
                continue
            if any(counts[q] >= 2 for q in covers[i]):
                continue
            for q in covers[i]:
                counts[q] += 1
            dfs(i, used + 1)  # allow repeats of the same box
            for q in covers[i]:
                counts[q] -= 1

    dfs(0, 0)
    return best[0]


# ---------------------------------------------------------------------------
# fixture verification


@dataclass
class Assertion:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class FixtureReport:
    fixture: str
    assertions: list[Assertion]

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.assertions)

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if a.ok else 'FAIL'} {self.fixture} {a.name}"
            + (f" ({a.detail})" if a.detail and not a.ok else "")
            for a in self.assertions
        ]


def verify_fixture(f: Fixture) -> FixtureReport:
    """Check every claimed metric of a shipped construction; failures name
    the violated invariant."""
    checks: list[Assertion] = []

    def add(name, ok, detail=""):
        checks.append(Assertion(name, bool(ok), detail))

    if f.problem_kind == "cube":
        d, edges = f.payload["d"], f.payload["edges"]
        sub = hc.subgraph_from_edges(d, edges)
        add("edge_count", sub.num_edges() == f.claims["edges"],
            f"{sub.num_edges()} != {f.claims['edges']}")
        diam = hc.diameter(sub)
        add("spanning_connected", diam is not None, "disconnected")
        add("diameter", diam == f.claims["diameter"],
            f"diameter {diam} != {f.claims['diameter']}")
    elif f.problem_kind == "sperner":
        n, k = f.payload["n"], f.payload["k"]
        masks = f.payload["masks"]
        add("size", len(set(masks)) == f.claims["size"],
            f"{len(set(masks))} != {f.claims['size']}")
        add("k_sperner", sf.is_k_sperner(masks, k),
            f"chain of length > {k}")
        add("saturated", sf.is_saturated_k_sperner(masks, n, k),
            "some absent set could still be added")
    elif f.problem_kind == "cross_sperner":
        fams = f.payload["families"]
        add("cross_sperner", sf.is_cross_sperner(fams),
            "subset relation across families")
        prod = 1
        for fam in fams:
            prod *= len(fam)
        add("product", prod == f.claims["product"],
            f"{prod} != {f.claims['product']}")
    elif f.problem_kind == "sphere":
        n, points = f.payload["n"], f.payload["points"]
        add("count", len(set(points)) == f.claims["count"],
            f"{len(set(points))} != {f.claims['count']}")
        if f.claims["grid_checked"]:
            add("grid_bounds",
                all(1 <= c <= n for p in points for c in p),
                "coordinate outside the published grid")
        add("no_five_cospherical", not ps.has_five_cospherical(points),
            "five points on a common sphere or plane")
    elif f.problem_kind == "boxes":
        d, boxes = f.payload["d"], f.payload["boxes"]
        add("count", len(boxes) == f.claims["count"],
            f"{len(boxes)} != {f.claims['count']}")
        add("all_proper", all(bx.is_proper(b) for b in boxes),
            "some factor equals {0,1,2}")
        add("double_cover", bx.verify_double_cover(boxes, d),
            "some point not covered exactly twice")
    else:
        add("known_kind", False, f"no verifier for {f.problem_kind!r}")
    return FixtureReport(f.name, checks)


def verify_all() -> list[FixtureReport]:
    return [verify_fixture(f) for f in all_fixtures()]
