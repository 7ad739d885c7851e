"""Triangle-free and 4-cycle-free edge maximization.

Graphs on n vertices are stored as the n(n-1)/2 bits of the strict upper
triangle of the adjacency matrix, row-major: bit (i, j) with i < j sits at
position i*n - i*(i+1)/2 + (j-i-1).  Working form is one adjacency bitmask
per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class GraphBits:
    n: int
    bits: bytes

    def __post_init__(self):
        if len(self.bits) != self.n * (self.n - 1) // 2:
            raise ValueError(
                f"expected {self.n * (self.n - 1) // 2} bits for n={self.n}, "
                f"got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("graph bits must be 0/1")

    def edge_count(self) -> int:
        return sum(self.bits)


def edge_index(n: int, i: int, j: int) -> int:
    """Position of edge (i, j), i < j, in the flattened upper triangle."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got ({i}, {j}) for n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@lru_cache(maxsize=None)
def _vertex_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


def index_edge(n: int, idx: int) -> tuple[int, int]:
    return _vertex_pairs(n)[idx]


def graph_from_edges(n: int, edges) -> GraphBits:
    bits = bytearray(n * (n - 1) // 2)
    for i, j in edges:
        if i > j:
            i, j = j, i
        bits[edge_index(n, i, j)] = 1
    return GraphBits(n, bytes(bits))


def _adjacency(g: GraphBits) -> list[int]:
    n = g.n
    adj = [0] * n
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            if g.bits[idx]:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            idx += 1
    return adj


def _to_bits(n: int, adj: list[int]) -> bytes:
    bits = bytearray(n * (n - 1) // 2)
    idx = 0
    for i in range(n):
        row = adj[i]
        for j in range(i + 1, n):
            if (row >> j) & 1:
                bits[idx] = 1
            idx += 1
    return bytes(bits)


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def triangle_count(g: GraphBits) -> int:
    """Number of vertex triples with all three edges present."""
    adj = _adjacency(g)
    total = 0
    for i, j in _edges_of(adj):
        total += (adj[i] & adj[j]).bit_count()
    return total // 3


def c4_count(g: GraphBits) -> int:
    """Number of 4-cycles; each cycle has two diagonal vertex pairs, so the
    paired-common-neighbour sum counts every cycle twice."""
    adj = _adjacency(g)
    n = g.n
    total = 0
    for u in range(n):
        for w in range(u + 1, n):
            k = (adj[u] & adj[w]).bit_count()
            total += k * (k - 1) // 2
    return total // 2


def score_triangle(g: GraphBits) -> int:
    return g.edge_count() - 2 * triangle_count(g)


def score_c4(g: GraphBits) -> int:
    return g.edge_count() - 2 * c4_count(g)


def _edges_of(adj: list[int]) -> list[tuple[int, int]]:
    edges = []
    for i, row in enumerate(adj):
        for j in _iter_bits(row >> (i + 1)):
            edges.append((i, j + i + 1))
    return edges


def _fill_triangle_free(adj: list[int], n: int, rng) -> None:
    """Add edges in a uniformly random order wherever the endpoints have no
    common neighbour.  A single shuffled pass is exact: once an edge is
    inadmissible it stays inadmissible, so sampling without replacement
    matches repeatedly drawing uniformly among admissible edges."""
    pairs = _vertex_pairs(n)
    for t in rng.permutation(len(pairs)):
        i, j = pairs[t]
        if not (adj[i] >> j) & 1 and not adj[i] & adj[j]:
            adj[i] |= 1 << j
            adj[j] |= 1 << i


def local_search_triangle(g: GraphBits, rng) -> GraphBits:
    """Delete a random edge lying in the maximum number of triangles until
    triangle-free, then add random admissible edges until maximal."""
    n = g.n
    adj = _adjacency(g)
    while True:
        edges = _edges_of(adj)
        counts = [(adj[i] & adj[j]).bit_count() for i, j in edges]
        top = max(counts, default=0)
        if top == 0:
            break
        worst = [e for e, c in zip(edges, counts) if c == top]
        i, j = worst[rng.integers(len(worst))]
        adj[i] &= ~(1 << j)
        adj[j] &= ~(1 << i)
    _fill_triangle_free(adj, n, rng)
    return GraphBits(n, _to_bits(n, adj))


def _c4_through_edge(adj: list[int], u: int, v: int) -> int:
    # cycles u-v-x-y-u: x in N(v)\{u}, y in N(x) & N(u), y != v
    not_v = ~(1 << v)
    nu = adj[u] & not_v
    total = 0
    for x in _iter_bits(adj[v] & ~(1 << u)):
        total += (adj[x] & nu).bit_count()
    return total


def _creates_c4(adj: list[int], u: int, v: int) -> bool:
    nu = adj[u] & ~(1 << v)
    for x in _iter_bits(adj[v] & ~(1 << u)):
        if adj[x] & nu:
            return True
    return False


def local_search_c4(g: GraphBits, rng) -> GraphBits:
    """Same down-up shape as the triangle search, with 4-cycles as the
    forbidden pattern (triangles are allowed)."""
    n = g.n
    adj = _adjacency(g)
    while True:
        edges = _edges_of(adj)
        counts = [_c4_through_edge(adj, i, j) for i, j in edges]
        top = max(counts, default=0)
        if top == 0:
            break
        worst = [e for e, c in zip(edges, counts) if c == top]
        i, j = worst[rng.integers(len(worst))]
        adj[i] &= ~(1 << j)
        adj[j] &= ~(1 << i)
    pairs = _vertex_pairs(n)
    for t in rng.permutation(len(pairs)):
        i, j = pairs[t]
        if not (adj[i] >> j) & 1 and not _creates_c4(adj, i, j):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return GraphBits(n, _to_bits(n, adj))


def is_triangle_free(g: GraphBits) -> bool:
    return triangle_count(g) == 0


def is_c4_free(g: GraphBits) -> bool:
    return c4_count(g) == 0


def is_maximal_triangle_free(g: GraphBits) -> bool:
    adj = _adjacency(g)
    if any((adj[i] & adj[j]).bit_count() for i, j in _edges_of(adj)):
        return False
    for i, j in _vertex_pairs(g.n):
        if not (adj[i] >> j) & 1 and not adj[i] & adj[j]:
            return False
    return True


def is_maximal_c4_free(g: GraphBits) -> bool:
    if not is_c4_free(g):
        return False
    adj = _adjacency(g)
    for i, j in _vertex_pairs(g.n):
        if not (adj[i] >> j) & 1 and not _creates_c4(adj, i, j):
            return False
    return True
