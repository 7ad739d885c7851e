"""Spanning subgraphs of the d-cube with diameter d, minimizing edges.

Vertices are the integers 0..2^d-1; edges join vertices at Hamming distance
one.  A subgraph is one bit per cube edge, indexed by enumerating pairs
(vertex, flipped coordinate) with the vertex below its neighbour.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


@lru_cache(maxsize=None)
def edge_table(d: int) -> tuple[tuple[int, int], ...]:
    """Edge idx -> (v, v ^ (1 << i)) with bit i of v clear, enumerated by
    (v ascending, i ascending).  Bijective onto the cube's edge set."""
    edges = []
    for v in range(1 << d):
        for i in range(d):
            if not (v >> i) & 1:
                edges.append((v, v | (1 << i)))
    return tuple(edges)


def edge_count(d: int) -> int:
    return d * (1 << (d - 1))


@dataclass(frozen=True)
class CubeSubgraph:
    d: int
    edge_bits: bytes

    def __post_init__(self):
        if len(self.edge_bits) != edge_count(self.d):
            raise ValueError(
                f"expected {edge_count(self.d)} edge bits for d={self.d}"
            )
        if any(b not in (0, 1) for b in self.edge_bits):
            raise ValueError("edge bits must be 0/1")

    def edges(self) -> list[tuple[int, int]]:
        table = edge_table(self.d)
        return [table[i] for i, b in enumerate(self.edge_bits) if b]

    def num_edges(self) -> int:
        return sum(self.edge_bits)


def subgraph_from_edges(d: int, edges) -> CubeSubgraph:
    table = edge_table(d)
    lookup = {e: i for i, e in enumerate(table)}
    bits = bytearray(len(table))
    for u, v in edges:
        if u > v:
            u, v = v, u
        if not 0 <= u < v < (1 << d) or (u ^ v).bit_count() != 1:
            raise ValueError(f"({u}, {v}) is not a cube edge")
        bits[lookup[(u, v)]] = 1
    return CubeSubgraph(d, bytes(bits))


def _adjacency(s: CubeSubgraph) -> list[int]:
    nverts = 1 << s.d
    adj = [0] * nverts
    for u, v in s.edges():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _ecc_within(adj: list[int], source: int, limit: int) -> int | None:
    """Eccentricity of source if every vertex is reached within `limit` BFS
    levels, else None (unreached vertices or eccentricity > limit)."""
    nverts = len(adj)
    full = (1 << nverts) - 1
    visited = 1 << source
    frontier = visited
    level = 0
    while visited != full:
        nxt = 0
        m = frontier
        while m:
            low = m & -m
            nxt |= adj[low.bit_length() - 1]
            m ^= low
        nxt &= ~visited
        if not nxt:
            return None
        level += 1
        if level > limit:
            return None
        visited |= nxt
        frontier = nxt
    return level


def cube_diameter_ok(s: CubeSubgraph) -> bool:
    """True iff the subgraph is spanning (connected on all 2^d vertices) and
    has diameter exactly d.  Spanning subgraphs of the cube always have
    diameter >= d (antipodal pairs), so bounding every eccentricity by d is
    an exact check."""
    adj = _adjacency(s)
    return all(_ecc_within(adj, v, s.d) is not None for v in range(len(adj)))


def diameter(s: CubeSubgraph) -> int | None:
    """Exact diameter, or None if disconnected."""
    adj = _adjacency(s)
    worst = 0
    for v in range(len(adj)):
        ecc = _ecc_within(adj, v, len(adj))
        if ecc is None:
            return None
        worst = max(worst, ecc)
    return worst


def score_cube(s: CubeSubgraph) -> int:
    """Negated edge count, so all problems maximize; valid subgraphs only."""
    if not cube_diameter_ok(s):
        raise ValueError("subgraph is not spanning with diameter d")
    return -s.num_edges()


def local_search_cube(s: CubeSubgraph, rng) -> CubeSubgraph:
    """Add random cube edges until spanning with diameter d, then remove
    random edges for as long as validity is preserved."""
    d = s.d
    table = edge_table(d)
    bits = bytearray(s.edge_bits)
    if not cube_diameter_ok(CubeSubgraph(d, bytes(bits))):
        for t in rng.permutation(len(table)):
            if not bits[t]:
                bits[t] = 1
                if cube_diameter_ok(CubeSubgraph(d, bytes(bits))):
                    break
    for t in rng.permutation(len(table)):
        if bits[t]:
            bits[t] = 0
            if not cube_diameter_ok(CubeSubgraph(d, bytes(bits))):
                bits[t] = 1
    return CubeSubgraph(d, bytes(bits))
