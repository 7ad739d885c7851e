"""Problem-agnostic construction, scoring and pool machinery.

A construction is a candidate solution in canonical form: a fixed-length
sequence of small non-negative integers (bits for graphs and matrices,
occupancy indicators for point sets and set families).  The pool is the
training database: the top-K scored constructions found so far, deduplicated
by payload.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Iterator

SCORE_LIMIT = 1 << 63  # scores are stored as signed 64-bit integers


class ShapeError(ValueError):
    """Payload length or alphabet does not match the problem's declared shape."""


class ScoreOverflowError(OverflowError):
    """Score does not fit in a signed 64-bit integer (never silently clamped)."""


@dataclass(frozen=True)
class Construction:
    """Canonical candidate solution: raw payload bytes plus a problem tag.

    Two constructions with identical payloads compare equal; no isomorphism
    reduction is performed.
    """

    problem_id: str
    payload: bytes

    def __len__(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class ScoredConstruction:
    score: int
    construction: Construction

    def __post_init__(self) -> None:
        if not -SCORE_LIMIT < self.score < SCORE_LIMIT:
            raise ScoreOverflowError(
                f"score {self.score} exceeds 63 bits and cannot be stored"
            )


def _rank_key(score: int, payload: bytes) -> tuple:
    """Total order used by the pool: higher score first, ties broken by
    lexicographically smaller payload.

    Returned keys compare so that *larger* key = better entry.  Negating the
    payload bytes elementwise reverses the lexicographic order, which is what
    makes a min-heap over these keys expose the eviction candidate at the top.
    """
    return (score, tuple(-b for b in payload))


class Pool:
    """Deduplicated top-K collection of scored constructions.

    Insertion beyond capacity evicts the worst entry (minimum score,
    lexicographically largest payload among ties), so the best score never
    decreases.  Mutation is single-writer; iteration yields entries best
    first.
    """

    def __init__(self, problem_id: str, payload_len: int, capacity: int):
        if capacity <= 0:
            raise ValueError("pool capacity must be positive")
        self.problem_id = problem_id
        self.payload_len = payload_len
        self.capacity = capacity
        self._scores: dict[bytes, int] = {}
        self._heap: list[tuple] = []  # (rank_key, payload); worst entry on top

    def __len__(self) -> int:
        return len(self._scores)

    def __contains__(self, payload: bytes) -> bool:
        return payload in self._scores

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pool):
            return NotImplemented
        return (
            self.problem_id == other.problem_id
            and self.payload_len == other.payload_len
            and self.capacity == other.capacity
            and self._scores == other._scores
        )

    def insert(self, sc: ScoredConstruction) -> bool:
        """Insert a scored construction; returns True iff the pool changed."""
        c = sc.construction
        if c.problem_id != self.problem_id:
            raise ShapeError(
                f"construction for problem {c.problem_id!r} inserted into "
                f"{self.problem_id!r} pool"
            )
        if len(c.payload) != self.payload_len:
            raise ShapeError(
                f"payload length {len(c.payload)} != pool payload length "
                f"{self.payload_len}"
            )
        if c.payload in self._scores:
            return False
        key = _rank_key(sc.score, c.payload)
        if len(self._scores) < self.capacity:
            self._scores[c.payload] = sc.score
            heapq.heappush(self._heap, (key, c.payload))
            return True
        worst_key, worst_payload = self._heap[0]
        if key <= worst_key:
            return False
        heapq.heapreplace(self._heap, (key, c.payload))
        del self._scores[worst_payload]
        self._scores[c.payload] = sc.score
        return True

    def entries(self) -> list[ScoredConstruction]:
        """All entries, best first (score descending, payload ascending)."""
        items = sorted(self._scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return [
            ScoredConstruction(score, Construction(self.problem_id, payload))
            for payload, score in items
        ]

    def __iter__(self) -> Iterator[ScoredConstruction]:
        return iter(self.entries())

    def best_score(self) -> int:
        if not self._scores:
            raise ValueError("empty pool has no best score")
        return max(self._scores.values())

    def min_score(self) -> int:
        if not self._scores:
            raise ValueError("empty pool has no min score")
        return min(self._scores.values())

    def mean_score(self) -> float:
        if not self._scores:
            raise ValueError("empty pool has no mean score")
        return sum(self._scores.values()) / len(self._scores)

    def payloads(self) -> list[bytes]:
        return [sc.construction.payload for sc in self.entries()]


def pool_insert(pool: Pool, sc: ScoredConstruction) -> Pool:
    """Functional-style wrapper over Pool.insert (mutates and returns pool)."""
    pool.insert(sc)
    return pool


_HEADER_PREFIX = "patternboost-pool v1"


def _payload_to_digits(payload: bytes, width: int) -> str:
    if width == 1:
        return "".join(str(b) for b in payload)
    return "".join(str(b).zfill(width) for b in payload)


def _digit_width(payload_values: Iterable[int]) -> int:
    top = max(payload_values, default=0)
    return max(1, len(str(top)))


def pool_save(pool: Pool, path) -> None:
    """Write the pool as UTF-8 text: a header line followed by one
    ``<score>\\t<payload digits>`` line per entry, best first.

    Payload elements are written as contiguous digits; alphabets past 9 use a
    fixed per-element digit width recorded in the header so the encoding
    stays reversible.
    """
    width = _digit_width(b for p in pool.payloads() for b in p)
    lines = [f"{_HEADER_PREFIX} {pool.problem_id} {pool.payload_len} "
             f"{pool.capacity} {width}"]
    for sc in pool.entries():
        digits = _payload_to_digits(sc.construction.payload, width)
        lines.append(f"{sc.score}\t{digits}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def pool_load(path) -> Pool:
    """Inverse of pool_save; malformed lines fail with their line number."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise ValueError(f"{path}: line 1: missing pool header")
    fields = lines[0][len(_HEADER_PREFIX):].split()
    if len(fields) != 4:
        raise ValueError(f"{path}: line 1: malformed pool header")
    problem_id = fields[0]
    try:
        payload_len, capacity, width = (int(f) for f in fields[1:])
    except ValueError:
        raise ValueError(f"{path}: line 1: malformed pool header") from None
    pool = Pool(problem_id, payload_len, capacity)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        score_str, sep, digits = line.partition("\t")
        if not sep:
            raise ValueError(f"{path}: line {lineno}: missing tab separator")
        try:
            score = int(score_str)
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: bad score") from None
        if len(digits) != payload_len * width or not digits.isdigit():
            raise ValueError(
                f"{path}: line {lineno}: payload has wrong length or "
                f"non-digit characters"
            )
        payload = bytes(
            int(digits[i * width:(i + 1) * width]) for i in range(payload_len)
        )
        pool.insert(ScoredConstruction(score, Construction(problem_id, payload)))
    return pool
