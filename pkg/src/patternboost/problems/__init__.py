"""Problem registry: score function, validity predicate, down-up local
search and payload conversions for each supported problem.

Payloads are canonical byte sequences (see each class); seeds are whatever
the problem's local search consumes, which is the payload itself for the
bit-vector problems and an ordered point list for the sphere problem.
"""

from __future__ import annotations

from .. import tokenizer as tk
from . import boxes as bx
from . import graphs as gr
from . import hypercube as hc
from . import matrices as mx
from . import pointsets as ps
from . import setfamilies as sf


class Problem:
    """Common surface shared by all problems; subclasses fill in the
    problem-specific pieces."""

    kind: str
    problem_id: str
    payload_len: int
    payload_alphabet: int  # payload entries lie in range(payload_alphabet)
    text_alphabet: tuple[str, ...]
    default_selection_fraction = 0.25
    default_codec = "bpe"

    def empty_seed(self):
        raise NotImplementedError

    def local_search(self, seed, rng) -> bytes:
        raise NotImplementedError

    def score(self, payload: bytes) -> int:
        raise NotImplementedError

    def is_valid(self, payload: bytes) -> bool:
        raise NotImplementedError

    def payload_to_seed(self, payload: bytes):
        return payload

    def to_text(self, payload: bytes) -> str:
        return "".join(map(str, payload))

    def from_text(self, text: str):
        """Text -> seed; raises tokenizer.DecodeError on bad structure."""
        if len(text) != self.payload_len:
            raise tk.DecodeError(
                f"expected {self.payload_len} symbols, got {len(text)}"
            )
        alphabet = {str(v) for v in range(self.payload_alphabet)}
        if not set(text) <= alphabet:
            raise tk.DecodeError("symbols outside the payload alphabet")
        return self.payload_to_seed(bytes(int(ch) for ch in text))

    def augment(self, payload: bytes) -> list[bytes]:
        return [payload]

    def random_payload(self, rng) -> bytes:
        """Uniform payload; the seed source for the global-only ablation."""
        return bytes(
            int(v) for v in rng.integers(self.payload_alphabet,
                                         size=self.payload_len)
        )

    def char_len(self) -> int:
        """Length of to_text output, for sizing token sequences."""
        return self.payload_len


class _GraphProblem(Problem):
    payload_alphabet = 2

    def __init__(self, n: int, delimiters: bool = True):
        self.n = n
        self.delimiters = delimiters
        self.payload_len = n * (n - 1) // 2
        self.problem_id = f"{self.kind}-{n}"
        self.text_alphabet = ("0", "1", ",") if delimiters else ("0", "1")

    def empty_seed(self) -> bytes:
        return bytes(self.payload_len)

    def to_text(self, payload: bytes) -> str:
        return tk.flatten_graph(gr.GraphBits(self.n, payload), self.delimiters)

    def from_text(self, text: str) -> bytes:
        return tk.unflatten_graph(text, self.n, self.delimiters)

    def char_len(self) -> int:
        return self.payload_len + (self.n - 1 if self.delimiters else 0)


class TriangleProblem(_GraphProblem):
    kind = "triangle"

    def local_search(self, seed: bytes, rng) -> bytes:
        return gr.local_search_triangle(gr.GraphBits(self.n, seed), rng).bits

    def score(self, payload: bytes) -> int:
        return gr.score_triangle(gr.GraphBits(self.n, payload))

    def is_valid(self, payload: bytes) -> bool:
        return gr.is_triangle_free(gr.GraphBits(self.n, payload))


class C4Problem(_GraphProblem):
    kind = "c4"
    default_selection_fraction = 0.10

    def local_search(self, seed: bytes, rng) -> bytes:
        return gr.local_search_c4(gr.GraphBits(self.n, seed), rng).bits

    def score(self, payload: bytes) -> int:
        return gr.score_c4(gr.GraphBits(self.n, payload))

    def is_valid(self, payload: bytes) -> bool:
        return gr.is_c4_free(gr.GraphBits(self.n, payload))


class Perm312Problem(Problem):
    kind = "perm312"
    payload_alphabet = 2
    text_alphabet = ("0", "1")
    default_codec = "fixed"

    def __init__(self, n: int):
        self.n = n
        self.payload_len = n * n
        self.problem_id = f"perm312-{n}"

    def empty_seed(self) -> bytes:
        return bytes(self.payload_len)

    def local_search(self, seed: bytes, rng) -> bytes:
        return mx.local_search_312(mx.BinaryMatrix(self.n, seed), rng).bits

    def score(self, payload: bytes) -> int:
        return mx.permanent(mx.BinaryMatrix(self.n, payload))

    def is_valid(self, payload: bytes) -> bool:
        return not mx.contains_312(mx.BinaryMatrix(self.n, payload))


class CubeProblem(Problem):
    kind = "cube"
    payload_alphabet = 2
    text_alphabet = ("0", "1")
    default_codec = "fixed"

    def __init__(self, d: int):
        self.d = d
        self.payload_len = hc.edge_count(d)
        self.problem_id = f"cube-{d}"

    def empty_seed(self) -> bytes:
        return bytes(self.payload_len)

    def local_search(self, seed: bytes, rng) -> bytes:
        return hc.local_search_cube(hc.CubeSubgraph(self.d, seed), rng).edge_bits

    def score(self, payload: bytes) -> int:
        return hc.score_cube(hc.CubeSubgraph(self.d, payload))

    def is_valid(self, payload: bytes) -> bool:
        return hc.cube_diameter_ok(hc.CubeSubgraph(self.d, payload))


class IsoscelesProblem(Problem):
    kind = "isosceles"
    payload_alphabet = 2
    text_alphabet = ("0", "1")

    def __init__(self, n: int):
        self.n = n
        self.payload_len = n * n
        self.problem_id = f"isosceles-{n}"

    def _points(self, payload: bytes) -> list[tuple[int, int]]:
        n = self.n
        return [divmod(i, n) for i, b in enumerate(payload) if b]

    def _payload(self, points) -> bytes:
        bits = bytearray(self.payload_len)
        for x, y in points:
            bits[x * self.n + y] = 1
        return bytes(bits)

    def empty_seed(self) -> list[tuple[int, int]]:
        return []

    def payload_to_seed(self, payload: bytes):
        return self._points(payload)

    def local_search(self, seed, rng) -> bytes:
        return self._payload(ps.local_search_iso(seed, self.n, rng))

    def score(self, payload: bytes) -> int:
        pts = self._points(payload)
        if not ps.is_isosceles_free(pts):
            raise ValueError("point set contains an isosceles triple")
        return len(pts)

    def is_valid(self, payload: bytes) -> bool:
        return ps.is_isosceles_free(self._points(payload))


class SphereProblem(Problem):
    kind = "sphere"
    payload_alphabet = 2
    text_alphabet = ("0", "1")
    default_codec = "point"
    default_selection_fraction = 0.10

    def __init__(self, n: int, augment_symmetries: bool = True):
        self.n = n
        self.augment_symmetries = augment_symmetries
        self.payload_len = n ** 3
        self.problem_id = f"sphere-{n}"

    def _points(self, payload: bytes) -> list[tuple[int, int, int]]:
        return [tk.point_decode(i, self.n) for i, b in enumerate(payload) if b]

    def _payload(self, points) -> bytes:
        bits = bytearray(self.payload_len)
        for p in points:
            bits[tk.point_encode(p, self.n)] = 1
        return bytes(bits)

    def empty_seed(self) -> list[tuple[int, int, int]]:
        return []

    def payload_to_seed(self, payload: bytes):
        return self._points(payload)

    def local_search(self, seed, rng) -> bytes:
        return self._payload(ps.local_search_sphere(seed, self.n, rng))

    def score(self, payload: bytes) -> int:
        pts = self._points(payload)
        if ps.has_five_cospherical(pts):
            raise ValueError("five points lie on a common sphere or plane")
        return len(pts)

    def is_valid(self, payload: bytes) -> bool:
        return not ps.has_five_cospherical(self._points(payload))

    def augment(self, payload: bytes) -> list[bytes]:
        if not self.augment_symmetries:
            return [payload]
        images = ps.cube_symmetries(self._points(payload), self.n)
        return [self._payload(img) for img in images]


class SpernerProblem(Problem):
    kind = "sperner"
    payload_alphabet = 2
    text_alphabet = ("0", "1")

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.payload_len = 1 << n
        self.problem_id = f"sperner-{n}-{k}"

    def _family(self, payload: bytes) -> set[int]:
        return {i for i, b in enumerate(payload) if b}

    def _payload(self, family) -> bytes:
        bits = bytearray(self.payload_len)
        for m in family:
            bits[m] = 1
        return bytes(bits)

    def empty_seed(self) -> set[int]:
        return set()

    def payload_to_seed(self, payload: bytes):
        return self._family(payload)

    def local_search(self, seed, rng) -> bytes:
        return self._payload(sf.local_search_sperner(seed, self.n, self.k, rng))

    def score(self, payload: bytes) -> int:
        return sf.score_sperner(self._family(payload), self.n, self.k)

    def is_valid(self, payload: bytes) -> bool:
        return sf.is_saturated_k_sperner(self._family(payload), self.n, self.k)


class CrossSpernerProblem(Problem):
    kind = "cross_sperner"
    payload_alphabet = 2
    text_alphabet = ("0", "1")

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.payload_len = k << n
        self.problem_id = f"cross_sperner-{n}-{k}"

    def _families(self, payload: bytes) -> tuple[set[int], ...]:
        block = 1 << self.n
        return tuple(
            {m for m in range(block) if payload[j * block + m]}
            for j in range(self.k)
        )

    def _payload(self, families) -> bytes:
        block = 1 << self.n
        bits = bytearray(self.payload_len)
        for j, fam in enumerate(families):
            for m in fam:
                bits[j * block + m] = 1
        return bytes(bits)

    def empty_seed(self):
        return tuple(set() for _ in range(self.k))

    def payload_to_seed(self, payload: bytes):
        return self._families(payload)

    def local_search(self, seed, rng) -> bytes:
        return self._payload(sf.local_search_cross(seed, self.n, rng))

    def score(self, payload: bytes) -> int:
        return sf.score_cross_sperner(self._families(payload))

    def is_valid(self, payload: bytes) -> bool:
        return sf.is_cross_sperner(self._families(payload))


class BoxesProblem(Problem):
    kind = "boxes"
    payload_alphabet = 3
    text_alphabet = ("0", "1", "2")

    def __init__(self, d: int, over_weight: int = 3, under_weight: int = 1):
        self.d = d
        self.over_weight = over_weight
        self.under_weight = under_weight
        self.payload_len = 6 ** d
        self.problem_id = f"boxes-{d}"

    def _box_of_index(self, idx: int) -> tuple[int, ...]:
        factors = []
        for _ in range(self.d):
            idx, r = divmod(idx, 6)
            factors.append(bx.PROPER_FACTORS[r])
        return tuple(reversed(factors))

    def _index_of_box(self, box) -> int:
        idx = 0
        for f in box:
            idx = idx * 6 + bx.PROPER_FACTORS.index(f)
        return idx

    def _boxes(self, payload: bytes) -> list[tuple[int, ...]]:
        out = []
        for i, count in enumerate(payload):
            out.extend([self._box_of_index(i)] * count)
        return out

    def _payload(self, boxes) -> bytes:
        counts = bytearray(self.payload_len)
        for b in boxes:
            counts[self._index_of_box(tuple(b))] += 1
        return bytes(counts)

    def empty_seed(self) -> list:
        return []

    def payload_to_seed(self, payload: bytes):
        return self._boxes(payload)

    def local_search(self, seed, rng) -> bytes:
        return self._payload(bx.local_search_boxes(seed, self.d, rng))

    def score(self, payload: bytes) -> int:
        return bx.score_box_cover(self._boxes(payload), self.d,
                                  self.over_weight, self.under_weight)

    def is_valid(self, payload: bytes) -> bool:
        return bx.verify_double_cover(self._boxes(payload), self.d)


_KINDS = {
    "triangle": TriangleProblem,
    "c4": C4Problem,
    "perm312": Perm312Problem,
    "cube": CubeProblem,
    "isosceles": IsoscelesProblem,
    "sphere": SphereProblem,
    "sperner": SpernerProblem,
    "cross_sperner": CrossSpernerProblem,
    "boxes": BoxesProblem,
}

PROBLEM_KINDS = tuple(_KINDS)


def make_problem(kind: str, **params) -> Problem:
    if kind not in _KINDS:
        raise ValueError(
            f"unknown problem {kind!r}; expected one of {sorted(_KINDS)}"
        )
    return _KINDS[kind](**params)
