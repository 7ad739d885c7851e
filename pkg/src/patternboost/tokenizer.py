"""Reversible encodings between constructions and token sequences.

Three codec families: byte-pair encoding over a small base alphabet,
fixed-width grouping of k bits into one token, and direct point-index tokens
for grid subsets.  Token id layout is fixed: id 0 is the start special, id 1
the end special, base symbols follow in declared order, then merge tokens in
creation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # only for annotations; no runtime import cycle
    from .problems.graphs import GraphBits

START_ID = 0
END_ID = 1
N_SPECIALS = 2
START_SYMBOL = "<s>"
END_SYMBOL = "</s>"


class DecodeError(ValueError):
    """A token sequence does not decode to a structurally valid construction."""


# ---------------------------------------------------------------------------
# graph flattening


def flatten_graph(g: "GraphBits", delimiters: bool) -> str:
    """Row-major strict-upper-triangle bits of the adjacency matrix; with
    delimiters, a ',' terminates each of the n-1 rows (trailing comma
    included)."""
    n = g.n
    out = []
    idx = 0
    for i in range(n - 1):
        row_len = n - 1 - i
        row = "".join(str(b) for b in g.bits[idx:idx + row_len])
        idx += row_len
        out.append(row + "," if delimiters else row)
    return "".join(out)


def unflatten_graph(s: str, n: int, delimiters: bool) -> bytes:
    """Exact inverse of flatten_graph; validates the row structure."""
    want = n * (n - 1) // 2
    if delimiters:
        if not s.endswith(","):
            raise DecodeError("missing trailing row delimiter")
        rows = s[:-1].split(",")
        if len(rows) != n - 1:
            raise DecodeError(f"expected {n - 1} rows, got {len(rows)}")
        for i, row in enumerate(rows):
            if len(row) != n - 1 - i:
                raise DecodeError(
                    f"row {i} has {len(row)} entries, expected {n - 1 - i}"
                )
        s = "".join(rows)
    if len(s) != want:
        raise DecodeError(f"expected {want} entries, got {len(s)}")
    if not set(s) <= {"0", "1"}:
        raise DecodeError("non-binary entries")
    return bytes(int(ch) for ch in s)


# ---------------------------------------------------------------------------
# byte-pair encoding

_SEP = -1  # string separator in concatenated corpus arrays; never merges


@dataclass(frozen=True)
class Vocab:
    """BPE vocabulary: ordered base alphabet plus ordered merge rules.

    Merges applied in order reproduce the training-time segmentation; the
    rule list is (left_id, right_id) pairs, rule r creating token id
    N_SPECIALS + len(base_symbols) + r.
    """

    base_symbols: tuple[str, ...]
    merges: tuple[tuple[int, int], ...] = ()
    token_strings: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if len(set(self.base_symbols)) != len(self.base_symbols):
            raise ValueError("duplicate base symbols")
        strings = [START_SYMBOL, END_SYMBOL]
        strings.extend(self.base_symbols)
        for left, right in self.merges:
            if not all(N_SPECIALS <= t < len(strings) for t in (left, right)):
                raise ValueError("merge refers to an unknown token id")
            strings.append(strings[left] + strings[right])
        object.__setattr__(self, "token_strings", tuple(strings))

    @property
    def size(self) -> int:
        """Total number of token ids, specials included."""
        return len(self.token_strings)

    @property
    def content_size(self) -> int:
        return len(self.base_symbols) + len(self.merges)

    def symbol_ids(self) -> dict[str, int]:
        return {s: N_SPECIALS + i for i, s in enumerate(self.base_symbols)}


def _string_to_ids(s: str, sym_to_id: dict[str, int]) -> np.ndarray:
    try:
        return np.fromiter(
            (sym_to_id[ch] for ch in s), dtype=np.int32, count=len(s)
        )
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not in base alphabet") from None


def _merge_pass(arr: np.ndarray, left: int, right: int,
                new_id: int) -> np.ndarray:
    """Replace non-overlapping occurrences of (left, right) left-to-right.

    Matches at consecutive positions (possible only when left == right)
    overlap; greedy scanning keeps every other match within such a run.
    """
    matches = np.nonzero((arr[:-1] == left) & (arr[1:] == right))[0]
    if len(matches) == 0:
        return arr
    if len(matches) > 1:
        new_run = np.empty(len(matches), dtype=bool)
        new_run[0] = True
        np.greater(np.diff(matches), 1, out=new_run[1:])
        run_id = np.cumsum(new_run) - 1
        first = np.nonzero(new_run)[0]
        offset = np.arange(len(matches)) - first[run_id]
        matches = matches[offset % 2 == 0]
    out = arr.copy()
    out[matches] = new_id
    keep = np.ones(len(arr), dtype=bool)
    keep[matches + 1] = False
    return out[keep]


def _pair_stats(arr: np.ndarray, span: int):
    a = arr[:-1].astype(np.int64)
    b = arr[1:].astype(np.int64)
    valid = (a != _SEP) & (b != _SEP)
    codes = (a * span + b)[valid]
    if len(codes) == 0:
        return None
    uniq, counts = np.unique(codes, return_counts=True)
    top = int(counts.max())
    cands = uniq[counts == top]
    if len(cands) == 1:
        best = int(cands[0])
    else:
        firsts = [int(np.nonzero(codes == c)[0][0]) for c in cands]
        best = int(cands[int(np.argmin(firsts))])
    return top, (best // span, best % span)


def bpe_train(corpus: Sequence[str], vocab_size: int,
              base_symbols: Sequence[str] | None = None) -> Vocab:
    """Greedy merges of the most frequent adjacent token pair, ties broken by
    earliest first occurrence in corpus order, until the vocabulary holds
    vocab_size content tokens or no pair occurs twice."""
    if not corpus:
        raise ValueError("empty corpus")
    if base_symbols is None:
        base_symbols = sorted({ch for s in corpus for ch in s})
    base_symbols = tuple(base_symbols)
    if vocab_size < len(base_symbols):
        raise ValueError("vocab_size smaller than the base alphabet")
    sym_to_id = {s: N_SPECIALS + i for i, s in enumerate(base_symbols)}
    parts = []
    sep = np.array([_SEP], dtype=np.int32)
    for s in corpus:
        parts.append(_string_to_ids(s, sym_to_id))
        parts.append(sep)
    arr = np.concatenate(parts)
    merges: list[tuple[int, int]] = []
    next_id = N_SPECIALS + len(base_symbols)
    while len(base_symbols) + len(merges) < vocab_size:
        stats = _pair_stats(arr, span=next_id + 1)
        if stats is None or stats[0] < 2:
            break
        _, (left, right) = stats
        arr = _merge_pass(arr, left, right, next_id)
        merges.append((left, right))
        next_id += 1
    return Vocab(base_symbols, tuple(merges))


def _apply_merges_array(vocab: Vocab, arr: np.ndarray) -> np.ndarray:
    new_id = N_SPECIALS + len(vocab.base_symbols)
    for left, right in vocab.merges:
        arr = _merge_pass(arr, left, right, new_id)
        new_id += 1
    return arr


def bpe_encode(vocab: Vocab, s: str) -> list[int]:
    """Token ids bracketed by the start/end specials."""
    arr = _string_to_ids(s, vocab.symbol_ids())
    arr = _apply_merges_array(vocab, arr)
    return [START_ID, *map(int, arr), END_ID]


def bpe_encode_batch(vocab: Vocab, strings: Sequence[str]) -> list[list[int]]:
    """Encode many strings in one pass over a separator-joined array; exactly
    equivalent to bpe_encode on each string (merges never cross separators)."""
    if not strings:
        return []
    sym_to_id = vocab.symbol_ids()
    parts = []
    sep = np.array([_SEP], dtype=np.int32)
    for s in strings:
        parts.append(_string_to_ids(s, sym_to_id))
        parts.append(sep)
    arr = _apply_merges_array(vocab, np.concatenate(parts))
    out = []
    cur = [START_ID]
    for t in arr:
        if t == _SEP:
            cur.append(END_ID)
            out.append(cur)
            cur = [START_ID]
        else:
            cur.append(int(t))
    return out


def _strip_specials(tokens: Sequence[int]) -> list[int]:
    toks = list(tokens)
    if toks and toks[0] == START_ID:
        toks = toks[1:]
    if toks and toks[-1] == END_ID:
        toks = toks[:-1]
    return toks


def bpe_decode(vocab: Vocab, tokens: Sequence[int]) -> str:
    out = []
    for t in _strip_specials(tokens):
        if not N_SPECIALS <= t < vocab.size:
            raise DecodeError(f"unknown token id {t}")
        out.append(vocab.token_strings[t])
    return "".join(out)


# ---------------------------------------------------------------------------
# fixed-width bit grouping


def fixed_width_values(s: str, k: int) -> list[int]:
    """Integer value of each k-bit group after left-padding with zeros to a
    multiple of k."""
    if set(s) - {"0", "1"}:
        raise ValueError("fixed-width encoding expects a bit string")
    pad = (-len(s)) % k
    s = "0" * pad + s
    return [int(s[i:i + k], 2) for i in range(0, len(s), k)]


def fixed_width_bits(values: Sequence[int], k: int, orig_len: int) -> str:
    """Inverse of fixed_width_values given the original bit length."""
    bits = "".join(format(v, f"0{k}b") for v in values)
    pad = len(bits) - orig_len
    if pad < 0 or any(ch != "0" for ch in bits[:pad]):
        raise DecodeError("bad fixed-width padding")
    return bits[pad:]


def fixed_width_encode(s: str, k: int) -> list[int]:
    """TokenSeq form: start special, group values offset past the specials,
    end special."""
    return [START_ID, *(v + N_SPECIALS for v in fixed_width_values(s, k)),
            END_ID]


def fixed_width_decode(tokens: Sequence[int], k: int, orig_len: int) -> str:
    values = []
    for t in _strip_specials(tokens):
        if not N_SPECIALS <= t < N_SPECIALS + (1 << k):
            raise DecodeError(f"token id {t} outside fixed-width range")
        values.append(t - N_SPECIALS)
    if len(values) != (orig_len + k - 1) // k:
        raise DecodeError(
            f"expected {(orig_len + k - 1) // k} groups, got {len(values)}"
        )
    return fixed_width_bits(values, k, orig_len)


# ---------------------------------------------------------------------------
# grid point indices


def point_encode(p: Sequence[int], n: int) -> int:
    a0, a1, a2 = p
    for c in (a0, a1, a2):
        if not 0 <= c < n:
            raise ValueError(f"coordinate {c} outside [0, {n})")
    return a0 * n * n + a1 * n + a2


def point_decode(idx: int, n: int) -> tuple[int, int, int]:
    if not 0 <= idx < n ** 3:
        raise ValueError(f"index {idx} outside [0, {n ** 3})")
    a0, rest = divmod(idx, n * n)
    a1, a2 = divmod(rest, n)
    return (a0, a1, a2)


# ---------------------------------------------------------------------------
# codecs: payload <-> TokenSeq, as used by the search loop


class BpeCodec:
    """Payload -> text via a problem-supplied flattener, then BPE tokens."""

    def __init__(self, vocab: Vocab, to_text: Callable, from_text: Callable,
                 payload_char_len: int):
        self.vocab = vocab
        self.to_text = to_text
        self.from_text = from_text
        self.max_len = payload_char_len + N_SPECIALS

    @property
    def n_tokens(self) -> int:
        return self.vocab.size

    def encode(self, payload: bytes) -> list[int]:
        return bpe_encode(self.vocab, self.to_text(payload))

    def encode_batch(self, payloads: Sequence[bytes]) -> list[list[int]]:
        return bpe_encode_batch(self.vocab, [self.to_text(p) for p in payloads])

    def decode(self, tokens: Sequence[int]):
        return self.from_text(bpe_decode(self.vocab, tokens))


class FixedWidthCodec:
    """k bits per token over a fixed-length bit payload."""

    def __init__(self, k: int, payload_len: int, to_seed: Callable):
        self.k = k
        self.payload_len = payload_len
        self.to_seed = to_seed
        self.max_len = (payload_len + k - 1) // k + N_SPECIALS

    @property
    def n_tokens(self) -> int:
        return N_SPECIALS + (1 << self.k)

    def encode(self, payload: bytes) -> list[int]:
        return fixed_width_encode("".join(map(str, payload)), self.k)

    def encode_batch(self, payloads: Sequence[bytes]) -> list[list[int]]:
        return [self.encode(p) for p in payloads]

    def decode(self, tokens: Sequence[int]):
        bits = fixed_width_decode(tokens, self.k, self.payload_len)
        return self.to_seed(bytes(int(ch) for ch in bits))


class PointCodec:
    """One token per grid point of [n]^3; payload is the occupancy bitmap and
    decoding yields the ordered point list the sphere search seeds from."""

    def __init__(self, n: int):
        self.n = n
        self.max_len = n ** 3 + N_SPECIALS

    @property
    def n_tokens(self) -> int:
        return N_SPECIALS + self.n ** 3

    def encode(self, payload: bytes) -> list[int]:
        ids = [i + N_SPECIALS for i, b in enumerate(payload) if b]
        return [START_ID, *ids, END_ID]

    def encode_batch(self, payloads: Sequence[bytes]) -> list[list[int]]:
        return [self.encode(p) for p in payloads]

    def decode(self, tokens: Sequence[int]) -> list[tuple[int, int, int]]:
        pts = []
        for t in _strip_specials(tokens):
            if not N_SPECIALS <= t < self.n_tokens:
                raise DecodeError(f"token id {t} is not a grid point")
            pts.append(point_decode(t - N_SPECIALS, self.n))
        return pts


# ---------------------------------------------------------------------------
# vocab persistence

_VOCAB_HEADER = "patternboost-vocab v1"


def vocab_save(vocab: Vocab, path) -> None:
    """Text format: header, base alphabet declaration, then one merge per
    line as `<id> <left_id> <right_id>`."""
    lines = [_VOCAB_HEADER, "base " + " ".join(vocab.base_symbols)]
    next_id = N_SPECIALS + len(vocab.base_symbols)
    for left, right in vocab.merges:
        lines.append(f"{next_id} {left} {right}")
        next_id += 1
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def vocab_load(path) -> Vocab:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines or lines[0] != _VOCAB_HEADER:
        raise ValueError(f"{path}: not a vocab file")
    if len(lines) < 2 or not lines[1].startswith("base "):
        raise ValueError(f"{path}: missing base alphabet declaration")
    base = tuple(lines[1][5:].split(" "))
    merges = []
    expected = N_SPECIALS + len(base)
    for ln in lines[2:]:
        tid, left, right = (int(x) for x in ln.split())
        if tid != expected:
            raise ValueError(f"{path}: merge ids out of order at {tid}")
        merges.append((left, right))
        expected += 1
    return Vocab(base, tuple(merges))
