import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patternboost import tokenizer as tk
from patternboost.problems.graphs import GraphBits, graph_from_edges


# --- flattening -------------------------------------------------------------


def test_flatten_with_delimiters_matches_published_example():
    # upper-triangle rows 010 / 01 / 0 of a 4-vertex graph: edges {0-2, 1-3}
    g = graph_from_edges(4, [(0, 2), (1, 3)])
    assert tk.flatten_graph(g, delimiters=True) == "010,01,0,"
    assert tk.flatten_graph(g, delimiters=False) == "010010"


def test_unflatten_round_trip_and_row_validation():
    g = graph_from_edges(4, [(0, 2), (1, 3)])
    for delim in (True, False):
        s = tk.flatten_graph(g, delim)
        assert tk.unflatten_graph(s, 4, delim) == g.bits
    with pytest.raises(tk.DecodeError):
        tk.unflatten_graph("010,0,10,", 4, True)
    with pytest.raises(tk.DecodeError):
        tk.unflatten_graph("01001", 4, False)
    with pytest.raises(tk.DecodeError):
        tk.unflatten_graph("010,01,0", 4, True)  # missing trailing comma


def test_empty_graph_flattens_to_zeros():
    g = GraphBits(20, bytes(190))
    assert tk.flatten_graph(g, False) == "0" * 190
    s = tk.flatten_graph(g, True)
    assert s.count(",") == 19
    assert s.count("0") == 190


def test_delimiter_count_is_always_n_minus_1():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5, 9):
        bits = bytes(int(b) for b in rng.integers(0, 2, n * (n - 1) // 2))
        s = tk.flatten_graph(GraphBits(n, bits), True)
        assert s.count(",") == n - 1


# --- byte-pair encoding -------------------------------------------------------


GOLDEN_CORPUS = ["100001", "110001", "001001"]


def test_bpe_golden_merges():
    vocab = tk.bpe_train(GOLDEN_CORPUS, vocab_size=4)
    strings = vocab.token_strings
    first = strings[tk.N_SPECIALS + 2 + 0]
    second = strings[tk.N_SPECIALS + 2 + 1]
    assert first == "00"
    assert second == "100"  # symbol '1' followed by the "00" token
    segs = [
        [strings[t] for t in tk.bpe_encode(vocab, s)[1:-1]]
        for s in GOLDEN_CORPUS
    ]
    assert segs == [["100", "00", "1"], ["1", "100", "0", "1"],
                    ["00", "100", "1"]]
    lengths = [len(s) for s in segs]
    assert lengths == [3, 4, 3]
    assert abs(sum(lengths) / 3 - 3.33) < 0.01


def test_bpe_intermediate_segmentation_after_first_merge():
    vocab = tk.bpe_train(GOLDEN_CORPUS, vocab_size=3)
    strings = vocab.token_strings
    segs = [
        [strings[t] for t in tk.bpe_encode(vocab, s)[1:-1]]
        for s in GOLDEN_CORPUS
    ]
    assert segs == [["1", "00", "00", "1"], ["1", "1", "00", "0", "1"],
                    ["00", "1", "00", "1"]]


def test_bpe_identity_vocab():
    vocab = tk.bpe_train(["0101", "10"], vocab_size=2)
    assert vocab.merges == ()
    toks = tk.bpe_encode(vocab, "0110")
    assert toks == [tk.START_ID, 2, 3, 3, 2, tk.END_ID]


def test_bpe_empty_corpus_rejected():
    with pytest.raises(ValueError):
        tk.bpe_train([], 10)


def test_bpe_stops_when_no_pair_repeats():
    vocab = tk.bpe_train(["01"], vocab_size=50)
    assert vocab.content_size < 50


def test_bpe_merges_never_lengthen():
    rng = np.random.default_rng(1)
    corpus = ["".join(map(str, rng.integers(0, 2, size=40)))
              for _ in range(50)]
    vocab = tk.bpe_train(corpus, vocab_size=30)
    for s in corpus:
        assert len(tk.bpe_encode(vocab, s)) - 2 <= len(s)


def test_bpe_round_trip_random():
    rng = np.random.default_rng(2)
    corpus = ["".join(map(str, rng.integers(0, 2, size=60)))
              for _ in range(100)]
    vocab = tk.bpe_train(corpus, vocab_size=40)
    for _ in range(1000):
        s = "".join(map(str, rng.integers(0, 2, size=int(rng.integers(0, 70)))))
        assert tk.bpe_decode(vocab, tk.bpe_encode(vocab, s)) == s


def test_bpe_single_token_for_trained_pair():
    corpus = ["10" * 10] * 5
    vocab = tk.bpe_train(corpus, vocab_size=3)
    toks = tk.bpe_encode(vocab, "10")
    assert len(toks) == 3  # start, one merged token, end
    assert vocab.token_strings[toks[1]] == "10"


def test_bpe_decode_unknown_id_rejected():
    vocab = tk.bpe_train(GOLDEN_CORPUS, vocab_size=4)
    with pytest.raises(tk.DecodeError):
        tk.bpe_decode(vocab, [tk.START_ID, vocab.size, tk.END_ID])
    with pytest.raises(tk.DecodeError):
        tk.bpe_decode(vocab, [tk.START_ID, 2, tk.START_ID, tk.END_ID])


def test_bpe_batch_encode_matches_single():
    rng = np.random.default_rng(3)
    corpus = ["".join(map(str, rng.integers(0, 2, size=50)))
              for _ in range(60)]
    vocab = tk.bpe_train(corpus, vocab_size=25)
    batch = tk.bpe_encode_batch(vocab, corpus)
    assert batch == [tk.bpe_encode(vocab, s) for s in corpus]


def test_bpe_train_deterministic():
    v1 = tk.bpe_train(GOLDEN_CORPUS, 6)
    v2 = tk.bpe_train(GOLDEN_CORPUS, 6)
    assert v1.merges == v2.merges


def test_vocab_save_load_reproduces_encodings(tmp_path):
    rng = np.random.default_rng(4)
    corpus = ["".join(map(str, rng.integers(0, 2, size=40)))
              for _ in range(40)]
    vocab = tk.bpe_train(corpus, vocab_size=20)
    path = tmp_path / "vocab.txt"
    tk.vocab_save(vocab, path)
    loaded = tk.vocab_load(path)
    assert loaded == vocab
    for s in corpus[:10]:
        assert tk.bpe_encode(loaded, s) == tk.bpe_encode(vocab, s)


# --- fixed width --------------------------------------------------------------


def test_fixed_width_values_examples():
    assert tk.fixed_width_values("00000001", 8) == [1]
    assert tk.fixed_width_values("11111111", 8) == [255]


def test_fixed_width_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(200):
        k = int(rng.integers(1, 9))
        s = "".join(map(str, rng.integers(0, 2, size=int(rng.integers(1, 60)))))
        toks = tk.fixed_width_encode(s, k)
        assert tk.fixed_width_decode(toks, k, len(s)) == s


def test_fixed_width_bad_padding_rejected():
    toks = tk.fixed_width_encode("111", 2)  # padded to 0111 -> values [1, 3]
    with pytest.raises(tk.DecodeError):
        tk.fixed_width_decode(toks, 2, 6)  # wrong group count
    with pytest.raises(tk.DecodeError):
        # values [2, 3] -> bits 1011: nonzero pad bit for a 3-bit payload
        tk.fixed_width_decode([tk.START_ID, 2 + 2, 2 + 3, tk.END_ID], 2, 3)


# --- point encoding -----------------------------------------------------------


def test_point_encode_examples():
    assert tk.point_encode((0, 0, 0), 5) == 0
    assert tk.point_encode((1, 2, 3), 10) == 123
    assert tk.point_encode((9, 9, 9), 10) == 999
    with pytest.raises(ValueError):
        tk.point_encode((0, 0, 5), 5)


@given(st.integers(2, 12), st.data())
@settings(max_examples=100, deadline=None)
def test_point_encode_round_trip(n, data):
    p = tuple(data.draw(st.integers(0, n - 1)) for _ in range(3))
    assert tk.point_decode(tk.point_encode(p, n), n) == p
