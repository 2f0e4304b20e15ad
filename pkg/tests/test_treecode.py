import math
import random

import pytest

from succinctrmq.serial import DecodeError
from succinctrmq.treecode import (
    RangeDecoder,
    RangeEncoder,
    SELECTOR_SIZECODE,
    SELECTOR_ZAKS,
    TreeCode,
    decode_count,
    decode_tree,
    encode_count,
    encode_hybrid,
    encode_left_sizes,
    encode_subtree_size,
    encode_zaks,
    decode_left_sizes,
    zaks_decode,
)
from succinctrmq.trees import (
    build_cartesian,
    enumerate_shapes,
    left_path,
    sample_random_bst,
    subtree_entropy,
    zigzag_path,
)

from test_trees import FIG_ARRAY


def hybrid_budget(t):
    """2*ceil(lg n) + min(ceil(H_st)+4, 2n+2)."""
    n = t.n
    hdr = 2 * math.ceil(math.log2(n)) if n > 1 else 0
    hst = subtree_entropy(t).hst
    return hdr + min(math.ceil(hst) + 4, 2 * n + 2)


class TestRangeCoder:
    def test_inverse_small(self):
        stream = [(2, 1), (3, 0), (3, 2), (7, 6), (1, 0), (100, 99)]
        enc = RangeEncoder()
        for s, k in stream:
            enc.encode(s, k)
        bits = enc.finish()
        dec = RangeDecoder(bits)
        for s, k in stream:
            assert dec.decode(s) == k

    def test_inverse_long_random(self):
        rng = random.Random(2718)
        stream = []
        for _ in range(100000):
            s = rng.choice([1, 2, 3, 5, 17, 256, 10**4, 10**6])
            stream.append((s, rng.randrange(s)))
        enc = RangeEncoder()
        for s, k in stream:
            enc.encode(s, k)
        bits = enc.finish()
        info = sum(math.log2(s) for s, _ in stream)
        assert len(bits) <= info + 2 + 1e-6
        dec = RangeDecoder(bits)
        for s, k in stream:
            assert dec.decode(s) == k

    def test_empty_stream(self):
        enc = RangeEncoder()
        assert enc.finish() == []

    def test_symbol_out_of_range(self):
        enc = RangeEncoder()
        with pytest.raises(ValueError):
            enc.encode(3, 3)


class TestCountHeader:
    @pytest.mark.parametrize("n", list(range(0, 40)) + [63, 64, 65, 127, 128, 1000, 10**6])
    def test_roundtrip(self, n):
        bits = encode_count(n)
        got, pos = decode_count(bits + [1, 0, 1])
        assert got == n
        assert pos == len(bits)

    @pytest.mark.parametrize("n", range(2, 300))
    def test_budget(self, n):
        # header must stay within 2*ceil(lg n) bits (n >= 3; 3 bits for n <= 2)
        limit = max(3, 2 * math.ceil(math.log2(n)))
        assert len(encode_count(n)) <= limit


class TestZaks:
    def test_examples(self):
        assert encode_zaks(build_cartesian([1])) == [1, 0, 0]
        assert encode_zaks(left_path(2)) == [1, 1, 0, 0, 0]
        assert encode_zaks(build_cartesian([2, 1, 3])) == [1, 1, 0, 0, 1, 0, 0]

    def test_length(self):
        for n in (0, 1, 2, 9, 50):
            t = sample_random_bst(n, n)
            assert len(encode_zaks(t)) == 2 * n + 1

    def test_decode_example(self):
        t, pos = zaks_decode([1, 1, 0, 0, 1, 0, 0])
        assert pos == 7
        assert t.same_shape(build_cartesian([2, 1, 3]))

    def test_truncated(self):
        with pytest.raises(DecodeError):
            zaks_decode([1, 1, 0])


class TestSubtreeSizeCode:
    def test_single_node_empty_payload(self):
        code = encode_subtree_size(build_cartesian([1]))
        assert code.payload_bits == 0

    def test_left_path_three(self):
        # ls sequence (2,1,0): information lg3 + lg2 = 2.585 -> payload <= 5
        code = encode_subtree_size(left_path(3))
        assert code.payload_bits <= 5

    def test_fixture_payload(self):
        t = build_cartesian(FIG_ARRAY)
        code = encode_subtree_size(t)
        assert code.payload_bits <= 31  # ceil(28.74) + 2

    def test_payload_bound_random(self):
        for seed in range(30):
            t = sample_random_bst(random.Random(seed).randint(1, 400), seed)
            code = encode_subtree_size(t)
            hst = subtree_entropy(t).hst
            assert code.payload_bits <= math.ceil(hst) + 4

    def test_decoder_reconstructs(self):
        for seed in (1, 2, 3):
            t = sample_random_bst(200, seed)
            bits = encode_left_sizes(t)
            assert decode_left_sizes(200, bits).same_shape(t)


class TestHybrid:
    def test_fixture_selector(self):
        code = encode_hybrid(build_cartesian(FIG_ARRAY))
        assert code.selector == SELECTOR_SIZECODE

    def test_path_selector(self):
        code = encode_hybrid(left_path(64))
        assert code.selector == SELECTOR_ZAKS
        assert code.body_len == 2 * 64 + 1

    def test_single_node_total(self):
        code = encode_hybrid(build_cartesian([4]))
        assert code.bit_len <= code.header_len + 3

    def test_empty_tree(self):
        from succinctrmq.trees import BinaryTree

        code = encode_hybrid(BinaryTree())
        assert code.n == 0 and code.body_len == 0
        assert decode_tree(code).n == 0

    def test_budget_on_shape_battery(self):
        shapes = [left_path(n) for n in (1, 2, 3, 8, 64, 500, 5000)]
        shapes += [zigzag_path(n) for n in (5, 100, 5000)]
        shapes += [sample_random_bst(n, n) for n in (1, 2, 10, 100, 2000)]
        for t in shapes:
            code = encode_hybrid(t)
            assert code.bit_len <= hybrid_budget(t), f"n={t.n}"
            assert code.body_len <= 2 * t.n + 2

    @pytest.mark.parametrize("n", range(0, 9))
    def test_roundtrip_exhaustive_small(self, n):
        for t in enumerate_shapes(n):
            assert decode_tree(encode_hybrid(t)).same_shape(t)

    def test_roundtrip_random_bsts(self):
        rng = random.Random(31337)
        for _ in range(10000):
            t = sample_random_bst(rng.randint(1, 2000), rng.randint(0, 10**9))
            assert decode_tree(encode_hybrid(t)).same_shape(t)

    def test_roundtrip_degenerate(self):
        for n in (1, 2, 3, 1000, 5000):
            for t in (left_path(n), zigzag_path(n)):
                assert decode_tree(encode_hybrid(t)).same_shape(t)


class TestTreeCodeSerialization:
    def test_bytes_roundtrip(self):
        t = sample_random_bst(137, 5)
        code = encode_hybrid(t)
        data = code.to_bytes()
        restored = TreeCode.from_bytes(data)
        assert decode_tree(restored).same_shape(t)

    def test_truncated_bytes(self):
        code = encode_hybrid(sample_random_bst(137, 5))
        with pytest.raises(DecodeError):
            TreeCode.from_bytes(code.to_bytes()[:2])

    def test_malformed_zaks_stream(self):
        bits = encode_count(4) + [SELECTOR_ZAKS, 1, 1, 0]
        with pytest.raises(DecodeError):
            decode_tree(bits)

    def test_wrong_node_count(self):
        bits = encode_count(5) + [SELECTOR_ZAKS] + encode_zaks(build_cartesian([2, 1, 3]))
        with pytest.raises(DecodeError):
            decode_tree(bits)
