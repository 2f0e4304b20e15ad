import random

import pytest

from succinctrmq.rmq import OracleRmq, RmqIndex, adversarial_arrays
from succinctrmq.serial import DecodeError

from test_trees import FIG_ARRAY


def check_all_pairs(index, arr):
    n = len(arr)
    for i in range(1, n + 1):
        best = i
        for j in range(i, n + 1):
            if arr[j - 1] < arr[best - 1]:
                best = j
            assert index.query(i, j) == best, (i, j)


class TestBuild:
    def test_singleton(self):
        idx = RmqIndex.build([1])
        assert idx.query(1, 1) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            RmqIndex.build([])

    def test_unknown_codec(self):
        with pytest.raises(ValueError):
            RmqIndex.build([1, 2], codec="zip")

    def test_fixture_array(self):
        idx = RmqIndex.build(FIG_ARRAY)
        assert idx.query(1, 20) == 19
        assert idx.query(4, 8) == 5

    def test_identity_queries(self):
        idx = RmqIndex.build(list(range(50, 0, -1)))
        for i in range(1, 51):
            assert idx.query(i, i) == i

    def test_array_not_retained(self):
        arr = [5, 3, 8, 1, 9, 2]
        idx = RmqIndex.build(arr)
        before = [idx.query(i, j) for i in range(1, 7) for j in range(i, 7)]
        arr[0] = -100  # mutating the caller's array must not matter
        after = [idx.query(i, j) for i in range(1, 7) for j in range(i, 7)]
        assert before == after
        assert not hasattr(idx, "values")

    def test_range_errors(self):
        idx = RmqIndex.build([3, 1, 2])
        for i, j in ((0, 1), (2, 1), (1, 4), (-1, 2)):
            with pytest.raises(IndexError):
                idx.query(i, j)


class TestOracles:
    def test_examples(self):
        assert OracleRmq([3, 1, 2]).query(1, 3) == 2
        assert OracleRmq([2, 2, 2]).query(1, 3) == 1

    def test_sparse_equals_naive(self):
        rng = random.Random(17)
        for n in (1, 2, 33, 250, 512):
            arr = [rng.randint(0, 40) for _ in range(n)]
            naive = OracleRmq(arr, "naive")
            sparse = OracleRmq(arr, "sparse")
            for i in range(1, n + 1):
                for j in range(i, n + 1):
                    assert naive.query(i, j) == sparse.query(i, j)

    def test_bad_method(self):
        with pytest.raises(ValueError):
            OracleRmq([1], "magic")


class TestEquivalence:
    def test_random_permutations_all_pairs(self):
        rng = random.Random(21)
        for trial in range(10):
            n = rng.randint(1, 320)
            arr = list(range(1, n + 1))
            rng.shuffle(arr)
            idx = RmqIndex.build(arr, codec=("fixed", "entropy", "huffman")[trial % 3])
            check_all_pairs(idx, arr)

    def test_adversarial_all_pairs(self):
        for name, arr in adversarial_arrays(300, seed=4).items():
            idx = RmqIndex.build(arr)
            check_all_pairs(idx, arr)

    def test_duplicates_leftmost(self):
        rng = random.Random(23)
        for _ in range(6):
            n = rng.randint(1, 200)
            arr = [rng.randint(0, 3) for _ in range(n)]
            idx = RmqIndex.build(arr, micro_b=4, mini_b=16)
            check_all_pairs(idx, arr)

    def test_sampled_large(self):
        import numpy as np

        arr = np.random.default_rng(5).permutation(50000).tolist()
        idx = RmqIndex.build(arr)
        oracle = OracleRmq(arr, "sparse")
        rng = random.Random(6)
        for _ in range(20000):
            i = rng.randint(1, 50000)
            j = rng.randint(i, 50000)
            assert idx.query(i, j) == oracle.query(i, j)


class TestSpaceReport:
    def test_components_sum(self):
        idx = RmqIndex.build(list(range(1000)), codec="huffman")
        rep = idx.space_report()
        assert sum(rep["breakdown"].values()) == rep["total_bits"]
        assert rep["bits_per_element"] == rep["total_bits"] / rep["n"]

    def test_codebook_only_for_huffman(self):
        arr = list(range(500, 0, -1))
        assert RmqIndex.build(arr, codec="entropy").space_report()["breakdown"]["codebook"] == 0
        assert RmqIndex.build(arr, codec="huffman").space_report()["breakdown"]["codebook"] > 0


class TestSerialization:
    @pytest.mark.parametrize("codec", ["fixed", "entropy", "huffman"])
    def test_roundtrip(self, codec):
        rng = random.Random(31)
        arr = [rng.randint(0, 999) for _ in range(700)]
        idx = RmqIndex.build(arr, codec=codec, mini_b=40, micro_b=6)
        data = idx.to_bytes()
        back = RmqIndex.from_bytes(data)
        assert back.n == 700 and back.codec == codec
        for _ in range(2000):
            i = rng.randint(1, 700)
            j = rng.randint(i, 700)
            assert back.query(i, j) == idx.query(i, j)

    def test_malformed(self):
        idx = RmqIndex.build([4, 2, 7])
        data = idx.to_bytes()
        with pytest.raises(DecodeError):
            RmqIndex.from_bytes(data[: len(data) // 2])
        with pytest.raises(DecodeError):
            RmqIndex.from_bytes(b"JUNK" + data[4:])
