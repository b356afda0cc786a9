import math

import numpy as np
import pytest

from corrlab import ResourceLimitError
from corrlab import measures as ms
from corrlab import oracles as orc
from corrlab import seqcore as sc

B = sc.BinarySequence.from_symbols


def random_seq(rng, n):
    return sc.random_sequence(n, sc.SeedSpec(int(rng.integers(0, 2 ** 63)), 0))


class TestShiftTuple:
    def test_order(self):
        t = ms.ShiftTuple((1, 4, 9))
        assert t.order == 4
        assert t.max_offset == 9

    def test_validation(self):
        with pytest.raises(ValueError):
            ms.ShiftTuple(())
        with pytest.raises(ValueError):
            ms.ShiftTuple((0,))
        with pytest.raises(ValueError):
            ms.ShiftTuple((2, 2))
        with pytest.raises(ValueError):
            ms.ShiftTuple((3, 1))
        with pytest.raises(ValueError):
            ms.ShiftTuple((5,)).validate_for(5)


class TestColexEnumeration:
    def test_first_tuples(self):
        got = list(ms.colex_offsets(5, 2))
        assert got == [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]

    @pytest.mark.parametrize("n,k", [(8, 1), (8, 2), (8, 3), (10, 4)])
    def test_complete_and_colex_sorted(self, n, k):
        got = list(ms.colex_offsets(n, k))
        assert len(got) == math.comb(n - 1, k)
        assert len(set(got)) == len(got)
        assert got == sorted(got, key=lambda t: tuple(reversed(t)))

    def test_rank_unrank_round_trip(self):
        for k in (1, 2, 3):
            for rank, offs in enumerate(ms.colex_offsets(9, k)):
                assert ms.colex_rank(offs) == rank
                assert ms.colex_unrank(rank, k) == offs

    def test_unrank_large(self):
        rank = math.comb(10 ** 6, 4) // 3
        offs = ms.colex_unrank(rank, 4)
        assert ms.colex_rank(offs) == rank


class TestProductSequence:
    def test_adjacent_pairs(self):
        assert ms.product_sequence(B([1, 1, -1, -1]), ms.ShiftTuple((1,))).symbols() \
            == (1, -1, 1)

    def test_all_ones(self):
        assert ms.product_sequence(sc.all_ones(6), ms.ShiftTuple((2, 3))).symbols() \
            == (1, 1, 1)

    def test_alternating_triple(self):
        assert ms.product_sequence(sc.alternating(5), ms.ShiftTuple((1, 2))).symbols() \
            == (-1, 1, -1)

    def test_offset_too_large(self):
        with pytest.raises(ValueError):
            ms.product_sequence(sc.all_ones(4), ms.ShiftTuple((4,)))

    def test_matches_direct_product(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(3, 40))
            seq = random_seq(rng, n)
            k = int(rng.integers(1, min(4, n - 1) + 1))
            offs = tuple(sorted(rng.choice(np.arange(1, n), size=k, replace=False)))
            t = ms.ShiftTuple(offs)
            arr = seq.to_array()
            length = n - t.max_offset
            direct = arr[:length].copy()
            for u in offs:
                direct = direct * arr[u:u + length]
            assert np.array_equal(ms.product_sequence(seq, t).to_array(), direct)


class TestCorrelationSum:
    def test_examples(self):
        assert ms.correlation_sum(sc.all_ones(7), ms.ShiftTuple((3,))) == 4
        assert ms.correlation_sum(sc.alternating(6), ms.ShiftTuple((1,))) == -5
        assert ms.correlation_sum(B([1, 1, -1, -1]), ms.ShiftTuple((2,))) == -2

    def test_parity_and_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(3, 60))
            seq = random_seq(rng, n)
            u = int(rng.integers(1, n))
            s = ms.correlation_sum(seq, ms.ShiftTuple((u,)))
            assert abs(s) <= n - u
            assert (s - (n - u)) % 2 == 0


class TestRangeOfWalk:
    def test_examples(self):
        assert ms.range_of_walk(sc.all_ones(3)) == 3
        assert ms.range_of_walk(sc.alternating(4)) == 1
        assert ms.range_of_walk(B([1, 1, -1, -1, -1, 1])) == 3

    def test_equals_naive_double_maximum(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            n = int(rng.integers(1, 513))
            seq = random_seq(rng, n)
            assert ms.range_of_walk(seq) == orc.naive_range(seq)


class TestCorrelationMeasureExact:
    def test_alternating_odd_order(self):
        assert ms.correlation_measure_exact(sc.alternating(9), 3).value == 1

    def test_constant_sequence(self):
        assert ms.correlation_measure_exact(sc.all_ones(6), 2).value == 5

    def test_witness_example(self):
        res = ms.correlation_measure_exact(B([1, 1, 1, -1]), 2)
        assert res.value == 2
        assert res.witness_tuple.offsets == (1,)
        # earliest window realizing the prefix range; replays to the value
        assert ms.replay_witness(B([1, 1, 1, -1]), res) == 2

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ms.correlation_measure_exact(sc.all_ones(5), 1)
        with pytest.raises(ValueError):
            ms.correlation_measure_exact(sc.all_ones(5), 6)

    def test_budget_guard(self):
        with pytest.raises(ResourceLimitError):
            ms.correlation_measure_exact(sc.all_ones(64), 6, work_budget=10 ** 6)

    def test_witness_replay_random(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            n = int(rng.integers(4, 24))
            r = int(rng.integers(2, min(5, n) + 1))
            seq = random_seq(rng, n)
            res = ms.correlation_measure_exact(seq, r)
            assert ms.replay_witness(seq, res) == res.value
            assert res.exact
            m1, m2 = res.witness_window
            assert 1 <= m1 <= m2 <= n - res.witness_tuple.max_offset

    def test_value_bounds(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            n = int(rng.integers(4, 20))
            r = int(rng.integers(2, min(5, n) + 1))
            val = ms.correlation_measure_exact(random_seq(rng, n), r).value
            assert 1 <= val <= n - r + 1

    def test_witness_is_first_colex_maximizer(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            n = int(rng.integers(5, 14))
            seq = random_seq(rng, n)
            res = ms.correlation_measure_exact(seq, 3)
            arr = seq.to_array()
            for offs in ms.colex_offsets(n, 2):
                if offs == res.witness_tuple.offsets:
                    break
                assert ms._range_for_offsets(arr, offs) < res.value


class TestSymmetries:
    @pytest.mark.parametrize("r", [2, 3])
    def test_negation_and_reversal_exhaustive(self, r):
        for n in range(max(r, 2), 11):
            mat = sc.all_sequences_matrix(n)
            values = ms.exact_values_batch(mat, r)
            neg = ms.exact_values_batch(-mat, r)
            rev = ms.exact_values_batch(mat[:, ::-1], r)
            assert np.array_equal(values, neg)
            assert np.array_equal(values, rev)

    def test_negation_reversal_exhaustive_n12(self):
        mat = sc.all_sequences_matrix(12)
        for r in (2, 3):
            values = ms.exact_values_batch(mat, r)
            assert np.array_equal(values, ms.exact_values_batch(-mat, r))
            assert np.array_equal(values, ms.exact_values_batch(mat[:, ::-1], r))

    def test_monotone_extension_chains(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            n = int(rng.integers(8, 20))
            seq = random_seq(rng, n)
            r = int(rng.integers(2, 5))
            prev = None
            for m in range(r, n + 1):
                val = ms.correlation_measure_exact(seq.prefix(m), r).value
                if prev is not None:
                    assert val >= prev
                prev = val


class TestCorrelationMeasureSampled:
    def test_exhausted_budget_equals_exact(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            n = int(rng.integers(6, 16))
            seq = random_seq(rng, n)
            exact = ms.correlation_measure_exact(seq, 3).value
            sampled = ms.correlation_measure_sampled(seq, 3, math.comb(n - 1, 2),
                                                     sc.SeedSpec(1, 0))
            assert sampled.value == exact
            assert sampled.exact is False

    def test_single_tuple_budget(self):
        res = ms.correlation_measure_sampled(sc.all_ones(10), 3, 1, sc.SeedSpec(0, 0))
        assert 1 <= res.value <= 8

    def test_lower_bound_and_determinism(self):
        seq = sc.random_sequence(24, sc.SeedSpec(5, 0))
        exact = ms.correlation_measure_exact(seq, 4).value
        a = ms.correlation_measure_sampled(seq, 4, 1000, sc.SeedSpec(1, 0))
        b = ms.correlation_measure_sampled(seq, 4, 1000, sc.SeedSpec(1, 0))
        assert a == b
        assert a.value <= exact
        assert ms.replay_witness(seq, a) == a.value

    def test_with_replacement_regime(self):
        # budget above half the tuple space switches to replacement draws
        seq = sc.random_sequence(12, sc.SeedSpec(8, 0))
        total = math.comb(11, 1)
        res = ms.correlation_measure_sampled(seq, 2, total - 1, sc.SeedSpec(2, 0))
        assert res.value <= ms.correlation_measure_exact(seq, 2).value

    def test_large_space_lower_bound(self):
        seq = sc.random_sequence(64, sc.SeedSpec(9, 0))
        res = ms.correlation_measure_sampled(seq, 6, 100, sc.SeedSpec(3, 0))
        assert 1 <= res.value <= 64 - 6 + 1

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            ms.correlation_measure_sampled(sc.all_ones(8), 2, 0, sc.SeedSpec(0, 0))


class TestNormalization:
    def test_values(self):
        assert ms.normalization(16, 2).value == pytest.approx(math.sqrt(32 * math.log(16)), rel=1e-12)
        assert ms.normalization(3, 2).value == pytest.approx(2.567425506, rel=1e-8)
        assert ms.normalization(10, 3).value == pytest.approx(math.sqrt(20 * math.log(45)), rel=1e-12)

    def test_square_identity(self):
        for n, r in [(10, 2), (100, 3), (5000, 4), (12, 5)]:
            norm = ms.normalization(n, r)
            assert norm.value ** 2 == pytest.approx(2 * n * math.log(math.comb(n, r - 1)),
                                                    rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            ms.normalization(3, 3)
        with pytest.raises(ValueError):
            ms.normalization(10, 1)


class TestNormalizedRatio:
    def test_alternating(self):
        got = ms.normalized_ratio(sc.alternating(100), 3)
        assert got == pytest.approx(1 / math.sqrt(200 * math.log(math.comb(100, 2))), rel=1e-12)

    def test_all_ones(self):
        got = ms.normalized_ratio(sc.all_ones(100), 2)
        assert got == pytest.approx(99 / math.sqrt(200 * math.log(100)), rel=1e-12)

    def test_equals_oracle_ratio(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            n = int(rng.integers(5, 21))
            seq = random_seq(rng, n)
            want = orc.naive_correlation_measure(seq, 2) / ms.normalization(n, 2).value
            assert ms.normalized_ratio(seq, 2) == pytest.approx(want, rel=1e-12)


class TestBatchKernels:
    def test_matches_exact_random(self):
        rng = np.random.default_rng(59)
        for r in (2, 3, 4):
            seqs = [random_seq(rng, 18) for _ in range(40)]
            batch = ms.exact_values_batch(seqs, r)
            for seq, val in zip(seqs, batch):
                assert ms.correlation_measure_exact(seq, r).value == val

    def test_worker_independence(self):
        rng = np.random.default_rng(61)
        mat = np.stack([random_seq(rng, 64).to_array() for _ in range(16)])
        base = ms.exact_values_batch(mat, 3, workers=1)
        for workers in (2, 5, 8):
            assert np.array_equal(base, ms.exact_values_batch(mat, 3, workers=workers))

    def test_range_batch(self):
        rng = np.random.default_rng(67)
        seqs = [random_seq(rng, 100) for _ in range(30)]
        got = ms.range_values_batch(np.stack([s.to_array() for s in seqs]))
        assert [ms.range_of_walk(s) for s in seqs] == list(got)

    def test_sampled_never_exceeds_exact_batch(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            seq = random_seq(rng, 24)
            exact = ms.correlation_measure_exact(seq, 4).value
            sampled = ms.correlation_measure_sampled(
                seq, 4, 10 ** 3, sc.SeedSpec(int(rng.integers(0, 2 ** 32)), 0))
            assert sampled.value <= exact
