import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from silentduel import (
    MISS,
    DomainError,
    Score,
    allocate_payoffs,
    hit,
    play_round,
    round_rng,
    simulate,
    simulate_deviation,
)
from silentduel.sampling import firing_quantile, round_uniforms
from silentduel.tournament import _allocate_rows

from conftest import strategy_for


class TestScore:
    def test_ordering(self):
        assert MISS < hit(0.0) < hit(0.3) < hit(0.9)
        assert not hit(0.5) < hit(0.5)
        assert max([MISS, hit(0.2), hit(0.7), MISS]) == hit(0.7)

    @pytest.mark.parametrize("y", [-0.1, 1.0, 1.5])
    def test_hit_range(self, y):
        with pytest.raises(DomainError):
            hit(y)

    def test_miss_sentinel(self):
        with pytest.raises(DomainError):
            Score(False, 0.3)
        assert MISS.value == -1.0


class TestAllocate:
    @pytest.mark.parametrize(
        "scores, c, expected",
        [
            ([hit(0.4), hit(0.7), MISS], 0.2, [0, 1, 0]),
            ([MISS, MISS, MISS], 0.2, [0.2, 0.2, 0.2]),
            ([hit(0.5), hit(0.5)], 0.0, [0.5, 0.5]),
            ([hit(0.0), MISS], 0.9, [1, 0]),
            ([hit(0.3), hit(0.6), hit(0.6), hit(0.6)], 0.1, [0, 1 / 3, 1 / 3, 1 / 3]),
        ],
    )
    def test_examples(self, scores, c, expected):
        assert allocate_payoffs(scores, c) == pytest.approx(expected, abs=0)

    def test_empty(self):
        with pytest.raises(DomainError):
            allocate_payoffs([], 0.1)

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("c", [0.0, 0.25, 0.9])
    def test_conservation_all_patterns(self, n, c):
        distances = [0.15 * (i + 1) for i in range(n)]
        for pattern in itertools.product([False, True], repeat=n):
            scores = [hit(x) if h else MISS for x, h in zip(distances, pattern)]
            pay = allocate_payoffs(scores, c)
            assert min(pay) >= 0
            assert sum(pay) == pytest.approx(1.0 if any(pattern) else n * c, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_conservation_with_ties(self, n):
        for pattern in itertools.product([False, True], repeat=n):
            scores = [hit(0.5) if h else MISS for h in pattern]
            assert sum(allocate_payoffs(scores, 0.3)) == pytest.approx(1.0 if any(pattern) else 0.3 * n)

    @given(
        st.lists(st.one_of(st.just(None), st.sampled_from([0.0, 0.2, 0.5, 0.75])), min_size=2, max_size=6),
        st.randoms(use_true_random=False),
    )
    def test_permutation_equivariance(self, raw, rnd):
        scores = [MISS if y is None else hit(y) for y in raw]
        perm = list(range(len(scores)))
        rnd.shuffle(perm)
        base = allocate_payoffs(scores, 0.3)
        permuted = allocate_payoffs([scores[i] for i in perm], 0.3)
        assert permuted == [base[i] for i in perm]

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(0)
        raw = np.where(rng.random((500, 4)) < 0.4, -1.0, rng.choice([0.1, 0.3, 0.3, 0.8], (500, 4)))
        rows = _allocate_rows(raw, 0.15)
        for r in range(500):
            scores = [MISS if y < 0 else hit(y) for y in raw[r]]
            assert rows[r].tolist() == allocate_payoffs(scores, 0.15)


class TestPlayRound:
    def test_replayable(self):
        s = strategy_for(3, 0.2)
        a = play_round(s, round_rng(5, 7, 3))
        b = play_round(s, round_rng(5, 7, 3))
        assert a == b
        assert len(a.distances) == len(a.hits) == len(a.payoffs) == 3
        assert sum(a.payoffs) == pytest.approx(1.0 if any(a.hits) else 0.6)

    def test_matches_vectorized_rounds(self):
        s = strategy_for(4, 0.1)
        u = round_uniforms(11, 0, 200, 4)
        x = firing_quantile(s, u[:, 0::2])
        hits = u[:, 1::2] < 1 - x
        for r in range(200):
            out = play_round(s, round_rng(11, r, 4))
            assert out.distances == tuple(x[r])
            assert out.hits == tuple(hits[r])

    def test_deviation_fixes_player_zero(self):
        s = strategy_for(2, 0.0)
        out = play_round(s, round_rng(1, 0, 2), deviation=0.25)
        assert out.distances[0] == 0.25
        assert out.scores[0] in (MISS, hit(0.25))


class TestSimulate:
    def test_single_round_degenerate(self):
        stats = simulate(strategy_for(2, 0.5), 1, seed=3)
        assert stats.degenerate
        assert stats.std_error == (0.0, 0.0)
        assert all(math.isfinite(m) for m in stats.mean_payoff)

    def test_single_round_equals_play_round(self):
        s = strategy_for(3, 0.3)
        stats = simulate(s, 1, seed=8)
        out = play_round(s, round_rng(8, 0, 3))
        assert stats.mean_payoff == out.payoffs
        assert stats.all_miss_freq == (0.0 if any(out.hits) else 1.0)

    def test_matches_replayed_rounds(self):
        s = strategy_for(3, 0.2)
        stats = simulate(s, 300, seed=21, chunk_size=64)
        pays = np.array([play_round(s, round_rng(21, r, 3)).payoffs for r in range(300)])
        np.testing.assert_allclose(stats.mean_payoff, pays.mean(axis=0), rtol=0, atol=1e-15)
        np.testing.assert_allclose(stats.std_error, pays.std(axis=0, ddof=1) / math.sqrt(300), rtol=1e-12)

    @pytest.mark.parametrize("bad", [0, -5])
    def test_rounds_domain(self, bad):
        with pytest.raises(DomainError):
            simulate(strategy_for(2, 0.5), bad, seed=0)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
    def test_seed_domain(self, seed):
        with pytest.raises(DomainError):
            simulate(strategy_for(2, 0.5), 10, seed=seed)

    def test_worker_count_does_not_matter(self):
        s = strategy_for(4, 0.25)
        one = simulate(s, 50_000, seed=42, workers=1, chunk_size=4096)
        many = simulate(s, 50_000, seed=42, workers=5, chunk_size=4096)
        assert one == many

    def test_repeatable(self):
        s = strategy_for(2, 0.0)
        assert simulate(s, 20_000, seed=1) == simulate(s, 20_000, seed=1)
        assert simulate(s, 20_000, seed=1) != simulate(s, 20_000, seed=2)

    def test_payoff_sum_identity(self):
        # Total payout per round is 1 or n*c, so the mean of the sum is pinned
        # by the all-miss frequency.
        s = strategy_for(3, 0.2)
        stats = simulate(s, 20_000, seed=4)
        expected = (1 - stats.all_miss_freq) + 3 * 0.2 * stats.all_miss_freq
        assert sum(stats.mean_payoff) == pytest.approx(expected, abs=1e-12)

    def test_moderate_run_near_value(self):
        s = strategy_for(2, 0.5)
        stats = simulate(s, 200_000, seed=42)
        for m, se in zip(stats.mean_payoff, stats.std_error):
            assert abs(m - 0.5) <= 3 * se

    def test_to_dict(self):
        d = simulate(strategy_for(2, 0.5), 10, seed=0).to_dict()
        assert d["rounds"] == 10 and d["seed"] == 0 and d["deviation_distance"] is None
        assert isinstance(d["mean_payoff"], list)


class TestDeviation:
    @pytest.mark.parametrize("y", [-0.1, 1.0, math.nan])
    def test_domain(self, y):
        with pytest.raises(DomainError):
            simulate_deviation(strategy_for(2, 0.5), y, 10, seed=0)

    def test_point_blank_earns_value(self):
        s = strategy_for(2, 0.5)
        stats = simulate_deviation(s, 0.0, 200_000, seed=3)
        assert stats.deviation_distance == 0.0
        assert abs(stats.mean_payoff[0] - 0.5) <= 3 * stats.std_error[0]

    def test_far_shot_is_worse(self):
        s = strategy_for(2, 0.5)
        stats = simulate_deviation(s, 0.9, 200_000, seed=3)
        # Analytic oracle: 0.1 * F(0.9) + c * 0.9 * v = 0.1 + 0.225.
        assert abs(stats.mean_payoff[0] - 0.325) <= 3 * stats.std_error[0]
        assert 0.5 - stats.mean_payoff[0] > 3 * stats.std_error[0]
