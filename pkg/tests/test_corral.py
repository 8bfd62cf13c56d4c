import math

import numpy as np
import pytest

from blocked_bandits.bandit import Environment
from blocked_bandits.corral import (
    CorralConfig,
    CorralPolicy,
    default_eta,
    importance_weighted_losses,
    init_corral_state,
    log_barrier_omd,
    omd_update,
    proxy_pool_size,
    reward_to_loss,
    run_cbslb,
    sparsity_grid,
)
from blocked_bandits.model import gen_sparse_instance
from blocked_bandits.policies import BSLB


def two_base_closed_form(p, eta, losses):
    a = 1 / p[0] + eta * losses[0]
    b = 1 / p[1] + eta * losses[1]
    x = ((a + b - 2) - math.sqrt((a - b) ** 2 + 4)) / 2
    return np.array([1 / (a - x), 1 / (b - x)])


class TestGrid:
    def test_examples(self):
        assert sparsity_grid(1024) == [2 ** i for i in range(11)]
        assert sparsity_grid(1) == [1]
        assert sparsity_grid(10) == [1, 2, 4, 8]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CorralConfig([1, 4, 2], 0.1, 1.0)
        with pytest.raises(ValueError):
            CorralConfig([1, 2], 0.0, 1.0)


class TestDefaultEta:
    def test_examples(self):
        assert default_eta(16, 100, 1.0) == pytest.approx(0.00025, rel=1e-12)
        assert default_eta(2, 4, 1.0) == pytest.approx(0.00625, rel=1e-12)

    def test_small_regret_bound(self):
        assert default_eta(16, 100, 1e-12) == pytest.approx(0.2, rel=1e-12)

    def test_one_dimension_positive(self):
        assert default_eta(1, 100, 1e-12) == pytest.approx(0.1)


class TestOmd:
    def test_zero_loss_fixed_point(self):
        p = np.array([0.2, 0.3, 0.5])
        assert np.array_equal(log_barrier_omd(p, np.full(3, 0.5), np.zeros(3)), p)
        state = omd_update(init_corral_state(3, 0.5, 50), 1, 0.0)
        assert np.allclose(state.probs, 1 / 3, atol=1e-15)

    @pytest.mark.parametrize("p0,eta,loss", [(0.5, 0.3, 2.0), (0.2, 1.0, 0.7), (0.9, 5.0, 10.0)])
    def test_two_base_closed_form(self, p0, eta, loss):
        p = np.array([p0, 1 - p0])
        got = log_barrier_omd(p, np.full(2, eta), np.array([loss, 0.0]))
        assert np.allclose(got, two_base_closed_form(p, eta, [loss, 0.0]), atol=1e-10)

    def test_alternating_symmetric(self):
        T = 200
        state = init_corral_state(2, 0.05, T)
        worst = 0.0
        for t in range(T):
            i = t % 2
            state = omd_update(state, i, 0.5 / state.sampling_probs[i])
            if i == 1:
                worst = max(worst, abs(state.probs[0] - 0.5))
        # each pair of rounds returns close to the centre
        assert worst <= 0.05 * 1.0

    def test_invariants(self, rng):
        T, B = 400, 5
        state = init_corral_state(B, 0.2, T)
        for _ in range(T):
            i = int(rng.choice(B, p=state.sampling_probs))
            loss = rng.uniform() * (0.2 if i == 0 else 1.0)
            prev = state
            state = omd_update(state, i, loss / state.sampling_probs[i])
            assert abs(state.probs.sum() - 1) <= 1e-9
            assert abs(state.sampling_probs.sum() - 1) <= 1e-9
            assert state.sampling_probs.min() >= state.gamma / B - 1e-15
            assert np.all(state.rho >= prev.rho) and np.all(state.eta >= prev.eta)
            assert np.all(state.rho >= 2 * B)
            grew = state.rho > prev.rho
            assert np.allclose(state.eta[grew], prev.eta[grew] * state.beta, rtol=1e-14)
            assert np.array_equal(state.eta[~grew], prev.eta[~grew])
        assert state.round == T
        assert state.beta == pytest.approx(math.exp(1 / math.log(T)))
        assert state.gamma == pytest.approx(1 / T)

    def test_equal_losses_stay_uniform(self, rng):
        p = np.full(4, 0.25)
        for _ in range(100):
            p = log_barrier_omd(p, np.full(4, 0.3), np.full(4, rng.uniform(0, 5)))
        assert np.max(np.abs(p - 0.25)) <= 1e-6

    def test_rejects_bad_loss(self):
        state = init_corral_state(2, 0.1, 10)
        with pytest.raises(ValueError):
            omd_update(state, 0, -0.1)
        with pytest.raises(ValueError):
            omd_update(state, 0, math.inf)

    def test_importance_weighting_unbiased(self, rng):
        probs = np.array([0.1, 0.2, 0.3, 0.4])
        losses = np.array([0.9, 0.1, 0.5, 0.3])
        n = 100_000
        picks = rng.choice(4, size=n, p=probs)
        total = np.zeros(4)
        for i in range(4):
            hits = np.count_nonzero(picks == i)
            total += hits * importance_weighted_losses(probs, i, losses[i])
        assert np.max(np.abs(total / n - losses)) <= 0.01


class TestHelpers:
    def test_reward_to_loss(self):
        assert reward_to_loss(1.0, 1.0) == 0.0
        assert reward_to_loss(-1.0, 1.0) == 1.0
        assert reward_to_loss(0.0, 1.0) == 0.5
        assert reward_to_loss(5.0, 1.0) == 0.0

    def test_pool_size(self):
        assert proxy_pool_size(2000, 200, 150, 1.0) == math.ceil(200 ** (1 / 3) * 150 ** (2 / 3))
        assert proxy_pool_size(50, 200, 150, 1.0) == 50


class TestCorralPolicy:
    def test_blocking_and_meta(self, rng):
        inst = gen_sparse_instance(120, 8, 2, 0.5, rng)
        trace = run_cbslb(Environment(inst, 0), 60, c_explore=0.3, random_state=0)
        assert len(set(trace.arm_indices)) == 60
        meta = trace.meta
        assert meta["grid"] == [1, 2, 4, 8]
        assert meta["rho_init"] == 8.0 and meta["gamma"] == pytest.approx(1 / 60)
        assert meta["probs"].shape == (60, 4)
        assert np.allclose(meta["probs"].sum(axis=1), 1.0)

    def test_private_blocking_redirects_collisions(self, rng):
        inst = gen_sparse_instance(80, 4, 1, 0.5, rng)
        trace = CorralPolicy(c_explore=0.5, shared_blocking=False, random_state=1).run(
            Environment(inst, 0), 60)
        assert len(set(trace.arm_indices)) == 60
        assert trace.meta["collisions"] > 0

    def test_grid_above_d(self, rng):
        inst = gen_sparse_instance(30, 4, 1, 0.5, rng)
        with pytest.raises(ValueError, match="exceed d"):
            CorralPolicy(grid=[1, 8]).run(Environment(inst, 0), 10)

    def test_single_base_matches_bslb(self):
        corral, single = [], []
        for s in range(20):
            inst = gen_sparse_instance(200, 10, 2, 0.2, np.random.default_rng(100 + s))
            kw = dict(c_explore=0.3, lam=0.05, u_hat=40)
            corral.append(CorralPolicy(grid=[2], random_state=s, **kw).run(Environment(inst, s), 60).final_regret)
            single.append(BSLB(sparsity_k=2, random_state=s, **kw).run(Environment(inst, s), 60).final_regret)
        mc, sc = np.mean(corral), np.mean(single)
        sd_c, sd_s = np.std(corral, ddof=1), np.std(single, ddof=1)
        # +/- one standard deviation bands overlap
        assert mc - sd_c <= sc + sd_s and sc - sd_s <= mc + sd_c
