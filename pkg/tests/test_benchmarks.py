"""Tests for the relay benchmark bounds, checked against rho-grid oracles."""

import numpy as np
import pytest

from netbounds.benchmarks import RelaySpec, cf_bound, cutset_bound, df_bound
from netbounds.info import awgn_capacity


def grid_max(func, steps=100001):
    rhos = np.linspace(0.0, 1.0, steps)
    return max(func(r) for r in rhos)


def cutset_at(spec, rho):
    mac = awgn_capacity(
        spec.gamma_sd + spec.gamma_rd + 2 * rho * np.sqrt(spec.gamma_sd * spec.gamma_rd)
    )
    bc = awgn_capacity((1 - rho * rho) * (spec.gamma_sd + spec.gamma_sr))
    return min(mac, bc)


def df_at(spec, rho):
    mac = awgn_capacity(
        spec.gamma_sd + spec.gamma_rd + 2 * rho * np.sqrt(spec.gamma_sd * spec.gamma_rd)
    )
    decode = awgn_capacity((1 - rho * rho) * spec.gamma_sr)
    return min(mac, decode)


class TestRelaySpec:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            RelaySpec(gamma_sd=0.0, gamma_sr=1.0, gamma_rd=1.0)
        with pytest.raises(ValueError):
            RelaySpec(gamma_sd=1.0, gamma_sr=-2.0, gamma_rd=1.0)


class TestCutset:
    def test_matches_grid_oracle(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=10.0, gamma_rd=10.0)
        oracle = grid_max(lambda r: cutset_at(spec, r))
        assert abs(cutset_bound(spec) - oracle) < 1e-4

    def test_weak_relay_limit(self):
        spec = RelaySpec(gamma_sd=2.0, gamma_sr=1e-9, gamma_rd=10.0)
        assert abs(cutset_bound(spec) - awgn_capacity(2.0)) < 1e-6

    def test_strong_relay_link_limit(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=5.0, gamma_rd=1e9)
        assert abs(cutset_bound(spec) - awgn_capacity(6.0)) < 1e-6

    def test_at_least_direct_capacity(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            spec = RelaySpec(*np.exp(rng.uniform(np.log(0.1), np.log(100), 3)))
            assert cutset_bound(spec) >= awgn_capacity(spec.gamma_sd) - 1e-9


class TestDf:
    def test_matches_grid_oracle(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=100.0, gamma_rd=10.0)
        oracle = grid_max(lambda r: df_at(spec, r))
        assert abs(df_bound(spec) - oracle) < 1e-4

    def test_weak_source_relay_binds(self):
        spec = RelaySpec(gamma_sd=3.0, gamma_sr=1.0, gamma_rd=10.0)
        assert df_bound(spec) <= awgn_capacity(1.0) + 1e-9

    def test_strong_source_relay_limit(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=1e9, gamma_rd=4.0)
        coherent = 1.0 + 4.0 + 2.0 * np.sqrt(4.0)
        assert abs(df_bound(spec) - awgn_capacity(coherent)) < 1e-6

    def test_below_cutset(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            spec = RelaySpec(*np.exp(rng.uniform(np.log(0.1), np.log(100), 3)))
            assert df_bound(spec) <= cutset_bound(spec) + 1e-9


class TestCf:
    def test_formula(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=10.0, gamma_rd=10.0)
        sigma_q = (1.0 + 1.0 + 10.0) / 10.0
        expected = awgn_capacity(1.0 + 10.0 / (1.0 + sigma_q))
        assert abs(cf_bound(spec) - expected) < 1e-12

    def test_perfect_compression_limit(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=5.0, gamma_rd=1e12)
        assert abs(cf_bound(spec) - awgn_capacity(6.0)) < 1e-6

    def test_useless_relay_limit(self):
        spec = RelaySpec(gamma_sd=1.0, gamma_sr=5.0, gamma_rd=1e-12)
        assert abs(cf_bound(spec) - awgn_capacity(1.0)) < 1e-6

    def test_below_cutset_and_above_direct(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            spec = RelaySpec(*np.exp(rng.uniform(np.log(0.1), np.log(100), 3)))
            assert cf_bound(spec) <= cutset_bound(spec) + 1e-9
            assert cf_bound(spec) >= awgn_capacity(spec.gamma_sd) - 1e-12
