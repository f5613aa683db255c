import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from diqgps.errors import StructuralError
from diqgps.quantum import (PAULI_X, PAULI_Z, BinaryObservable, GaugeTransform, TwoQubitState,
                            TwoQubitStrategy, apply_gauge, born_probability, canonical_strategy,
                            exact_correlation_table, exact_probabilities,
                            outcomes_from_uniforms, phi_plus,
                            product_state, random_gauge, random_unitary, sample_round,
                            sample_rounds)
from diqgps.correlations import chsh_value, expectation, no_signalling_deviation

from oracles import canonical_matrices, trace_chsh, trace_correlator, trace_table

P0000 = 0.42677669529663675  # trace oracle: (1 + 1/sqrt2)/4


def random_strategy(seed):
    """Random mixed state and random projective +/-1 observables."""
    gen = np.random.default_rng(seed)
    G = gen.normal(size=(4, 4)) + 1j * gen.normal(size=(4, 4))
    rho = G @ G.conj().T
    rho /= np.trace(rho)

    def obs():
        u = random_unitary(2, gen)
        return u @ PAULI_Z @ u.conj().T

    return TwoQubitStrategy(TwoQubitState(rho), (obs(), obs()), (obs(), obs()))


class TestTypes:
    def test_state_rejects_bad_trace(self):
        with pytest.raises(StructuralError, match="trace"):
            TwoQubitState(np.eye(4) / 2)

    def test_state_rejects_non_psd(self):
        with pytest.raises(StructuralError, match="semidefinite"):
            TwoQubitState(np.diag([1.5, -0.5, 0, 0]))

    def test_state_rejects_non_hermitian(self):
        m = np.eye(4) / 4
        m[0, 1] = 0.1
        with pytest.raises(StructuralError, match="Hermitian"):
            TwoQubitState(m)

    def test_observable_involution(self):
        with pytest.raises(StructuralError, match="identity"):
            BinaryObservable(np.diag([1.0, 0.5]))
        for o in canonical_strategy().obs_R + canonical_strategy().obs_S:
            assert_allclose(o.matrix @ o.matrix, np.eye(2), atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(StructuralError, match="dimension"):
            TwoQubitStrategy(phi_plus(), (np.eye(4), np.eye(4)), (PAULI_Z, PAULI_X))

    def test_gauge_rejects_non_unitary(self):
        with pytest.raises(StructuralError, match="unitary"):
            GaugeTransform(u_R=2 * np.eye(2))

    def test_gauge_rejects_unnormalised_ancilla(self):
        with pytest.raises(StructuralError, match="normalised"):
            GaugeTransform(ancilla=[1, 1], ancilla_dims=(1, 2))


class TestBorn:
    def test_perfect_correlation_phi_plus(self):
        zz = TwoQubitStrategy(phi_plus(), (PAULI_Z, PAULI_Z), (PAULI_Z, PAULI_Z))
        assert born_probability(zz, 0, 0, 0, 0) == pytest.approx(0.5, abs=1e-12)
        assert born_probability(zz, 1, 1, 0, 1) == pytest.approx(0.0, abs=1e-12)

    def test_canonical_p0000(self):
        assert born_probability(canonical_strategy(), 0, 0, 0, 0) == pytest.approx(P0000, abs=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_trace_oracle(self, seed):
        strat = random_strategy(seed)
        ref = trace_table(strat.state.matrix, [o.matrix for o in strat.obs_R],
                          [o.matrix for o in strat.obs_S])
        assert_allclose(exact_probabilities(strat), ref, atol=1e-12)
        for x, y in [(0, 0), (1, 0)]:
            total = sum(born_probability(strat, x, y, r, s) for r in (0, 1) for s in (0, 1))
            assert total == pytest.approx(1.0, abs=1e-12)


class TestCanonical:
    def test_chsh_is_tsirelson(self):
        assert chsh_value(exact_correlation_table(canonical_strategy())) == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    def test_correlators(self):
        t = exact_correlation_table(canonical_strategy())
        assert expectation(t, 0, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert expectation(t, 1, 1) == pytest.approx(-1 / math.sqrt(2), abs=1e-12)

    def test_matches_oracle_matrices(self):
        rho, R, S = canonical_matrices()
        strat = canonical_strategy()
        assert_allclose(strat.state.matrix, rho, atol=1e-15)
        assert trace_correlator(rho, R[0], S[0]) == pytest.approx(1 / math.sqrt(2))
        assert trace_chsh(rho, R, S) == pytest.approx(2 * math.sqrt(2))

    def test_schmidt_coefficients(self):
        assert_allclose(canonical_strategy().state.schmidt_coefficients(), [2**-0.5, 2**-0.5], atol=1e-12)

    def test_unbiased_marginals(self):
        t = exact_correlation_table(canonical_strategy())
        for x in (0, 1):
            for y in (0, 1):
                assert_allclose(t.marginal_R(x, y), [0.5, 0.5], atol=1e-12)
                assert_allclose(t.marginal_S(x, y), [0.5, 0.5], atol=1e-12)

    def test_product_state_is_deterministic(self):
        zz = TwoQubitStrategy(product_state(0, 0), (PAULI_Z, PAULI_Z), (PAULI_Z, PAULI_Z))
        p = exact_probabilities(zz)
        assert_allclose(p[:, :, 0, 0], np.ones((2, 2)), atol=1e-12)


class TestSampling:
    def test_deterministic_outcome(self):
        zz = TwoQubitStrategy(product_state(0, 0), (PAULI_Z, PAULI_Z), (PAULI_Z, PAULI_Z))
        for i in range(1, 50):
            assert sample_round(zz, i % 2, (i // 2) % 2, seed=3, index=i) == (0, 0)

    def test_reproducible(self):
        strat = canonical_strategy()
        assert sample_round(strat, 1, 0, seed=11, index=77) == sample_round(strat, 1, 0, seed=11, index=77)

    def test_cdf_order(self):
        probs = np.zeros((2, 2, 2, 2))
        probs[0, 0] = [[0.125, 0.25], [0.125, 0.5]]  # dyadic: exact cumulative sums
        u = np.array([0.0, 0.124, 0.125, 0.374, 0.375, 0.499, 0.5, 0.999])
        r, s = outcomes_from_uniforms(probs, np.zeros(8, int), np.zeros(8, int), u)
        assert list(zip(r.tolist(), s.tolist())) == [(0, 0), (0, 0), (0, 1), (0, 1),
                                                     (1, 0), (1, 0), (1, 1), (1, 1)]

    def test_empirical_frequency_million(self):
        n = 10**6
        probs = exact_probabilities(canonical_strategy())
        r, s = sample_rounds(probs, np.zeros(n, int), np.zeros(n, int), seed=2024, indices=np.arange(1, n + 1))
        freq = np.mean((r == 0) & (s == 0))
        assert abs(freq - P0000) <= 3 * math.sqrt(P0000 * (1 - P0000) / n)

    def test_frequencies_per_setting_1e5(self):
        n = 10**5
        probs = exact_probabilities(canonical_strategy())
        for x in (0, 1):
            for y in (0, 1):
                r, s = sample_rounds(probs, np.full(n, x), np.full(n, y), seed=7 + 2 * x + y,
                                     indices=np.arange(1, n + 1))
                for rr in (0, 1):
                    for ss in (0, 1):
                        p = probs[x, y, rr, ss]
                        f = np.mean((r == rr) & (s == ss))
                        assert abs(f - p) <= 3 * math.sqrt(p * (1 - p) / n)


class TestGauge:
    def test_identity_gauge(self):
        strat = canonical_strategy()
        assert apply_gauge(strat, GaugeTransform()) is strat

    def test_haar_unitaries(self):
        strat = canonical_strategy()
        ref = exact_probabilities(strat)
        g = GaugeTransform(u_R=random_unitary(2, 1), u_S=random_unitary(2, 2))
        moved = apply_gauge(strat, g)
        assert not np.allclose(moved.state.matrix, strat.state.matrix)
        rho = moved.state.matrix
        oracle = trace_table(rho, [o.matrix for o in moved.obs_R], [o.matrix for o in moved.obs_S])
        assert_allclose(oracle, ref, atol=1e-10)

    def test_ancilla_on_S(self):
        strat = canonical_strategy()
        xi = np.array([0.6, 0.8j])
        moved = apply_gauge(strat, GaugeTransform(ancilla=xi, ancilla_dims=(1, 2)))
        assert moved.state.dims == (2, 4)
        oracle = trace_table(moved.state.matrix, [o.matrix for o in moved.obs_R],
                             [o.matrix for o in moved.obs_S])
        assert_allclose(oracle, exact_probabilities(strat), atol=1e-10)

    def test_ancilla_is_tensor_factor(self):
        # Partial trace over the ancilla must give back the original state.
        strat = canonical_strategy()
        xi = np.array([1, 1j, 0, 1]) / math.sqrt(3)
        moved = apply_gauge(strat, GaugeTransform(ancilla=xi, ancilla_dims=(2, 2)))
        rho = moved.state.matrix.reshape(2, 2, 2, 2, 2, 2, 2, 2)
        # Index order (R, R'', S, S'') for ket and bra.
        reduced = np.einsum("aibjckdl,ik,jl->abcd", rho, np.eye(2), np.eye(2)).reshape(4, 4)
        assert_allclose(reduced, strat.state.matrix, atol=1e-12)

    def test_unitary_dimension_mismatch(self):
        with pytest.raises(StructuralError):
            apply_gauge(canonical_strategy(), GaugeTransform(u_R=np.eye(4)))

    def test_hundred_random_gauges(self):
        strat = canonical_strategy()
        ref = exact_probabilities(strat)
        worst = 0.0
        for k in range(100):
            anc = [None, (1, 2), (2, 1), (2, 2)][k % 4]
            moved = apply_gauge(strat, random_gauge(k, ancilla_dims=anc))
            worst = max(worst, np.abs(exact_probabilities(moved) - ref).max())
        assert worst < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_strategies_are_valid_tables(self, seed):
        strat = random_strategy(seed)
        p = exact_probabilities(strat)
        assert np.all(p >= 0)
        assert_allclose(p.sum(axis=(2, 3)), np.ones((2, 2)), atol=1e-12)
        assert no_signalling_deviation(exact_correlation_table(strat)) < 1e-12
        assert abs(chsh_value(exact_correlation_table(strat))) <= 2 * math.sqrt(2) + 1e-9
