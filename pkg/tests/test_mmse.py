import numpy as np
import pytest

from mmsediv import (ConfigurationError, NumericalHealthWarning,
                     block_circulant_operator, capacity, derive_stream,
                     flat_capacity_batch, flat_sinrs, noise_scaling,
                     sample_complex_gaussian, selective_capacity_batch,
                     selective_sinrs, selective_sinrs_oracle,
                     spd_inverse_diagonal, transfer_function)
from mmsediv import mmse as mmse_mod


def rng_for(*key):
    return derive_stream(555, *key)


class TestFlatSinrs:
    def test_siso_scalar_case(self):
        beta = flat_sinrs(np.array([[1.0 + 0j]]), 3.0)
        assert beta.shape == (1,)
        assert abs(beta[0] - 3.0) <= 1e-12

    def test_zero_channel_gives_zero(self):
        beta = flat_sinrs(np.zeros((3, 2)), 10.0)
        assert np.array_equal(beta, np.zeros(2))
        assert capacity(beta) == 0.0

    @pytest.mark.parametrize("dims", [(1, 1), (2, 2), (3, 2), (4, 3)])
    def test_matches_explicit_inverse(self, dims):
        # oracle: full matrix inversion of the regularized Gram matrix
        n, m = dims
        for trial in range(20):
            h = sample_complex_gaussian(n, m, rng_for(1, n, m, trial))
            rho = float(10.0 ** rng_for(2, n, m, trial).uniform(-1, 3))
            s = np.eye(m) + (rho / m) * h.conj().T @ h
            expected = 1.0 / np.real(np.diag(np.linalg.inv(s))) - 1.0
            got = flat_sinrs(h, rho)
            assert np.max(np.abs(got - expected) / np.abs(expected)) <= 1e-10

    def test_nonnegative_and_monotone_in_snr(self):
        rhos = np.logspace(-1, 3, 10)
        for trial in range(10):
            h = sample_complex_gaussian(3, 3, rng_for(3, trial))
            betas = np.array([flat_sinrs(h, rho) for rho in rhos])
            assert np.all(betas >= 0.0)
            assert np.all(np.diff(betas, axis=0) >= -1e-12)

    def test_mmse_capacity_below_ml_capacity(self):
        for trial in range(20):
            h = sample_complex_gaussian(3, 2, rng_for(4, trial))
            rho = float(10.0 ** rng_for(5, trial).uniform(-1, 3))
            mmse_bits = capacity(flat_sinrs(h, rho))
            gram = np.eye(2) + (rho / 2) * h.conj().T @ h
            ml_bits = np.linalg.slogdet(gram)[1] / np.log(2.0)
            assert mmse_bits <= ml_bits + 1e-9

    def test_rejects_nonfinite(self):
        h = np.array([[1.0, np.inf], [0.0, 1.0]], dtype=complex)
        with pytest.raises(ValueError):
            flat_sinrs(h, 1.0)

    def test_rejects_bad_rho(self):
        with pytest.raises(ConfigurationError):
            flat_sinrs(np.eye(2, dtype=complex), 0.0)


class TestCapacity:
    def test_zero_sinrs(self):
        assert capacity([0.0, 0.0]) == 0.0

    def test_known_values(self):
        assert abs(capacity([1.0, 3.0]) - 3.0) <= 1e-12
        assert abs(capacity([3.0]) - 2.0) <= 1e-12

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            capacity([0.5, -0.1])


class TestSelectiveSinrs:
    def test_single_tap_reduces_to_flat(self):
        taps = sample_complex_gaussian(3, 2, rng_for(10), size=1)
        flat = flat_sinrs(taps[0], 7.0)
        for scaling in ("per-tap", "paper"):
            sel = selective_sinrs(taps, 7.0, 8, scaling=scaling)
            assert np.max(np.abs(sel - flat) / flat) <= 1e-12

    def test_zero_taps(self):
        beta = selective_sinrs(np.zeros((2, 2, 2)), 5.0, 8)
        assert np.array_equal(beta, np.zeros(2))

    @pytest.mark.parametrize("dims", [(2, 2, 3, 8), (1, 2, 2, 4), (3, 3, 3, 16)])
    def test_matches_block_circulant_oracle(self, dims):
        m, n, taps_count, bins = dims
        for trial in range(5):
            taps = sample_complex_gaussian(n, m, rng_for(11, *dims, trial),
                                           size=taps_count)
            rho = float(10.0 ** rng_for(12, *dims, trial).uniform(-0.5, 2))
            fast = selective_sinrs(taps, rho, bins)
            slow = selective_sinrs_oracle(taps, rho, bins)
            assert np.max(np.abs(fast - slow) / slow) <= 1e-8

    def test_scaling_conventions_differ_by_constant(self):
        taps = sample_complex_gaussian(2, 2, rng_for(13), size=2)
        per_tap = selective_sinrs(taps, 6.0, 8, scaling="per-tap")
        paper = selective_sinrs(taps, 3.0, 8, scaling="paper")
        # rho/(M*L) at rho=6, L=2 equals rho/M at rho=3
        assert np.max(np.abs(per_tap - paper)) <= 1e-12

    def test_rejects_small_block_length(self):
        taps = sample_complex_gaussian(2, 2, rng_for(14), size=3)
        with pytest.raises(ConfigurationError):
            selective_sinrs(taps, 1.0, 2)

    def test_rejects_unknown_scaling(self):
        taps = sample_complex_gaussian(2, 2, rng_for(15), size=2)
        with pytest.raises(ConfigurationError):
            selective_sinrs(taps, 1.0, 8, scaling="bogus")

    def test_rejects_nonfinite_taps(self):
        taps = np.zeros((2, 2, 2), dtype=complex)
        taps[1, 0, 0] = np.nan
        with pytest.raises(ValueError):
            selective_sinrs(taps, 1.0, 8)


class TestBlockCirculantOracle:
    def test_scalar_circulant(self):
        beta = selective_sinrs_oracle(np.array([[[1.0 + 0j]]]), 1.0, 2)
        assert abs(beta[0] - 1.0) <= 1e-12

    def test_zero_taps(self):
        beta = selective_sinrs_oracle(np.zeros((2, 2, 2)), 5.0, 4)
        assert np.array_equal(beta, np.zeros(2))

    def test_diagonal_constant_across_time_slots(self):
        # circulant shift symmetry: stream-j MSE identical in every slot
        taps = sample_complex_gaussian(2, 2, rng_for(20), size=3)
        bins, m = 8, 2
        op = block_circulant_operator(taps, bins)
        c = noise_scaling(4.0, m, 3)
        gram = np.eye(bins * m) + c * (op.conj().T @ op)
        diag = np.real(np.diag(np.linalg.inv(gram))).reshape(bins, m)
        assert np.max(np.abs(diag - diag[0])) <= 1e-10

    def test_operator_layout(self):
        taps = np.arange(1, 5, dtype=complex).reshape(2, 1, 2)  # L=2, N=1, M=2
        op = block_circulant_operator(taps, 3)
        assert op.shape == (3, 6)
        assert np.array_equal(op[0, 0:2], taps[0, 0])
        assert np.array_equal(op[1, 0:2], taps[1, 0])   # lag 1
        assert np.array_equal(op[0, 4:6], taps[1, 0])   # wraps around
        assert np.array_equal(op[2, 0:2], np.zeros(2))  # lag 2 absent

    def test_size_cap(self):
        taps = sample_complex_gaussian(2, 2, rng_for(21), size=2)
        with pytest.raises(ConfigurationError):
            selective_sinrs_oracle(taps, 1.0, 512)


class TestBatchPaths:
    def test_flat_batch_matches_scalar(self):
        hs = sample_complex_gaussian(3, 2, rng_for(30), size=50)
        batch = flat_capacity_batch(hs, 9.0)
        scalar = np.array([capacity(flat_sinrs(h, 9.0)) for h in hs])
        assert np.max(np.abs(batch - scalar)) <= 1e-12

    def test_selective_batch_matches_scalar(self):
        taps = sample_complex_gaussian(2, 2, rng_for(31), size=(20, 3))
        batch = selective_capacity_batch(taps, 5.0, 8)
        scalar = np.array([capacity(selective_sinrs(t, 5.0, 8)) for t in taps])
        assert np.max(np.abs(batch - scalar)) <= 1e-12

    def test_transfer_function_is_direct_dft(self):
        taps = sample_complex_gaussian(2, 3, rng_for(32), size=4)
        bins = 8
        freq = transfer_function(taps, bins)
        for k in range(bins):
            direct = sum(taps[ell] * np.exp(-2j * np.pi * k * ell / bins)
                         for ell in range(4))
            assert np.max(np.abs(freq[k] - direct)) <= 1e-12


class TestSpdInverseDiagonal:
    @pytest.mark.parametrize("m", [1, 2, 3, 4, 6])
    def test_matches_full_inverse(self, m):
        a = sample_complex_gaussian(m + 2, m, rng_for(40, m))
        s = np.eye(m) + 0.8 * a.conj().T @ a
        expected = np.real(np.diag(np.linalg.inv(s)))
        got = spd_inverse_diagonal(s)
        assert np.max(np.abs(got - expected) / expected) <= 1e-12

    def test_batched_input(self):
        a = sample_complex_gaussian(4, 3, rng_for(41), size=10)
        s = np.einsum("bnj,bnk->bjk", a.conj(), a) + np.eye(3)
        got = spd_inverse_diagonal(s)
        for i in range(10):
            expected = np.real(np.diag(np.linalg.inv(s[i])))
            assert np.max(np.abs(got[i] - expected) / expected) <= 1e-12


class TestNumericalHealth:
    def test_clamp_beyond_slack_warns_and_counts(self):
        before = mmse_mod.numerical_health()["clamped_beyond_slack"]
        with pytest.warns(NumericalHealthWarning):
            beta = mmse_mod._sinrs_from_mse(np.array([1.0 + 1e-9]))
        assert beta[0] == 0.0
        assert mmse_mod.numerical_health()["clamped_beyond_slack"] == before + 1

    def test_tiny_roundoff_clamps_silently(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error", NumericalHealthWarning)
            beta = mmse_mod._sinrs_from_mse(np.array([1.0 + 1e-13, 0.5]))
        assert beta[0] == 0.0
        assert abs(beta[1] - 1.0) <= 1e-12
