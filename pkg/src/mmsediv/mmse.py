"""Exact per-stream MMSE SINR and capacity for MIMO channels.

Flat fading: the per-stream output MSE of the exact linear MMSE equalizer
is the diagonal of ``(I + (rho/M) H^H H)^{-1}`` and the SINR of stream j is
``1/mse_j - 1``.  Cyclic-prefix frequency-selective channels: the
per-stream MSE is the average, over the K frequency bins of the length-K
DFT of the tap sequence, of the per-bin diagonals of the same regularized
inverse.  A time-domain construction on the explicit block-circulant
channel operator is kept as an independent cross-check of the
frequency-domain path (`selective_sinrs_oracle`).

Two conventions for the scaling constant ``c`` in ``I + c H^H H`` are
supported for selective channels: ``"per-tap"`` uses ``rho / (M * L)``
(transmit power split across antennas and taps, consistent with a
unit-average-power input) and ``"paper"`` uses ``rho / M``.  Both coincide
for one tap.  Rescaling rho by a constant shifts outage curves
horizontally and leaves fitted diversity slopes unchanged, so the choice
does not affect diversity results.

All diagonal-of-inverse computations go through a Cholesky factorization
followed by triangular column solves; no cofactor/adjugate inversion is
used anywhere on the primary path.
"""

from __future__ import annotations

import warnings

import numpy as np

from .exceptions import ConfigurationError, NumericalError, NumericalHealthWarning

__all__ = [
    "SCALING_CONVENTIONS",
    "block_circulant_operator",
    "capacity",
    "flat_capacity_batch",
    "flat_sinrs",
    "noise_scaling",
    "numerical_health",
    "selective_capacity_batch",
    "selective_sinrs",
    "selective_sinrs_oracle",
    "spd_inverse_diagonal",
    "transfer_function",
]

SCALING_CONVENTIONS = ("per-tap", "paper")

ORACLE_SIZE_CAP = 512

_NEG_SINR_SLACK = -1e-12

_health = {"evaluations": 0, "clamped_beyond_slack": 0}


def numerical_health():
    """Counters of SINR evaluations and clamps beyond the roundoff slack."""
    return dict(_health)


def noise_scaling(rho, n_streams, n_taps=1, scaling="per-tap"):
    """Scaling constant c in the regularized Gram matrix I + c H^H H."""
    if not np.isfinite(rho) or rho <= 0.0:
        raise ConfigurationError(f"rho must be positive and finite, got {rho}")
    if scaling == "per-tap":
        return rho / (n_streams * n_taps)
    if scaling == "paper":
        return rho / n_streams
    raise ConfigurationError(
        f"unknown scaling convention {scaling!r}; expected one of {SCALING_CONVENTIONS}")


def _cholesky_lower(mats):
    """Batched lower Cholesky factor of Hermitian positive-definite stacks."""
    mats = np.asarray(mats, dtype=complex)
    m = mats.shape[-1]
    lower = np.zeros_like(mats)
    for j in range(m):
        pivot = mats[..., j, j].real - np.sum(
            (lower[..., j, :j] * lower[..., j, :j].conj()).real, axis=-1)
        if not np.all(pivot > 0.0):
            raise NumericalError("Cholesky factorization hit a nonpositive pivot")
        piv_root = np.sqrt(pivot)
        lower[..., j, j] = piv_root
        if j + 1 < m:
            off = mats[..., j + 1:, j] - np.einsum(
                "...ik,...k->...i", lower[..., j + 1:, :j], lower[..., j, :j].conj())
            lower[..., j + 1:, j] = off / piv_root[..., None]
    return lower


def _lower_triangular_inverse(lower):
    """Batched inverse of lower-triangular stacks by forward substitution."""
    m = lower.shape[-1]
    inv = np.zeros_like(lower)
    diag_inv = 1.0 / np.einsum("...ii->...i", lower)
    for j in range(m):
        inv[..., j, j] = diag_inv[..., j]
        for i in range(j + 1, m):
            acc = np.einsum("...k,...k->...", lower[..., i, j:i], inv[..., j:i, j])
            inv[..., i, j] = -acc * diag_inv[..., i]
    return inv


def _diag_inverse_2x2(a, b, c):
    """Inverse diagonal of Hermitian PD [[a, b], [conj(b), c]], Cholesky form.

    Order-2 Cholesky unrolled into whole-array operations: pivots are
    ``a`` and ``c - |b|^2/a``; both must be positive.
    """
    if not np.all(a > 0.0):
        raise NumericalError("Cholesky factorization hit a nonpositive pivot")
    off_sq = (b.real * b.real + b.imag * b.imag) / a
    pivot = c - off_sq
    if not np.all(pivot > 0.0):
        raise NumericalError("Cholesky factorization hit a nonpositive pivot")
    d1 = 1.0 / pivot
    d0 = (1.0 + off_sq * d1) / a
    return d0, d1


def spd_inverse_diagonal(mats):
    """Diagonal of the inverse of Hermitian positive-definite matrices.

    Accepts stacks of shape (..., M, M) and returns real (..., M).  Uses a
    Cholesky factorization and per-column triangular solves (unrolled into
    whole-array operations for M <= 2, looped over columns otherwise).
    """
    mats = np.asarray(mats, dtype=complex)
    m = mats.shape[-1]
    if m == 1:
        pivot = mats[..., 0, 0].real
        if not np.all(pivot > 0.0):
            raise NumericalError("Cholesky factorization hit a nonpositive pivot")
        return (1.0 / pivot)[..., None]
    if m == 2:
        d0, d1 = _diag_inverse_2x2(mats[..., 0, 0].real, mats[..., 0, 1],
                                   mats[..., 1, 1].real)
        return np.stack([d0, d1], axis=-1)
    lower = _cholesky_lower(mats)
    inv = _lower_triangular_inverse(lower)
    return np.sum((inv * inv.conj()).real, axis=-2)


def _regularized_inverse_diagonal(h, c):
    """Diagonal of (I + c H^H H)^{-1} for channel stacks h of shape (..., N, M).

    Avoids materializing the Gram matrices for M <= 2; the generic path
    builds them and goes through `spd_inverse_diagonal`.
    """
    m = h.shape[-1]
    if m == 1:
        col = h[..., 0]
        power = np.sum(col.real * col.real + col.imag * col.imag, axis=-1)
        return (1.0 / (1.0 + c * power))[..., None]
    if m == 2:
        h0 = h[..., 0]
        h1 = h[..., 1]
        s00 = np.sum(h0.real * h0.real + h0.imag * h0.imag, axis=-1)
        s11 = np.sum(h1.real * h1.real + h1.imag * h1.imag, axis=-1)
        s01 = np.sum(h0.conj() * h1, axis=-1)
        d0, d1 = _diag_inverse_2x2(1.0 + c * s00, c * s01, 1.0 + c * s11)
        return np.stack([d0, d1], axis=-1)
    gram = np.einsum("...nj,...nk->...jk", h.conj(), h)
    gram *= c
    idx = np.arange(m)
    gram[..., idx, idx] += 1.0
    return spd_inverse_diagonal(gram)


def _sinrs_from_mse(mse):
    """1/mse - 1, clamped at zero; counts clamps beyond the roundoff slack."""
    beta = 1.0 / mse - 1.0
    _health["evaluations"] += beta.size
    bad = int(np.count_nonzero(beta < _NEG_SINR_SLACK))
    if bad:
        _health["clamped_beyond_slack"] += bad
        warnings.warn(
            f"{bad} SINR value(s) below the {_NEG_SINR_SLACK} roundoff slack "
            "were clamped to zero",
            NumericalHealthWarning, stacklevel=3)
    return np.maximum(beta, 0.0)


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")


def _mse_flat(channels, rho):
    """Per-stream MMSE MSE for (..., N, M) channel stacks."""
    c = noise_scaling(rho, channels.shape[-1])
    return _regularized_inverse_diagonal(channels, c)


def flat_sinrs(channel, rho):
    """Per-stream MMSE SINRs for one flat-fading channel matrix.

    Parameters
    ----------
    channel : (N, M) complex array
        Channel matrix, one column per transmit stream.
    rho : float
        SNR (linear, > 0); the Gram matrix is scaled by rho/M.

    Returns
    -------
    (M,) float array of nonnegative SINRs.
    """
    channel = np.asarray(channel, dtype=complex)
    if channel.ndim != 2:
        raise ValueError(f"expected a 2-D channel matrix, got shape {channel.shape}")
    _check_finite(channel, "channel matrix")
    return _sinrs_from_mse(_mse_flat(channel, rho))


def flat_capacity_batch(channels, rho):
    """MMSE capacity (bits/s/Hz) of each channel in a (..., N, M) stack."""
    channels = np.asarray(channels, dtype=complex)
    beta = _sinrs_from_mse(_mse_flat(channels, rho))
    return np.sum(np.log2(1.0 + beta), axis=-1)


def capacity(sinrs):
    """Sum rate sum_j log2(1 + beta_j) in bits/s/Hz."""
    beta = np.asarray(sinrs, dtype=float)
    if np.any(beta < 0.0):
        raise ValueError("SINRs must be nonnegative")
    return float(np.sum(np.log2(1.0 + beta)))


def transfer_function(taps, n_bins):
    """Entrywise DFT of the zero-padded tap sequence.

    Maps (..., L, N, M) tap stacks to (..., K, N, M) per-bin channel
    matrices, bin k holding ``sum_l taps[l] exp(-2i pi k l / K)``.  Direct
    summation over the L taps; L is small in every intended use.
    """
    taps = np.asarray(taps, dtype=complex)
    n_taps = taps.shape[-3]
    n_bins = int(n_bins)
    if n_bins < n_taps:
        raise ConfigurationError(
            f"block length K={n_bins} must be at least the tap count L={n_taps}")
    grid = np.outer(np.arange(n_taps), np.arange(n_bins))
    twiddle = np.exp(-2j * np.pi * grid / n_bins)
    lead = taps.shape[:-3]
    n_rx, n_tx = taps.shape[-2:]
    flat = taps.reshape(*lead, n_taps, n_rx * n_tx)
    # single GEMM over the tap axis, then bins moved ahead of the entries
    out = np.tensordot(flat, twiddle, axes=([-2], [0]))
    out = np.moveaxis(out, -1, -2)
    return out.reshape(*lead, n_bins, n_rx, n_tx)


def _mse_selective(taps, rho, n_bins, scaling):
    """Per-stream MMSE MSE for (..., L, N, M) tap stacks, averaged over bins."""
    m = taps.shape[-1]
    n_taps = taps.shape[-3]
    c = noise_scaling(rho, m, n_taps, scaling)
    freq = transfer_function(taps, n_bins)
    return _regularized_inverse_diagonal(freq, c).mean(axis=-2)


def selective_sinrs(taps, rho, n_bins, scaling="per-tap"):
    """Per-stream MMSE SINRs for a cyclic-prefix frequency-selective channel.

    Parameters
    ----------
    taps : (L, N, M) complex array
        Channel tap matrices, tap index first.
    rho : float
        SNR (linear, > 0).
    n_bins : int
        Block length K (number of DFT bins); must satisfy K >= L.
    scaling : {"per-tap", "paper"}
        Convention for the constant c in I + c H^H H (see module docstring).

    Returns
    -------
    (M,) float array of nonnegative SINRs: beta_j = 1 / mean_k mse_j(k) - 1.
    """
    taps = np.asarray(taps, dtype=complex)
    if taps.ndim != 3:
        raise ValueError(f"expected taps of shape (L, N, M), got {taps.shape}")
    _check_finite(taps, "channel taps")
    return _sinrs_from_mse(_mse_selective(taps, rho, n_bins, scaling))


def selective_capacity_batch(taps, rho, n_bins, scaling="per-tap"):
    """MMSE capacity (bits/s/Hz) of each realization in a (..., L, N, M) stack."""
    taps = np.asarray(taps, dtype=complex)
    beta = _sinrs_from_mse(_mse_selective(taps, rho, n_bins, scaling))
    return np.sum(np.log2(1.0 + beta), axis=-1)


def block_circulant_operator(taps, n_blocks):
    """Block-circulant channel operator of a cyclic-prefix transmission.

    Returns the (K*N, K*M) matrix whose (t, s) block equals tap
    ``(t - s) mod K`` (zero for lags >= L).
    """
    taps = np.asarray(taps, dtype=complex)
    n_taps, n_rx, n_tx = taps.shape
    n_blocks = int(n_blocks)
    if n_blocks < n_taps:
        raise ConfigurationError(
            f"block length K={n_blocks} must be at least the tap count L={n_taps}")
    out = np.zeros((n_blocks * n_rx, n_blocks * n_tx), dtype=complex)
    for t in range(n_blocks):
        for lag in range(n_taps):
            s = (t - lag) % n_blocks
            out[t * n_rx:(t + 1) * n_rx, s * n_tx:(s + 1) * n_tx] = taps[lag]
    return out


def selective_sinrs_oracle(taps, rho, n_bins, scaling="per-tap"):
    """Time-domain MMSE SINRs on the explicit block-circulant operator.

    Independent cross-check of `selective_sinrs`: builds the (K*N, K*M)
    circulant operator, inverts the regularized time-domain Gram matrix
    directly, and averages the diagonal over the K time slots of each
    stream.  Cost is O((K*M)^3); inputs are capped at K*M <= 512.
    """
    taps = np.asarray(taps, dtype=complex)
    if taps.ndim != 3:
        raise ValueError(f"expected taps of shape (L, N, M), got {taps.shape}")
    _check_finite(taps, "channel taps")
    n_taps, _, n_tx = taps.shape
    n_bins = int(n_bins)
    if n_bins * n_tx > ORACLE_SIZE_CAP:
        raise ConfigurationError(
            f"oracle size cap exceeded: K*M = {n_bins * n_tx} > {ORACLE_SIZE_CAP}")
    op = block_circulant_operator(taps, n_bins)
    c = noise_scaling(rho, n_tx, n_taps, scaling)
    gram = np.eye(n_bins * n_tx) + c * (op.conj().T @ op)
    inv = np.linalg.inv(gram)
    mse = np.real(np.diag(inv)).reshape(n_bins, n_tx).mean(axis=0)
    return _sinrs_from_mse(mse)
