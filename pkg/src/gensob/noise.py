"""Gaussian white noise on the 1- and 2-torus.

Sampling uses one counter-based stream (Philox) keyed by the seed, so a
sample is a pure function of (dim, N, seed) and identical under any thread
or process schedule.  The noise is drawn as i.i.d. standard normals on the
sample grid and transformed with the unitary-variance scaling
``fftn(x)/sqrt(N_total)``, which makes every coefficient unit-variance:
the zero and Nyquist bins are real N(0,1), every other coefficient is
(a+ib)/sqrt(2) with independent standard normal a, b, and conjugate
symmetry is exact.

Pairing convention (fixing the covariance constant at exactly C):
``pairing(xi, v) = sum_k xi_k conj(v_k)`` and the test-field inner product
is antilinear in its first slot, ``inner(v1, v2) = sum_k conj(v1_k) v2_k``;
then E[pairing(xi, v1) * conj(pairing(xi, v2))] = C * inner(v1, v2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import SpectralField, hermitian_part, nikolskii_norm


@dataclass(frozen=True)
class NoiseSample:
    field: SpectralField
    seed: int
    n: int
    dim: int
    variance: float = 1.0


@dataclass(frozen=True)
class CovarianceResult:
    empirical: complex
    expected: complex
    z_score: float
    n_samples: int


@dataclass(frozen=True)
class RegularityRow:
    dim: int
    s: float
    n: int
    seed_count: int
    median: float
    q25: float
    q75: float


def sample_white_noise(dim: int, n: int, seed: int, variance: float = 1.0) -> NoiseSample:
    """Truncated white noise realization; deterministic given (dim, N, seed)."""
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError("N must be a power of two")
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    x = rng.standard_normal((n,) * dim)
    coeffs = np.fft.fftn(x) / np.sqrt(x.size) * np.sqrt(variance)
    coeffs = hermitian_part(coeffs)
    field = SpectralField(dim=dim, n=n, coeffs=coeffs, hermitian=True)
    return NoiseSample(field=field, seed=int(seed), n=n, dim=dim, variance=variance)


def pairing(sample, test_field: SpectralField) -> complex:
    """xi(v) = sum_k xi_k conj(v_k)."""
    field = sample.field if isinstance(sample, NoiseSample) else sample
    return complex(np.vdot(test_field.coeffs, field.coeffs))


def inner(v1: SpectralField, v2: SpectralField) -> complex:
    """Test-field inner product, antilinear in the first slot."""
    return complex(np.vdot(v1.coeffs, v2.coeffs))


def covariance_check(samples, v1: SpectralField, v2: SpectralField) -> CovarianceResult:
    """Empirical vs expected covariance of the pairings against (v1, v2).

    The z-score uses the sample variance of the per-sample products
    xi(v1) * conj(xi(v2)); deviations in both real and imaginary parts are
    folded into the complex magnitude.
    """
    if len(samples) < 1000:
        raise ValueError(f"need at least 1000 samples, got {len(samples)}")
    cs = {s.variance for s in samples}
    if len(cs) != 1:
        raise ValueError("samples mix variance conventions")
    prods = np.array([pairing(s, v1) * np.conj(pairing(s, v2)) for s in samples])
    emp = complex(prods.mean())
    expected = cs.pop() * inner(v1, v2)
    nn = len(prods)
    var = float(np.sum(np.abs(prods - emp) ** 2)) / (nn - 1)
    z = abs(emp - expected) / np.sqrt(var / nn) if var > 0 else np.inf * abs(emp - expected)
    if var == 0.0 and emp == expected:
        z = 0.0
    return CovarianceResult(empirical=emp, expected=expected, z_score=float(z), n_samples=nn)


def regularity_norms(dim: int, s: float, n: int, seeds) -> np.ndarray:
    """Dyadic-sup norms of fresh noise samples, one per seed, in seed order."""
    return np.array([nikolskii_norm(sample_white_noise(dim, n, seed).field, s) for seed in seeds])


def regularity_sweep(dim: int, s: float, n_list, n_seeds: int, seed_base: int = 0):
    """Per-N quartile statistics of the dyadic-sup norm over a seed ensemble.

    At s = -dim/2 the medians are truncation-stable; slightly above, the
    median grows like N^(s + dim/2) (block energies scale as 2^((2s+dim) j)).
    """
    if n_seeds < 100:
        raise ValueError("n_seeds >= 100 required for stable quartiles")
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    seeds = [seed_base + i for i in range(n_seeds)]
    rows = []
    for n in n_list:
        norms = regularity_norms(dim, s, n, seeds)
        q25, med, q75 = np.percentile(norms, [25.0, 50.0, 75.0])
        rows.append(
            RegularityRow(dim=dim, s=s, n=n, seed_count=n_seeds,
                          median=float(med), q25=float(q25), q75=float(q75))
        )
    return rows
