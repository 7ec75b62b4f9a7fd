"""Discrete periodic fields on the 1- and 2-torus and their weighted norms.

All conventions live here:

* Frequencies are integer vectors with every component in [-N/2, N/2 - 1]
  (FFT index order; the Nyquist line is stored once, at -N/2, and is its own
  conjugate, so hermitian fields carry real values there and at k = 0).
* Analysis transform: ``coeffs = fftn(samples) / N_total``, so the constant
  field 1 has the single coefficient 1 at k = 0 and Parseval reads
  ``sum |coeffs|^2 = (1/N_total) sum |samples|^2`` (unit constant).
* ``chi(k) = sqrt(1 + |k|^2) >= 1`` is the weight argument at frequency k.
* Weighted norm: ``halpha_norm(w, alpha)^2 = sum_k alpha(chi(k))^2 |w_k|^2``
  (counting measure over frequencies); with ``alpha = Power(r)`` this is the
  Sobolev norm of order r.
* Dyadic blocks: ``Q_0 = {|k| <= 1}``, ``Q_j = {2^(j-1) < |k| <= 2^j}``
  (strict lower, inclusive upper); the dyadic-sup norm of order s is
  ``sup_j 4^(s j) sum_{Q_j} |w_k|^2``, square-rooted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .weights import WeightExpr


def _check_size(n: int):
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"N must be a power of two >= 2, got {n}")


def freq_1d(n: int) -> np.ndarray:
    """Integer frequencies in FFT order: 0..N/2-1, -N/2..-1."""
    return np.concatenate([np.arange(0, n // 2), np.arange(-n // 2, 0)])


def ksq_grid(dim: int, n: int) -> np.ndarray:
    """|k|^2 as int64, shaped like the coefficient array."""
    k = freq_1d(n).astype(np.int64)
    if dim == 1:
        return k * k
    if dim == 2:
        kx, ky = np.meshgrid(k, k, indexing="ij")
        return kx * kx + ky * ky
    raise ValueError("dim must be 1 or 2")


def chi_grid(dim: int, n: int) -> np.ndarray:
    return np.sqrt(1.0 + ksq_grid(dim, n))


def _flip_index(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def hermitian_part(coeffs: np.ndarray) -> np.ndarray:
    """Project onto exactly conjugate-symmetric coefficients."""
    idx = _flip_index(coeffs.shape[0])
    if coeffs.ndim == 1:
        flipped = coeffs[idx]
    else:
        flipped = coeffs[np.ix_(idx, idx)]
    return 0.5 * (coeffs + np.conj(flipped))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex Fourier coefficients of a periodic field; immutable carrier."""

    dim: int
    n: int
    coeffs: np.ndarray
    hermitian: bool

    def __post_init__(self):
        _check_size(self.n)
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        expected = (self.n,) * self.dim
        if self.coeffs.shape != expected:
            raise ValueError(f"coeffs shape {self.coeffs.shape} != {expected}")
        if self.coeffs.dtype != np.complex128:
            raise ValueError("coeffs must be complex128")
        if self.hermitian:
            sym = hermitian_part(self.coeffs)
            if not np.array_equal(sym, self.coeffs):
                raise ValueError("hermitian flag set but symmetry is not exact")
        self.coeffs.setflags(write=False)

    @property
    def n_total(self) -> int:
        return self.n**self.dim

    def to_samples(self) -> np.ndarray:
        """Grid samples; real array when the field is hermitian."""
        vals = np.fft.ifftn(self.coeffs) * self.n_total
        return vals.real if self.hermitian else vals

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def field_from_samples(samples) -> SpectralField:
    """Analysis transform of grid samples; real input yields an exactly
    hermitian field (the symmetrization only removes FFT rounding dust)."""
    arr = np.asarray(samples)
    dim = arr.ndim
    if dim not in (1, 2):
        raise ValueError("samples must be a 1- or 2-dimensional grid")
    n = arr.shape[0]
    _check_size(n)
    if dim == 2 and arr.shape != (n, n):
        raise ValueError(f"2-d sample grid must be square, got {arr.shape}")
    hermitian = not np.iscomplexobj(arr)
    coeffs = np.fft.fftn(arr) / arr.size
    if hermitian:
        coeffs = hermitian_part(coeffs)
    return SpectralField(dim=dim, n=n, coeffs=coeffs, hermitian=hermitian)


def field_from_modes(dim: int, n: int, modes: dict, hermitian: bool = False) -> SpectralField:
    """Field with the given {frequency: coefficient} entries, zeros elsewhere.

    With hermitian=True the conjugate entries are filled in automatically.
    """
    _check_size(n)
    coeffs = np.zeros((n,) * dim, dtype=np.complex128)
    for k, val in modes.items():
        idx = (int(k) % n,) if dim == 1 else tuple(int(c) % n for c in k)
        coeffs[idx] = val
    if hermitian:
        idx = _flip_index(n)
        flipped = coeffs[idx] if dim == 1 else coeffs[np.ix_(idx, idx)]
        merged = np.where(flipped != 0, np.conj(flipped), coeffs)
        merged = np.where(coeffs != 0, coeffs, merged)
        coeffs = hermitian_part(merged)
    return SpectralField(dim=dim, n=n, coeffs=coeffs, hermitian=hermitian)


def random_field(dim: int, n: int, seed: int, decay: float = 1.5, hermitian: bool = True) -> SpectralField:
    """Seeded random field with |coeffs| ~ chi^-decay; exactly hermitian by default."""
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    shape = (n,) * dim
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    coeffs = z * chi_grid(dim, n) ** (-decay)
    if hermitian:
        coeffs = hermitian_part(coeffs)
    return SpectralField(dim=dim, n=n, coeffs=coeffs, hermitian=hermitian)


# ---------------------------------------------------------------------------
# dyadic blocks
# ---------------------------------------------------------------------------


class DyadicBlocks:
    """Partition of the frequency lattice into dyadic annuli.

    Block 0 holds |k| <= 1; block j holds 2^(j-1) < |k| <= 2^j.  Together the
    blocks cover every stored frequency exactly once.
    """

    def __init__(self, dim: int, n: int):
        _check_size(n)
        self.dim = dim
        self.n = n
        ksq = ksq_grid(dim, n)
        jmap = np.zeros(ksq.shape, dtype=np.int64)
        big = ksq > 1
        # smallest j with |k|^2 <= 4^j; exact at powers of two
        jmap[big] = np.ceil(np.log2(ksq[big].astype(float)) / 2.0).astype(np.int64)
        self.jmap = jmap
        self.counts = np.bincount(jmap.ravel())
        self.n_blocks = len(self.counts)

    def block_indices(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.jmap.ravel() == j)

    def energies(self, field: SpectralField) -> np.ndarray:
        w2 = np.abs(field.coeffs.ravel()) ** 2
        return np.bincount(self.jmap.ravel(), weights=w2, minlength=self.n_blocks)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def halpha_norm(field: SpectralField, alpha: WeightExpr) -> float:
    """Weighted spectral norm (sum_k alpha(chi)^2 |w_k|^2)^(1/2)."""
    logchi = 0.5 * np.log1p(ksq_grid(field.dim, field.n).astype(float))
    a2 = np.exp(2.0 * alpha.log_value(logchi))
    return float(np.sqrt(np.sum(a2 * np.abs(field.coeffs) ** 2)))


def nikolskii_norm(field: SpectralField, s: float) -> float:
    """Dyadic-sup norm of order s: sqrt(sup_j 4^(s j) * block energy j)."""
    blocks = DyadicBlocks(field.dim, field.n)
    e = blocks.energies(field)
    j = np.arange(blocks.n_blocks, dtype=float)
    return float(np.sqrt(np.max(4.0 ** (s * j) * e)))


def extremal_nikolskii_field(n: int, s: float, dim: int = 1) -> SpectralField:
    """Block-flat field with unit dyadic-sup norm: |w_k| = 2^(-s j) / sqrt(#Q_j).

    Phases are +1, so the field is real-symmetric and exactly hermitian, and
    every block contributes energy 4^(-s j).
    """
    if n < 4:
        raise ValueError("N >= 4 required")
    blocks = DyadicBlocks(dim, n)
    j = blocks.jmap.astype(float)
    mags = 2.0 ** (-s * j) / np.sqrt(blocks.counts[blocks.jmap])
    return SpectralField(dim=dim, n=n, coeffs=mags.astype(np.complex128), hermitian=True)


def interp_norm(field: SpectralField, r0: float, r1: float, psi: WeightExpr) -> float:
    """Interpolation-space norm on the diagonal spectral model.

    The generating operator of the Sobolev pair (r0, r1) acts as
    multiplication by chi^(r1-r0), so the norm is
    (sum chi^(2 r0) psi(chi^(r1-r0))^2 |w_k|^2)^(1/2).  With
    psi = interp_param(alpha, r0, r1) this equals halpha_norm(field, alpha).
    """
    if not r0 < r1:
        raise ValueError("requires r0 < r1")
    logchi = 0.5 * np.log1p(ksq_grid(field.dim, field.n).astype(float))
    vals = np.exp(2.0 * (r0 * logchi + psi.log_value((r1 - r0) * logchi)))
    return float(np.sqrt(np.sum(vals * np.abs(field.coeffs) ** 2)))


# ---------------------------------------------------------------------------
# embedding-ratio sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioRow:
    n: int
    ratio: float
    constant_bound: float | None
    verdict: str


@dataclass(frozen=True)
class RatioSweep:
    rows: tuple
    embedding: object  # NikolskiiEmbedding
    slack: float

    @property
    def ratios(self):
        return np.array([row.ratio for row in self.rows])


def embedding_ratio_sweep(alpha: WeightExpr, s: float, n_list, dim: int = 1,
                          k_max: int = 60, slack: float = 0.1) -> RatioSweep:
    """Extremal-field norm ratios R(N) = ||v_N||_alpha / ||v_N||_(s,sup).

    In the convergent regime R(N)^2 stays below the truncated embedding
    constant (within the block-edge slack); in the divergent regime R(N)
    increases strictly with N.
    """
    from .weights import embed_nikolskii

    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    emb = embed_nikolskii(alpha, s, k_max)
    bound = None if emb.constant is None else float(np.sqrt(emb.constant * (1.0 + slack)))
    rows = []
    prev = -np.inf
    for n in n_list:
        v = extremal_nikolskii_field(n, s, dim)
        ratio = halpha_norm(v, alpha) / nikolskii_norm(v, s)
        if emb.converges:
            verdict = "bounded" if bound is not None and ratio <= bound else "exceeds"
        else:
            verdict = "increasing" if ratio > prev else "not-increasing"
        rows.append(RatioRow(n=n, ratio=float(ratio), constant_bound=bound, verdict=verdict))
        prev = ratio
    return RatioSweep(rows=tuple(rows), embedding=emb, slack=slack)


# ---------------------------------------------------------------------------
# serialization: JSON metadata + little-endian complex64 blob
# ---------------------------------------------------------------------------


def save_field(field: SpectralField, path) -> None:
    """Write <path>.json metadata and <path>.bin little-endian complex64 blob."""
    path = Path(path)
    blob = path.with_suffix(".bin")
    meta = {
        "dim": field.dim,
        "n": field.n,
        "hermitian": field.hermitian,
        "dtype": "complex64-le",
        "blob": blob.name,
    }
    path.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True, indent=2))
    blob.write_bytes(np.ascontiguousarray(field.coeffs.astype("<c8")).tobytes())


def load_field(path) -> SpectralField:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    raw = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype="<c8")
    coeffs = raw.astype(np.complex128).reshape((meta["n"],) * meta["dim"])
    if meta["hermitian"]:
        coeffs = hermitian_part(coeffs)
    return SpectralField(dim=meta["dim"], n=meta["n"], coeffs=coeffs, hermitian=meta["hermitian"])
