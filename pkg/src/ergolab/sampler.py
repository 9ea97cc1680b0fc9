"""Random ensembles: Ginibre, Haar unitaries, Hilbert-Schmidt and Bures
states, Fubini-Study pure states, GUE/nGUE Hamiltonians, and random k-local
many-body Hamiltonians.

Convention: complex Ginibre entries have Re and Im parts each N(0, 1/2), so
E|G_ij|^2 = 1. Each sampler consumes a fresh generator derived from its
RngStream, so identical (seed, stream_id) pairs reproduce identical draws and
parallel ensembles stay scheduling-independent with per-sample streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .matcore import DensityMatrix, HermitianOperator, MatcoreError

_UINT64_MAX = 2**64 - 1
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class SamplerError(RuntimeError):
    """Sampling failed (degenerate draw after allowed resamples)."""


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream addressed by (seed, stream_id).

    make_generator() returns a fresh generator positioned at the stream start,
    so one stream should feed exactly one sampling call.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer")
            if not 0 <= int(value) <= _UINT64_MAX:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def make_generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class LocalHamiltonianSpec:
    """Random k-local Hamiltonian layout on n_sites subsystems."""

    n_sites: int
    k: int
    n_terms: int
    c: float = 1.0
    local_dim: int = 2

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if self.local_dim < 2:
            raise ValueError("local_dim must be at least 2")
        if not 1 <= self.k <= self.n_sites:
            raise ValueError("need 1 <= k <= n_sites")
        if self.n_terms < 1:
            raise ValueError("n_terms must be positive")
        if not self.c > 0:
            raise ValueError("per-term norm cap c must be positive")
        if self.total_dim > config.DIM_CAP:
            raise MatcoreError(
                f"total dimension {self.total_dim} exceeds the dense cap {config.DIM_CAP}"
            )

    @property
    def total_dim(self) -> int:
        return self.local_dim**self.n_sites


def _check_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if d > config.DIM_CAP:
        raise MatcoreError(f"dimension {d} exceeds the dense cap {config.DIM_CAP}")
    return int(d)


# Two internal layers shared by the public single-draw API (n=1) and the
# experiment engine: draw helpers consume a live Generator in a fixed order
# that is part of the reproducibility contract, while the _from_* math layer
# is pure array code operating on stacked draws.


def _ginibre_block(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = gen.standard_normal((n, d, d, 2)).view(np.complex128).reshape(n, d, d)
    g *= _INV_SQRT2
    return g


def _gaussian_vectors(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    return gen.standard_normal((n, d, 2)).view(np.complex128).reshape(n, d)


def _haar_from_ginibre(g: np.ndarray, regen=None) -> np.ndarray:
    """QR of a Ginibre stack with the R-diagonal phase fix.

    regen(count) must return replacement Ginibre draws for the measure-zero
    zero-diagonal case; without it that case is an error.
    """
    q, r = np.linalg.qr(g)
    diag = np.einsum("nii->ni", r).copy()
    mags = np.abs(diag)
    for _ in range(3):
        bad = np.where(np.any(mags == 0.0, axis=1))[0]
        if bad.size == 0:
            break
        if regen is None:
            raise SamplerError("QR produced a zero diagonal")
        q_new, r_new = np.linalg.qr(regen(bad.size))
        q[bad] = q_new
        diag[bad] = np.einsum("nii->ni", r_new)
        mags = np.abs(diag)
    else:
        raise SamplerError("QR repeatedly produced a zero diagonal")
    phases = diag / mags
    return q * phases[:, None, :]


def _hs_from_ginibre(g: np.ndarray) -> np.ndarray:
    a = g @ g.conj().transpose(0, 2, 1)
    tr = np.einsum("nii->n", a).real
    return a / tr[:, None, None]


def _bures_from_parts(g: np.ndarray, g_for_u: np.ndarray, regen=None) -> np.ndarray:
    u = _haar_from_ginibre(g_for_u, regen=regen)
    b = g + u @ g
    a = b @ b.conj().transpose(0, 2, 1)
    tr = np.einsum("nii->n", a).real
    if np.any(tr <= 0.0):
        raise SamplerError("Bures construction produced a zero-trace matrix")
    return a / tr[:, None, None]


def _pure_from_vectors(psi: np.ndarray, regen=None) -> np.ndarray:
    psi = psi.copy()
    norms = np.linalg.norm(psi, axis=1)
    for _ in range(3):
        bad = np.where(norms == 0.0)[0]
        if bad.size == 0:
            break
        if regen is None:
            raise SamplerError("zero state vector")
        psi[bad] = regen(bad.size)
        norms = np.linalg.norm(psi, axis=1)
    else:
        raise SamplerError("repeatedly drew a zero state vector")
    psi /= norms[:, None]
    return psi[:, :, None] * psi.conj()[:, None, :]


def _gue_from_ginibre(g: np.ndarray) -> np.ndarray:
    return (g + g.conj().transpose(0, 2, 1)) / 2


def _ngue_spectra_from_gue(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues mapped onto [0, 1] plus the GUE eigenvectors."""
    vals, vecs = np.linalg.eigh(h)
    lo = vals[:, :1]
    spread = vals[:, -1:] - lo
    if np.any(spread <= 0.0):
        raise SamplerError("degenerate GUE spectrum (zero spread)")
    return (vals - lo) / spread, vecs


def _haar_block(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    g = _ginibre_block(gen, n, d)
    return _haar_from_ginibre(g, regen=lambda m: _ginibre_block(gen, m, d))


def _hs_block(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    return _hs_from_ginibre(_ginibre_block(gen, n, d))


def _bures_block(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    regen = lambda m: _ginibre_block(gen, m, d)
    try:
        g = _ginibre_block(gen, n, d)
        g_u = _ginibre_block(gen, n, d)
        return _bures_from_parts(g, g_u, regen=regen)
    except SamplerError:
        # zero trace is measure-zero; one full retry, then give up
        g = _ginibre_block(gen, n, d)
        g_u = _ginibre_block(gen, n, d)
        return _bures_from_parts(g, g_u, regen=regen)


def _pure_block(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    psi = _gaussian_vectors(gen, n, d)
    return _pure_from_vectors(psi, regen=lambda m: _gaussian_vectors(gen, m, d))


def _gue_block(gen: np.random.Generator, n: int, d: int) -> np.ndarray:
    return _gue_from_ginibre(_ginibre_block(gen, n, d))


def _ngue_spectra_block(
    gen: np.random.Generator, n: int, d: int
) -> tuple[np.ndarray, np.ndarray]:
    return _ngue_spectra_from_gue(_gue_block(gen, n, d))


_STATE_BLOCKS = {
    "hilbert_schmidt": _hs_block,
    "bures": _bures_block,
    "pure": _pure_block,
}


# Public single-draw API.


def sample_ginibre(d: int, rng: RngStream) -> np.ndarray:
    """Square complex Ginibre matrix with unit-variance entries."""
    d = _check_dim(d)
    return _ginibre_block(rng.make_generator(), 1, d)[0]


def sample_haar_unitary(d: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed unitary via QR with the R-diagonal phase fix."""
    d = _check_dim(d)
    return _haar_block(rng.make_generator(), 1, d)[0]


def sample_hs_state(d: int, rng: RngStream) -> DensityMatrix:
    """State from the Hilbert-Schmidt measure: GG†/tr(GG†)."""
    d = _check_dim(d)
    return DensityMatrix(_hs_block(rng.make_generator(), 1, d)[0])


def sample_bures_state(d: int, rng: RngStream) -> DensityMatrix:
    """State from the Bures measure: (1+U)GG†(1+U†), normalized."""
    d = _check_dim(d)
    return DensityMatrix(_bures_block(rng.make_generator(), 1, d)[0])


def sample_pure_state(d: int, rng: RngStream) -> DensityMatrix:
    """Fubini-Study pure state as a rank-1 projector."""
    d = _check_dim(d)
    return DensityMatrix(_pure_block(rng.make_generator(), 1, d)[0])


def sample_gue(d: int, rng: RngStream) -> HermitianOperator:
    """GUE matrix (G + G†)/2 under the unit-entry-variance convention."""
    d = _check_dim(d)
    return HermitianOperator(_gue_block(rng.make_generator(), 1, d)[0])


def sample_ngue_hamiltonian(d: int, rng: RngStream) -> HermitianOperator:
    """GUE draw with its spectrum affinely mapped onto [0, 1]."""
    d = _check_dim(d)
    if d < 2:
        raise ValueError("nGUE needs dimension at least 2")
    vals, vecs = _ngue_spectra_block(rng.make_generator(), 1, d)
    m = (vecs[0] * vals[0]) @ vecs[0].conj().T
    return HermitianOperator((m + m.conj().T) / 2)


def _embed_on_sites(
    block: np.ndarray, sites: np.ndarray, n_sites: int, local_dim: int
) -> np.ndarray:
    """Embed an operator on the given (ascending) sites, identity elsewhere."""
    q = local_dim
    k = len(sites)
    rest = [s for s in range(n_sites) if s not in set(int(x) for x in sites)]
    full = np.kron(block, np.eye(q ** (n_sites - k), dtype=np.complex128))
    # axis j of the site tensor currently carries (sites + rest)[j]
    order = [int(s) for s in sites] + rest
    perm = np.argsort(order)
    t = full.reshape((q,) * (2 * n_sites))
    t = t.transpose(tuple(perm) + tuple(p + n_sites for p in perm))
    return np.ascontiguousarray(t.reshape(q**n_sites, q**n_sites))


def build_k_local_hamiltonian(
    spec: LocalHamiltonianSpec, rng: RngStream, return_triangle_bound: bool = False
):
    """Sum of random k-local terms, each a GUE block scaled to norm c on a
    uniformly chosen k-subset of sites.

    With return_triangle_bound=True also returns sum_a ||h_a||, the triangle
    upper bound on the total operator norm (= n_terms * c here).
    """
    op = _build_k_local_from_gen(spec, rng.make_generator())
    if return_triangle_bound:
        return op, spec.n_terms * spec.c
    return op


def _build_k_local_from_gen(
    spec: LocalHamiltonianSpec, gen: np.random.Generator
) -> HermitianOperator:
    q = spec.local_dim
    dim_block = q**spec.k
    total = np.zeros((spec.total_dim, spec.total_dim), dtype=np.complex128)
    for _ in range(spec.n_terms):
        sites = np.sort(gen.choice(spec.n_sites, size=spec.k, replace=False))
        block = _gue_block(gen, 1, dim_block)[0]
        norm = float(np.max(np.abs(np.linalg.eigvalsh(block))))
        if norm == 0.0:
            block = _gue_block(gen, 1, dim_block)[0]
            norm = float(np.max(np.abs(np.linalg.eigvalsh(block))))
            if norm == 0.0:
                raise SamplerError("GUE term collapsed to zero twice")
        block *= spec.c / norm
        total += _embed_on_sites(block, sites, spec.n_sites, q)
    return HermitianOperator((total + total.conj().T) / 2)
