"""Dense complex-matrix kernel: Hermitian eigendecompositions, PSD square
roots, Schatten norms, and validated density-matrix construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config


class MatcoreError(ValueError):
    """Base class for matrix-kernel validation failures."""


class ComplexMatrixError(MatcoreError):
    """Shape, finiteness, or dimension-cap violation."""


class HermiticityError(MatcoreError):
    """Anti-Hermitian part beyond tolerance."""


class TraceError(MatcoreError):
    """Trace differs from one beyond tolerance."""


class PositivityError(MatcoreError):
    """Eigenvalue below the PSD error floor."""


class EigenSolverError(RuntimeError):
    """Eigensolver failed to converge; carries a diagnostic summary."""


def _as_square_complex(entries) -> np.ndarray:
    a = np.array(entries, dtype=np.complex128, copy=True, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ComplexMatrixError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ComplexMatrixError("empty matrix")
    if a.shape[0] > config.DIM_CAP:
        raise ComplexMatrixError(
            f"dimension {a.shape[0]} exceeds the dense cap {config.DIM_CAP}"
        )
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ComplexMatrixError("matrix entries must be finite")
    return a


def _skew_scale(a: np.ndarray) -> tuple[float, float]:
    skew = float(np.max(np.abs(a - a.conj().T)))
    scale = max(1.0, float(np.max(np.abs(a))))
    return skew, scale


def _eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        d = a.shape[0]
        summary = f"dim={d}, max|entry|={np.max(np.abs(a)):.3e}, trace={np.trace(a):.6e}"
        raise EigenSolverError(f"eigendecomposition failed ({summary})") from exc


@dataclass(frozen=True)
class HermitianOperator:
    """d x d complex Hermitian matrix, symmetrized on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        a = _as_square_complex(self.matrix)
        skew, scale = _skew_scale(a)
        if skew > config.HERM_BUILD_ATOL * scale:
            raise HermiticityError(
                f"anti-Hermitian part {skew:.3e} exceeds {config.HERM_BUILD_ATOL:g} x {scale:g}"
            )
        sym = (a + a.conj().T) / 2
        sym.setflags(write=False)
        object.__setattr__(self, "matrix", sym)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> Spectrum:
        return hermitian_eig(self)


@dataclass(frozen=True)
class DensityMatrix:
    """Quantum state: Hermitian, unit trace, PSD up to a 1e-10 noise window.

    Positivity is enforced lazily: construction checks hermiticity and trace,
    spectral access clips eigenvalues in [-EIG_CLIP, 0) to zero and rejects
    anything below the PSD error floor.
    """

    matrix: np.ndarray

    def __post_init__(self):
        a = _as_square_complex(self.matrix)
        skew, scale = _skew_scale(a)
        if skew > config.HERM_BUILD_ATOL * scale:
            raise HermiticityError(
                f"anti-Hermitian part {skew:.3e} exceeds {config.HERM_BUILD_ATOL:g} x {scale:g}"
            )
        tr = complex(np.trace(a))
        if abs(tr - 1.0) > config.TRACE_BUILD_ATOL:
            raise TraceError(f"trace {tr:.12g} differs from 1 beyond {config.TRACE_BUILD_ATOL:g}")
        sym = (a + a.conj().T) / 2
        sym.setflags(write=False)
        object.__setattr__(self, "matrix", sym)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues with the PSD noise window clipped to zero."""
        vals = np.linalg.eigvalsh(self.matrix)
        return _clip_psd_noise(vals)

    def spectrum(self) -> Spectrum:
        vals, vecs = _eigh(self.matrix)
        return Spectrum(values=_clip_psd_noise(vals), vectors=vecs)


def _clip_psd_noise(vals: np.ndarray) -> np.ndarray:
    low = float(vals[0])
    if low < config.PSD_ERROR_FLOOR:
        raise PositivityError(
            f"eigenvalue {low:.3e} below the PSD floor {config.PSD_ERROR_FLOOR:g}"
        )
    out = vals.copy()
    np.clip(out, 0.0, None, out=out)
    return out


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with aligned orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vecs = np.asarray(self.vectors, dtype=np.complex128)
        d = vals.shape[0]
        if vals.ndim != 1 or vecs.shape != (d, d):
            raise ComplexMatrixError("spectrum shape mismatch")
        if np.any(np.diff(vals) < 0):
            raise MatcoreError("eigenvalues must be non-decreasing")
        gram = vecs.conj().T @ vecs
        if np.max(np.abs(gram - np.eye(d))) > config.ORTHO_ATOL:
            raise MatcoreError("eigenvector columns are not orthonormal")
        vals.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.vectors
        return (v * self.values) @ v.conj().T


def hermitian_eig(A: HermitianOperator) -> Spectrum:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    vals, vecs = _eigh(A.matrix)
    return Spectrum(values=vals, vectors=vecs)


def psd_sqrt(A: HermitianOperator) -> HermitianOperator:
    """Positive-semidefinite square root via the spectral decomposition."""
    vals, vecs = _eigh(A.matrix)
    if float(vals[0]) < config.PSD_ERROR_FLOOR:
        raise PositivityError(
            f"not PSD: eigenvalue {vals[0]:.3e} below {config.PSD_ERROR_FLOOR:g}"
        )
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    return HermitianOperator((root + root.conj().T) / 2)


def schatten_norm(A, p) -> float:
    """Schatten p-norm: (sum s_i^p)^(1/p) over singular values; p=inf gives max s_i.

    Accepts a raw array or any wrapper exposing .matrix. Hermitian inputs use
    |eigenvalues| directly.
    """
    a = np.asarray(getattr(A, "matrix", A), dtype=np.complex128)
    a = _as_square_complex(a)
    inf = p in ("inf", np.inf) or p == float("inf")
    if not inf:
        p = float(p)
        if not p >= 1.0:
            raise MatcoreError(f"Schatten order must be >= 1 or inf, got {p}")
    skew, scale = _skew_scale(a)
    if skew <= config.HERM_BUILD_ATOL * scale:
        try:
            s = np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2))
        except np.linalg.LinAlgError as exc:
            raise EigenSolverError(f"eigvalsh failed (dim={a.shape[0]})") from exc
    else:
        try:
            s = np.linalg.svd(a, compute_uv=False)
        except np.linalg.LinAlgError as exc:
            raise EigenSolverError(f"svd failed (dim={a.shape[0]})") from exc
    if inf:
        return float(np.max(s))
    if p == 1.0:
        return float(np.sum(s))
    return float(np.sum(s**p) ** (1.0 / p))


def validate_density(M) -> DensityMatrix:
    """Validate a foreign matrix as a quantum state and return a DensityMatrix.

    Symmetrizes within the 1e-8 validation gate, requires trace within 1e-8 of
    one, clips negative eigenvalues above the PSD floor to zero, and
    renormalizes the trace. The returned matrix is rebuilt from the clipped
    spectrum, so it satisfies the stricter construction invariants.
    """
    a = _as_square_complex(getattr(M, "matrix", M))
    skew, scale = _skew_scale(a)
    if skew > config.HERM_VALIDATE_ATOL * scale:
        raise HermiticityError(
            f"anti-Hermitian part {skew:.3e} exceeds validation gate {config.HERM_VALIDATE_ATOL:g}"
        )
    sym = (a + a.conj().T) / 2
    tr = float(np.trace(sym).real)
    if abs(tr - 1.0) > config.TRACE_VALIDATE_ATOL:
        raise TraceError(f"trace {tr:.12g} differs from 1 beyond {config.TRACE_VALIDATE_ATOL:g}")
    vals, vecs = _eigh(sym)
    if float(vals[0]) < config.PSD_ERROR_FLOOR:
        raise PositivityError(
            f"eigenvalue {vals[0]:.3e} below the PSD floor {config.PSD_ERROR_FLOOR:g}"
        )
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    rebuilt = (vecs * vals) @ vecs.conj().T
    return DensityMatrix((rebuilt + rebuilt.conj().T) / 2)
