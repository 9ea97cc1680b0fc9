"""Thermodynamic functionals: passive states, ergotropy, extraction
unitaries, von Neumann entropy, work variance, and NSR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .matcore import DensityMatrix, HermitianOperator, hermitian_eig


@dataclass(frozen=True)
class ErgotropyResult:
    """Ergotropy split into its energy bookkeeping."""

    ergotropy: float
    initial_energy: float
    passive_energy: float


@dataclass(frozen=True)
class WorkStatistics:
    """First two moments of the extracted work; nsr is None when the mean is
    too small for a meaningful ratio."""

    mean: float
    variance: float
    nsr: float | None

    @property
    def nsr_defined(self) -> bool:
        return self.nsr is not None


def _check_pair(rho: DensityMatrix, H: HermitianOperator) -> None:
    if rho.dim != H.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, Hamiltonian {H.dim}")


def _entropy_from_vals(vals: np.ndarray) -> np.ndarray:
    """Shannon entropy of eigenvalue rows, nats, zeros skipped."""
    v = np.clip(vals, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = v * np.log(v)
    terms = np.where(v > 0.0, terms, 0.0)
    return -np.sum(terms, axis=-1)


def passive_state(rho: DensityMatrix, H: HermitianOperator) -> DensityMatrix:
    """Descending state eigenvalues paired with ascending energy levels."""
    _check_pair(rho, H)
    lam = rho.eigenvalues()
    lam = lam / lam.sum()
    energy_basis = hermitian_eig(H).vectors
    lam_desc = lam[::-1]
    m = (energy_basis * lam_desc) @ energy_basis.conj().T
    return DensityMatrix((m + m.conj().T) / 2)


def ergotropy(rho: DensityMatrix, H: HermitianOperator) -> ErgotropyResult:
    """Ergotropy tr(rho H) - tr(rho_passive H), clipped at numerical zero."""
    _check_pair(rho, H)
    initial = float(np.einsum("ij,ji->", rho.matrix, H.matrix).real)
    lam_asc = np.linalg.eigvalsh(rho.matrix)
    energies = np.linalg.eigvalsh(H.matrix)
    passive = float(np.dot(lam_asc[::-1], energies))
    raw = initial - passive
    if raw < -config.SWEEP_SLACK:
        raise RuntimeError(f"negative ergotropy {raw:.3e}; sorted pairing is broken")
    return ErgotropyResult(
        ergotropy=max(raw, 0.0), initial_energy=initial, passive_energy=passive
    )


def extraction_unitary(rho: DensityMatrix, H: HermitianOperator) -> np.ndarray:
    """Unitary mapping rho onto its passive state.

    Built as V_H P V_rho† with P the descending-to-ascending pairing; returns
    the identity when rho is already passive within trace norm 1e-10.
    """
    _check_pair(rho, H)
    d = rho.dim
    passive = passive_state(rho, H)
    gap = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - passive.matrix)))
    if 2.0 * gap <= config.PASSIVE_CANON_ATOL:
        return np.eye(d, dtype=np.complex128)
    v_rho = hermitian_eig(HermitianOperator(rho.matrix)).vectors
    v_h = hermitian_eig(H).vectors
    return v_h[:, ::-1] @ v_rho.conj().T


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -sum lambda ln lambda in nats, PSD noise clipped."""
    return float(_entropy_from_vals(rho.eigenvalues()))


def normalized_entropy(rho: DensityMatrix) -> float:
    """Entropy divided by its maximum ln d."""
    if rho.dim < 2:
        raise ValueError("normalized entropy needs dimension at least 2")
    return von_neumann_entropy(rho) / math.log(rho.dim)


def work_variance(rho: DensityMatrix, H: HermitianOperator) -> WorkStatistics:
    """Variance tr[rho (H - U†HU)^2] - ergotropy^2 with the extraction unitary."""
    _check_pair(rho, H)
    erg = ergotropy(rho, H)
    u = extraction_unitary(rho, H)
    h = H.matrix
    delta = h - u.conj().T @ h @ u
    second = float(np.einsum("ij,ji->", rho.matrix, delta @ delta).real)
    var = second - erg.ergotropy**2
    if var < -config.SWEEP_SLACK:
        raise RuntimeError(f"variance {var:.3e} below the clip window")
    var = max(var, 0.0)
    if erg.ergotropy > config.NSR_MEAN_FLOOR:
        nsr = math.sqrt(var) / erg.ergotropy
    else:
        nsr = None
    return WorkStatistics(mean=erg.ergotropy, variance=var, nsr=nsr)


def normalize_hamiltonian(H: HermitianOperator) -> HermitianOperator:
    """H divided by its operator norm."""
    norm = float(np.max(np.abs(np.linalg.eigvalsh(H.matrix))))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero operator")
    return HermitianOperator(H.matrix / norm)
