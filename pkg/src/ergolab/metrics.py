"""State-space distances: trace, Hilbert-Schmidt, Bures, Uhlmann fidelity,
Bures angle, canonical purifications, and the sorted-spectrum deviation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matcore import DensityMatrix, EigenSolverError


@dataclass(frozen=True)
class DistanceReport:
    """All distances between one pair of states, computed consistently."""

    trace: float
    hs: float
    bures: float
    fidelity: float
    bures_angle: float


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def _sqrt_from_state(rho: DensityMatrix) -> np.ndarray:
    spec = rho.spectrum()
    v = spec.vectors
    return (v * np.sqrt(spec.values)) @ v.conj().T


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of the difference."""
    _check_dims(rho, sigma)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - sigma.matrix))))


def hs_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Schatten-2 norm of the difference."""
    _check_dims(rho, sigma)
    vals = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(math.sqrt(np.sum(vals * vals)))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity as (sum of singular values of sqrt(rho) sqrt(sigma))^2.

    Equal to the nested-root form but avoids one matrix square root near rank
    deficiency.
    """
    _check_dims(rho, sigma)
    prod = _sqrt_from_state(rho) @ _sqrt_from_state(sigma)
    try:
        s = np.linalg.svd(prod, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"svd failed in fidelity (dim={rho.dim})") from exc
    val = float(np.sum(s)) ** 2
    if val > 1.0 + 1e-9:
        raise RuntimeError(f"fidelity {val:.12g} exceeds 1 beyond slack")
    return min(val, 1.0)


def bures_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """sqrt(2 - 2 sqrt(F))."""
    root_f = min(math.sqrt(fidelity(rho, sigma)), 1.0)
    return math.sqrt(max(2.0 - 2.0 * root_f, 0.0))


def bures_angle(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """arccos sqrt(F), in [0, pi/2]."""
    root_f = min(math.sqrt(fidelity(rho, sigma)), 1.0)
    return math.acos(root_f)


def canonical_purification(rho: DensityMatrix) -> np.ndarray:
    """Row-major vectorization of sqrt(rho); unit norm, partial trace gives rho."""
    return _sqrt_from_state(rho).reshape(-1)


def eigenvalue_l1_deviation(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """l1 distance between the descending-sorted spectra."""
    _check_dims(rho, sigma)
    a = np.linalg.eigvalsh(rho.matrix)
    b = np.linalg.eigvalsh(sigma.matrix)
    return float(np.sum(np.abs(a - b)))


def distance_report(rho: DensityMatrix, sigma: DensityMatrix) -> DistanceReport:
    """All five quantities from one consistent fidelity evaluation."""
    f = fidelity(rho, sigma)
    root_f = min(math.sqrt(f), 1.0)
    return DistanceReport(
        trace=trace_distance(rho, sigma),
        hs=hs_distance(rho, sigma),
        bures=math.sqrt(max(2.0 - 2.0 * root_f, 0.0)),
        fidelity=f,
        bures_angle=math.acos(root_f),
    )
