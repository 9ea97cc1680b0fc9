"""Closed-form continuity and concentration bounds used by the verification
suites: Lipschitz constants for ergotropy and entropy, the Fannes-Audenaert
bound, and Levy tail parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .matcore import HermitianOperator

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class LipschitzBounds:
    """Lipschitz constants of ergotropy (per distance) and entropy.

    ent_bures is None below dimension 5, where the pi ln d / ln 2 form does
    not apply.
    """

    erg_bures: float
    erg_trace: float
    erg_hs: float
    erg_euclid: float
    ent_bures: float | None
    ent_euclid: float


@dataclass(frozen=True)
class EntropyBuresBounds:
    """Entropy continuity coefficients.

    bures_lipschitz and the two Holder coefficients derived from it are None
    below dimension 5; fallback_lipschitz (3.35 ln d, valid for every d >= 2)
    is exposed separately and never substituted silently.
    """

    bures_lipschitz: float | None
    bures_angle_coeff: float
    holder_trace: float | None
    holder_hs: float | None
    fallback_lipschitz: float


@dataclass(frozen=True)
class LevyParameters:
    """Concentration widths on the purification sphere of dimension n = 2d^2."""

    alpha: float
    n: float
    upsilon_erg: float
    upsilon_ent: float


def ergotropy_lipschitz_bounds(H: HermitianOperator) -> LipschitzBounds:
    """Constants 2||H|| (Bures, trace, Euclidean) and sqrt(d)||H|| (HS)."""
    norm = float(np.max(np.abs(np.linalg.eigvalsh(H.matrix))))
    if norm == 0.0:
        raise ValueError("Lipschitz bounds need a nonzero Hamiltonian")
    d = H.dim
    return LipschitzBounds(
        erg_bures=2.0 * norm,
        erg_trace=2.0 * norm,
        erg_hs=math.sqrt(d) * norm,
        erg_euclid=2.0 * norm,
        ent_bures=(math.pi * math.log(d) / _LN2) if d >= 5 else None,
        ent_euclid=math.sqrt(8.0) * math.log(d) / _LN2,
    )


def binary_entropy(x: float) -> float:
    """h(x) = -x ln x - (1-x) ln(1-x), nats."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    total = 0.0
    if x > 0.0:
        total -= x * math.log(x)
    if x < 1.0:
        total -= (1.0 - x) * math.log(1.0 - x)
    return total


def entropy_fannes_bound(t: float, d: int) -> float:
    """Fannes-Audenaert entropy continuity bound t ln d + h(t)."""
    if d < 2:
        raise ValueError("need dimension at least 2")
    return t * math.log(d) + binary_entropy(t)


def entropy_bures_lipschitz(d: int) -> float:
    """Entropy-vs-Bures Lipschitz constant pi ln d / ln 2; defined for d >= 5."""
    if d <= 4:
        raise ValueError(f"the pi ln d / ln 2 bound requires d >= 5, got {d}")
    return math.pi * math.log(d) / _LN2


def entropy_bures_bounds(d: int) -> EntropyBuresBounds:
    """Bures-angle coefficient plus the d >= 5 Bures and Holder coefficients."""
    if d < 2:
        raise ValueError("need dimension at least 2")
    if d <= 4:
        angle_coeff = 1.609 * math.sqrt(d - 1.0) / _LN2
        lips = None
        holder_tr = None
        holder_hs = None
    else:
        angle_coeff = 2.0 * math.log(d) / _LN2
        lips = entropy_bures_lipschitz(d)
        holder_tr = math.sqrt(2.0) * lips
        holder_hs = d**0.25 * lips
    return EntropyBuresBounds(
        bures_lipschitz=lips,
        bures_angle_coeff=angle_coeff,
        holder_trace=holder_tr,
        holder_hs=holder_hs,
        fallback_lipschitz=3.35 * math.log(d),
    )


def levy_parameters(d: int, H_norm: float, alpha: float | None = None) -> LevyParameters:
    """Concentration widths L / sqrt(alpha n) for ergotropy and entropy.

    With the default alpha = 1/(25 pi) these reduce to sqrt(50 pi) ||H|| / d
    and sqrt(100 pi) ln d / d.
    """
    if d < 2:
        raise ValueError("need dimension at least 2")
    if not H_norm > 0.0:
        raise ValueError("H_norm must be positive")
    a = config.LEVY_ALPHA if alpha is None else float(alpha)
    if not a > 0.0:
        raise ValueError("alpha must be positive")
    n = 2.0 * d * d
    scale = 1.0 / math.sqrt(a * n)
    return LevyParameters(
        alpha=a,
        n=n,
        upsilon_erg=2.0 * H_norm * scale,
        upsilon_ent=math.sqrt(8.0) * math.log(d) * scale,
    )


def levy_tail_bound(ell: float, upsilon: float) -> float:
    """min(1, 3 exp(-(ell/upsilon)^2)); capped since it bounds a probability."""
    if ell < 0.0:
        raise ValueError("ell must be non-negative")
    if not upsilon > 0.0:
        raise ValueError("upsilon must be positive")
    return min(1.0, 3.0 * math.exp(-((ell / upsilon) ** 2)))
