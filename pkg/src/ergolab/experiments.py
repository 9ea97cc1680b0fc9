"""Monte Carlo drivers: ensemble average sweeps, two-pass tail experiments,
concentration-exponent fits, and theorem verification suites.

Reproducibility contract: every sample or pair owns an RNG stream whose id
packs (purpose, measure, dimension, pass, sample index), so results are
byte-identical for a fixed seed regardless of worker count or chunking.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import config
from .bounds import entropy_bures_bounds, entropy_fannes_bound, levy_parameters, levy_tail_bound
from .quantities import _entropy_from_vals
from .sampler import (
    LocalHamiltonianSpec,
    RngStream,
    _build_k_local_from_gen,
    _bures_from_parts,
    _gue_from_ginibre,
    _hs_from_ginibre,
    _ngue_spectra_from_gue,
    _pure_from_vectors,
)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

MEASURES = ("hilbert_schmidt", "bures", "pure")
_MEASURE_ALIASES = {
    "hs": "hilbert_schmidt",
    "hilbert-schmidt": "hilbert_schmidt",
    "hilbert_schmidt": "hilbert_schmidt",
    "bures": "bures",
    "pure": "pure",
}
_MEASURE_CODE = {"hilbert_schmidt": 1, "bures": 2, "pure": 3}

HAMILTONIANS = ("ngue", "k_local")

SUITES = (
    "lipschitz_ergotropy",
    "lipschitz_entropy",
    "fvdg",
    "schatten",
    "lidskii",
    "levy_hs",
    "purification",
)
_SUITE_CODE = {name: i + 1 for i, name in enumerate(SUITES)}

_PURPOSE_AVG = 1
_PURPOSE_TAIL = 2
_PURPOSE_VERIFY = 3
_PURPOSE_SAMPLE = 4

# sentinel sample index reserved for the fixed-Hamiltonian draw
_FIXED_H_INDEX = 2**32 - 1

_CHUNK_TARGET_BYTES = 1 << 25


def canonical_measure(name: str) -> str:
    try:
        return _MEASURE_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown measure {name!r}; choose from hs, bures, pure") from None


@dataclass(frozen=True)
class SweepConfig:
    """Configuration shared by the average and tail drivers."""

    measure: str
    dims: tuple[int, ...]
    samples_per_dim: int
    seed: int
    hamiltonian: str = "ngue"
    local_spec: LocalHamiltonianSpec | None = None
    ell_grid: tuple[float, ...] | None = None
    fixed_hamiltonian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "measure", canonical_measure(self.measure))
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("dims must be non-empty")
        if any(d < 2 for d in dims):
            raise ValueError("dims must all be at least 2")
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValueError("dims must be strictly ascending")
        if max(dims) > config.DIM_CAP:
            raise ValueError(f"dims exceed the dense cap {config.DIM_CAP}")
        object.__setattr__(self, "dims", dims)
        if self.samples_per_dim < 10:
            raise ValueError("samples_per_dim must be at least 10")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.hamiltonian not in HAMILTONIANS:
            raise ValueError(f"hamiltonian must be one of {HAMILTONIANS}")
        if self.hamiltonian == "k_local":
            if self.local_spec is None:
                raise ValueError("k_local sweeps need a LocalHamiltonianSpec")
            if dims != (self.local_spec.total_dim,):
                raise ValueError("k_local sweeps require dims == (local_spec.total_dim,)")
        if self.ell_grid is not None:
            grid = tuple(float(x) for x in self.ell_grid)
            if not grid:
                raise ValueError("ell_grid must be non-empty when given")
            if any(x <= 0 for x in grid):
                raise ValueError("ell values must be positive")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("ell values must be strictly ascending")
            object.__setattr__(self, "ell_grid", grid)


@dataclass(frozen=True)
class EnsembleRecord:
    """Per-(measure, d) Monte Carlo summary."""

    measure: str
    d: int
    n_samples: int
    mean_erg_hat: float
    sem_erg_hat: float
    std_erg_hat: float
    mean_entropy_hat: float
    sem_entropy_hat: float
    mean_nsr: float
    sem_nsr: float
    n_nsr_undefined: int
    mean_energy_hat: float
    tail_counts: tuple[tuple[float, int, int], ...] | None = None


@dataclass(frozen=True)
class FitResult:
    """Single-regressor OLS of ln(-ln P); the un-requested exponent is NaN."""

    x_exponent: float
    y_exponent: float
    intercept: float
    r_squared: float
    n_points: int


@dataclass(frozen=True)
class CheckStat:
    """One inequality within a suite: violation count and worst margin."""

    name: str
    violations: int
    max_excess: float


@dataclass(frozen=True)
class SuiteEntry:
    measure: str
    d: int
    pairs: int
    checks: tuple[CheckStat, ...]

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    seed: int
    n_pairs: int
    d_list: tuple[int, ...]
    entries: tuple[SuiteEntry, ...]

    @property
    def total_violations(self) -> int:
        return sum(e.violations for e in self.entries)

    @property
    def passed(self) -> bool:
        return self.total_violations == 0


# Stream plumbing.


def _stream_id(purpose: int, mcode: int, d: int, pass_id: int, index: int) -> int:
    return (purpose << 58) | (mcode << 54) | (d << 40) | (pass_id << 36) | index


def _sample_gen(seed, purpose, mcode, d, pass_id, index) -> np.random.Generator:
    return RngStream(int(seed), _stream_id(purpose, mcode, d, pass_id, index)).make_generator()


def _chunk_size(d: int) -> int:
    return max(8, min(4096, _CHUNK_TARGET_BYTES // (16 * d * d)))


def _spans(n: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def _run_spans(spans, worker: Callable, threads: int) -> None:
    if threads <= 1 or len(spans) <= 1:
        for span in spans:
            worker(span)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # materialize to surface worker exceptions
        list(pool.map(worker, spans))


def _draw_complex_square(gen: np.random.Generator, d: int) -> np.ndarray:
    return gen.standard_normal((d, d, 2)).view(np.complex128).reshape(d, d)


def _draw_chunk(measure, d, gens, need_h):
    """Per-sample draws in a frozen order: state parts first, then the
    Hamiltonian Ginibre; scaling is applied stack-wise afterwards."""
    m = len(gens)
    h = np.empty((m, d, d), np.complex128) if need_h else None
    if measure == "hilbert_schmidt":
        g = np.empty((m, d, d), np.complex128)
        for j, gen in enumerate(gens):
            g[j] = _draw_complex_square(gen, d)
            if need_h:
                h[j] = _draw_complex_square(gen, d)
        g *= _INV_SQRT2
        rhos = _hs_from_ginibre(g)
    elif measure == "bures":
        g = np.empty((m, d, d), np.complex128)
        gu = np.empty((m, d, d), np.complex128)
        for j, gen in enumerate(gens):
            g[j] = _draw_complex_square(gen, d)
            gu[j] = _draw_complex_square(gen, d)
            if need_h:
                h[j] = _draw_complex_square(gen, d)
        g *= _INV_SQRT2
        gu *= _INV_SQRT2
        rhos = _bures_from_parts(g, gu)
    elif measure == "pure":
        psi = np.empty((m, d), np.complex128)
        for j, gen in enumerate(gens):
            psi[j] = gen.standard_normal((d, 2)).view(np.complex128).reshape(d)
            if need_h:
                h[j] = _draw_complex_square(gen, d)
        rhos = _pure_from_vectors(psi)
    else:
        raise ValueError(f"unknown measure {measure!r}")
    if need_h:
        h *= _INV_SQRT2
    return rhos, h


def _stats_into(out, rhos, E, V, with_nsr):
    """Fill per-sample [erg_hat, ent_hat, energy_hat, nsr] columns."""
    m, d = rhos.shape[0], rhos.shape[1]
    if with_nsr:
        lam, v_rho = np.linalg.eigh(rhos)
    else:
        lam = np.linalg.eigvalsh(rhos)
    r = rhos @ V
    diag = np.einsum("nij,nij->nj", V.conj(), r).real
    energy = np.einsum("nj,nj->n", diag, E)
    passive = np.einsum("nj,nj->n", lam[:, ::-1], E)
    erg = energy - passive
    np.clip(erg, 0.0, None, out=erg)
    out[:, 0] = erg
    out[:, 1] = _entropy_from_vals(lam) / math.log(d)
    out[:, 2] = energy
    if not with_nsr:
        out[:, 3] = np.nan
        return
    overlap = v_rho.conj().transpose(0, 2, 1) @ V
    k = (overlap * E[:, None, :]) @ overlap.conj().transpose(0, 2, 1)
    idx = np.arange(d)
    k[:, idx, idx] -= E[:, ::-1]
    rowpow = np.einsum("nij,nij->ni", k.real, k.real) + np.einsum(
        "nij,nij->ni", k.imag, k.imag
    )
    second = np.einsum("ni,ni->n", lam, rowpow)
    var = second - erg * erg
    np.clip(var, 0.0, None, out=var)
    with np.errstate(divide="ignore", invalid="ignore"):
        nsr = np.sqrt(var) / erg
    nsr[erg <= config.NSR_MEAN_FLOOR] = np.nan
    out[:, 3] = nsr


def _fixed_hamiltonian_basis(cfg: SweepConfig, d: int, purpose: int, pass_id: int):
    gen = _sample_gen(cfg.seed, purpose, _MEASURE_CODE[cfg.measure], d, pass_id, _FIXED_H_INDEX)
    if cfg.hamiltonian == "ngue":
        g = np.empty((1, d, d), np.complex128)
        g[0] = _draw_complex_square(gen, d)
        g *= _INV_SQRT2
        vals, vecs = _ngue_spectra_from_gue(_gue_from_ginibre(g))
        return vals[0], vecs[0]
    op = _build_k_local_from_gen(cfg.local_spec, gen)
    norm = float(np.max(np.abs(np.linalg.eigvalsh(op.matrix))))
    vals, vecs = np.linalg.eigh(op.matrix / norm)
    return vals, vecs


def _run_dim(cfg: SweepConfig, d: int, purpose: int, pass_id: int, threads: int,
             with_nsr: bool) -> np.ndarray:
    n = cfg.samples_per_dim
    mcode = _MEASURE_CODE[cfg.measure]
    out = np.empty((n, 4), dtype=np.float64)
    fixed = None
    if cfg.fixed_hamiltonian:
        fixed = _fixed_hamiltonian_basis(cfg, d, purpose, pass_id)

    def worker(span):
        lo, hi = span
        gens = [_sample_gen(cfg.seed, purpose, mcode, d, pass_id, i) for i in range(lo, hi)]
        m = hi - lo
        if cfg.hamiltonian == "ngue":
            rhos, hraw = _draw_chunk(cfg.measure, d, gens, need_h=fixed is None)
            if fixed is None:
                E, V = _ngue_spectra_from_gue(_gue_from_ginibre(hraw))
            else:
                E = np.broadcast_to(fixed[0], (m, d))
                V = np.broadcast_to(fixed[1], (m, d, d))
        else:
            rhos, _ = _draw_chunk(cfg.measure, d, gens, need_h=False)
            if fixed is None:
                hs = np.empty((m, d, d), np.complex128)
                for j, gen in enumerate(gens):
                    op = _build_k_local_from_gen(cfg.local_spec, gen)
                    norm = float(np.max(np.abs(np.linalg.eigvalsh(op.matrix))))
                    hs[j] = op.matrix / norm
                E, V = np.linalg.eigh(hs)
            else:
                E = np.broadcast_to(fixed[0], (m, d))
                V = np.broadcast_to(fixed[1], (m, d, d))
        _stats_into(out[lo:hi], rhos, E, V, with_nsr)

    _run_spans(_spans(n, _chunk_size(d)), worker, threads)
    return out


def _mean_sem_std(x: np.ndarray) -> tuple[float, float, float]:
    n = x.shape[0]
    mean = float(np.mean(x))
    std = float(np.std(x, ddof=1)) if n > 1 else 0.0
    return mean, std / math.sqrt(n), std


def _record_from_stats(measure, d, stats, tail_counts=None) -> EnsembleRecord:
    n = stats.shape[0]
    mean_e, sem_e, std_e = _mean_sem_std(stats[:, 0])
    mean_s, sem_s, _ = _mean_sem_std(stats[:, 1])
    mean_w, _, _ = _mean_sem_std(stats[:, 2])
    nsr = stats[:, 3]
    defined = nsr[np.isfinite(nsr)]
    if defined.size:
        mean_n, sem_n, _ = _mean_sem_std(defined)
    else:
        mean_n, sem_n = math.nan, math.nan
    return EnsembleRecord(
        measure=measure,
        d=d,
        n_samples=n,
        mean_erg_hat=mean_e,
        sem_erg_hat=sem_e,
        std_erg_hat=std_e,
        mean_entropy_hat=mean_s,
        sem_entropy_hat=sem_s,
        mean_nsr=mean_n,
        sem_nsr=sem_n,
        n_nsr_undefined=int(nsr.size - defined.size),
        mean_energy_hat=mean_w,
        tail_counts=tail_counts,
    )


def run_average_sweep(cfg: SweepConfig, threads: int = 1) -> list[EnsembleRecord]:
    """Ensemble means of normalized ergotropy, entropy, NSR, and energy per d.

    A fresh Hamiltonian is drawn for every sample unless cfg.fixed_hamiltonian
    pins one per dimension.
    """
    records = []
    for d in cfg.dims:
        stats = _run_dim(cfg, d, _PURPOSE_AVG, 1, threads, with_nsr=True)
        records.append(_record_from_stats(cfg.measure, d, stats))
    return records


def run_tail_experiment(cfg: SweepConfig, threads: int = 1) -> list[EnsembleRecord]:
    """Two-pass tail estimation: pass 1 freezes the ensemble means, pass 2
    counts exceedances on disjoint streams. NSR columns are not evaluated
    here and stay NaN."""
    if cfg.ell_grid is None:
        raise ValueError("tail experiments need an ell_grid")
    records = []
    for d in cfg.dims:
        width = levy_parameters(d, 1.0).upsilon_erg
        expected = cfg.samples_per_dim * levy_tail_bound(cfg.ell_grid[-1], width)
        if expected < 10:
            warnings.warn(
                f"d={d}: expected tail count {expected:.1f} at the largest ell is "
                "below 10; counts there may be pure noise",
                stacklevel=2,
            )
        pass1 = _run_dim(cfg, d, _PURPOSE_TAIL, 1, threads, with_nsr=False)
        center_e = float(np.mean(pass1[:, 0]))
        center_s = float(np.mean(pass1[:, 1]))
        pass2 = _run_dim(cfg, d, _PURPOSE_TAIL, 2, threads, with_nsr=False)
        dev_e = np.abs(pass2[:, 0] - center_e)
        dev_s = np.abs(pass2[:, 1] - center_s)
        tails = tuple(
            (float(ell), int(np.sum(dev_e > ell)), int(np.sum(dev_s > ell)))
            for ell in cfg.ell_grid
        )
        records.append(_record_from_stats(cfg.measure, d, pass1, tail_counts=tails))
    return records


# Fitting.

_QUANTITY_INDEX = {"ergotropy": 1, "erg": 1, "entropy": 2, "ent": 2}
_FIT_MODES = ("vary_ell_fixed_d", "vary_d_fixed_ell")


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(np.sum(dx * dx))
    if sxx == 0.0:
        raise ValueError("degenerate fit: all regressor values identical")
    slope = float(np.sum(dx * (y - ym)) / sxx)
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    sstot = float(np.sum((y - ym) ** 2))
    ssres = float(np.sum(resid * resid))
    r2 = 1.0 if sstot == 0.0 else 1.0 - ssres / sstot
    return slope, float(intercept), min(max(r2, 0.0), 1.0)


def _tail_points(records: Sequence[EnsembleRecord], quantity: str):
    try:
        ci = _QUANTITY_INDEX[quantity]
    except KeyError:
        raise ValueError(f"unknown quantity {quantity!r}; use ergotropy or entropy") from None
    pts = []
    for rec in records:
        if rec.tail_counts is None:
            raise ValueError("records lack tail counts; run a tail experiment first")
        for row in rec.tail_counts:
            pts.append((rec.d, float(row[0]), int(row[ci]), rec.n_samples))
    return pts


def fit_concentration_exponents(
    records: Sequence[EnsembleRecord],
    mode: str,
    quantity: str = "ergotropy",
    d: int | None = None,
    ell: float | None = None,
) -> FitResult:
    """OLS of ln(-ln P) against ln ell (or ln d); the slope is the requested
    exponent. Points with empirical P of exactly 0 or 1 are excluded.

    In vary_ell_fixed_d mode the records must reduce to a single dimension
    (pass d= to select); in vary_d_fixed_ell a single ell (pass ell=).
    """
    mode = mode.replace("-", "_")
    if mode not in _FIT_MODES:
        raise ValueError(f"mode must be one of {_FIT_MODES}")
    pts = _tail_points(records, quantity)
    if mode == "vary_ell_fixed_d":
        if d is not None:
            pts = [p for p in pts if p[0] == d]
        dims = sorted({p[0] for p in pts})
        if len(dims) != 1:
            raise ValueError(f"vary_ell_fixed_d needs a single dimension, got {dims}")
        xs = [math.log(p[1]) for p in pts if 0 < p[2] < p[3]]
        ys = [math.log(-math.log(p[2] / p[3])) for p in pts if 0 < p[2] < p[3]]
    else:
        if ell is not None:
            # tolerant match so a hand-typed ell finds grid values that went
            # through a text round trip
            pts = [p for p in pts if math.isclose(p[1], ell, rel_tol=1e-9, abs_tol=0.0)]
        ells = sorted({p[1] for p in pts})
        if len(ells) != 1:
            raise ValueError(f"vary_d_fixed_ell needs a single ell, got {len(ells)} values")
        xs = [math.log(p[0]) for p in pts if 0 < p[2] < p[3]]
        ys = [math.log(-math.log(p[2] / p[3])) for p in pts if 0 < p[2] < p[3]]
    if len(xs) < 3:
        raise ValueError(f"need at least 3 usable points with 0 < P < 1, got {len(xs)}")
    slope, intercept, r2 = _ols(np.asarray(xs), np.asarray(ys))
    if mode == "vary_ell_fixed_d":
        return FitResult(slope, math.nan, intercept, r2, len(xs))
    return FitResult(math.nan, slope, intercept, r2, len(xs))


def select_common_ell(records: Sequence[EnsembleRecord], quantity: str = "ergotropy") -> float:
    """The grid ell usable (0 < count < n) at every dimension, maximizing the
    worst-case distance of counts from the 0/n edges."""
    ci = _QUANTITY_INDEX[quantity]
    by_ell: dict[float, list[tuple[int, int]]] = {}
    for rec in records:
        if rec.tail_counts is None:
            raise ValueError("records lack tail counts")
        for row in rec.tail_counts:
            by_ell.setdefault(float(row[0]), []).append((int(row[ci]), rec.n_samples))
    n_dims = len(records)
    best_ell, best_score = None, -1
    for ell in sorted(by_ell):
        entries = by_ell[ell]
        if len(entries) != n_dims:
            continue
        if any(not 0 < c < n for c, n in entries):
            continue
        score = min(min(c, n - c) for c, n in entries)
        if score > best_score:
            best_ell, best_score = ell, score
    if best_ell is None:
        raise ValueError("no ell value is usable at every dimension")
    return best_ell


# Verification suites.


def _binary_entropy_vec(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = t * np.log(t)
        b = (1.0 - t) * np.log(1.0 - t)
    a = np.where(t > 0.0, a, 0.0)
    b = np.where(t < 1.0, b, 0.0)
    return -(a + b)


def _sqrt_stack(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root[:, None, :]) @ vecs.conj().transpose(0, 2, 1)


def _fidelity_stack(sq_r: np.ndarray, sq_s: np.ndarray) -> np.ndarray:
    prod = sq_r @ sq_s
    sv = np.linalg.svd(prod, compute_uv=False)
    f = np.sum(sv, axis=1) ** 2
    return np.clip(f, 0.0, 1.0)


def _pair_distances(rhos, sigmas, with_bures):
    dvals = np.linalg.eigvalsh(rhos - sigmas)
    d_tr = 0.5 * np.sum(np.abs(dvals), axis=1)
    d_hs = np.sqrt(np.sum(dvals * dvals, axis=1))
    if not with_bures:
        return d_tr, d_hs, None, None, None
    lam_r, v_r = np.linalg.eigh(rhos)
    lam_s, v_s = np.linalg.eigh(sigmas)
    sq_r = _sqrt_stack(lam_r, v_r)
    sq_s = _sqrt_stack(lam_s, v_s)
    f = _fidelity_stack(sq_r, sq_s)
    root_f = np.sqrt(f)
    d_b = np.sqrt(np.clip(2.0 - 2.0 * root_f, 0.0, None))
    purif = np.sqrt(np.sum(np.abs(sq_r - sq_s) ** 2, axis=(1, 2)))
    return d_tr, d_hs, d_b, root_f, purif


def _erg_hat_stack(rhos, E, V):
    lam = np.linalg.eigvalsh(rhos)
    r = rhos @ V
    diag = np.einsum("nij,nij->nj", V.conj(), r).real
    energy = np.einsum("nj,nj->n", diag, E)
    passive = np.einsum("nj,nj->n", lam[:, ::-1], E)
    return np.clip(energy - passive, 0.0, None), energy, lam


def _lipschitz_ergotropy_excess(rhos, sigmas, E, V, d):
    """Columns of (lhs - rhs) for the three ergotropy Lipschitz inequalities
    plus the average-energy bound; positive beyond slack means violation."""
    erg_r, en_r, _ = _erg_hat_stack(rhos, E, V)
    erg_s, en_s, _ = _erg_hat_stack(sigmas, E, V)
    d_tr, d_hs, d_b, _, _ = _pair_distances(rhos, sigmas, with_bures=True)
    delta = np.abs(erg_r - erg_s)
    names = ("erg_vs_bures", "erg_vs_trace", "erg_vs_hs", "energy_vs_trace")
    cols = np.stack(
        [
            delta - 2.0 * d_b,
            delta - 2.0 * d_tr,
            delta - math.sqrt(d) * d_hs,
            np.abs(en_r - en_s) - d_tr,
        ],
        axis=1,
    )
    return names, cols


def _lipschitz_entropy_excess(rhos, sigmas, d):
    lam_r = np.linalg.eigvalsh(rhos)
    lam_s = np.linalg.eigvalsh(sigmas)
    s_r = _entropy_from_vals(lam_r)
    s_s = _entropy_from_vals(lam_s)
    delta = np.abs(s_r - s_s)
    with_bures = d >= 5
    d_tr, d_hs, d_b, root_f, _ = _pair_distances(rhos, sigmas, with_bures=with_bures)
    fannes = delta - (d_tr * math.log(d) + _binary_entropy_vec(d_tr))
    names = ["fannes"]
    cols = [fannes]
    if with_bures:
        eb = entropy_bures_bounds(d)
        angle = np.arccos(np.clip(root_f, 0.0, 1.0))
        names += ["bures_angle", "bures", "holder_trace", "holder_hs"]
        cols += [
            delta - eb.bures_angle_coeff * angle,
            delta - eb.bures_lipschitz * d_b,
            delta - eb.holder_trace * np.sqrt(d_tr),
            delta - eb.holder_hs * np.sqrt(d_hs),
        ]
    return tuple(names), np.stack(cols, axis=1)


def _norm_suite_excess(suite, rhos, sigmas, d):
    if suite == "lidskii":
        lam_r = np.linalg.eigvalsh(rhos)
        lam_s = np.linalg.eigvalsh(sigmas)
        dev = np.sum(np.abs(lam_r - lam_s), axis=1)
        d_tr, _, _, _, _ = _pair_distances(rhos, sigmas, with_bures=False)
        return ("lidskii",), (0.5 * dev - d_tr)[:, None]
    if suite == "schatten":
        d_tr, d_hs, _, _, _ = _pair_distances(rhos, sigmas, with_bures=False)
        return ("schatten",), (d_tr - math.sqrt(d / 4.0) * d_hs)[:, None]
    if suite == "fvdg":
        d_tr, _, d_b, _, _ = _pair_distances(rhos, sigmas, with_bures=True)
        return ("fvdg_lower", "fvdg_upper"), np.stack(
            [0.5 * d_b * d_b - d_tr, d_tr - d_b], axis=1
        )
    if suite == "purification":
        d_tr, _, d_b, _, purif = _pair_distances(rhos, sigmas, with_bures=True)
        return ("purification",), (d_b - purif)[:, None]
    raise ValueError(f"unknown pair suite {suite!r}")


def _draw_pair_chunk(measure, d, gens, need_h):
    """Pair draws per stream: rho parts, sigma parts, then the Hamiltonian."""
    m = len(gens)
    h = np.empty((m, d, d), np.complex128) if need_h else None
    if measure == "hilbert_schmidt":
        g1 = np.empty((m, d, d), np.complex128)
        g2 = np.empty((m, d, d), np.complex128)
        for j, gen in enumerate(gens):
            g1[j] = _draw_complex_square(gen, d)
            g2[j] = _draw_complex_square(gen, d)
            if need_h:
                h[j] = _draw_complex_square(gen, d)
        g1 *= _INV_SQRT2
        g2 *= _INV_SQRT2
        rhos, sigmas = _hs_from_ginibre(g1), _hs_from_ginibre(g2)
    elif measure == "bures":
        g1 = np.empty((m, d, d), np.complex128)
        gu1 = np.empty((m, d, d), np.complex128)
        g2 = np.empty((m, d, d), np.complex128)
        gu2 = np.empty((m, d, d), np.complex128)
        for j, gen in enumerate(gens):
            g1[j] = _draw_complex_square(gen, d)
            gu1[j] = _draw_complex_square(gen, d)
            g2[j] = _draw_complex_square(gen, d)
            gu2[j] = _draw_complex_square(gen, d)
            if need_h:
                h[j] = _draw_complex_square(gen, d)
        for arr in (g1, gu1, g2, gu2):
            arr *= _INV_SQRT2
        rhos = _bures_from_parts(g1, gu1)
        sigmas = _bures_from_parts(g2, gu2)
    elif measure == "pure":
        p1 = np.empty((m, d), np.complex128)
        p2 = np.empty((m, d), np.complex128)
        for j, gen in enumerate(gens):
            p1[j] = gen.standard_normal((d, 2)).view(np.complex128).reshape(d)
            p2[j] = gen.standard_normal((d, 2)).view(np.complex128).reshape(d)
            if need_h:
                h[j] = _draw_complex_square(gen, d)
        rhos, sigmas = _pure_from_vectors(p1), _pure_from_vectors(p2)
    else:
        raise ValueError(f"unknown measure {measure!r}")
    if need_h:
        h *= _INV_SQRT2
    return rhos, sigmas, h


def _run_pair_suite(suite, measure, d, n_pairs, seed, threads):
    scode = _SUITE_CODE[suite]
    mcode = _MEASURE_CODE[measure]
    need_h = suite == "lipschitz_ergotropy"
    probe = _names_for_suite(suite, d)
    excess = np.empty((n_pairs, len(probe)), dtype=np.float64)

    def worker(span):
        lo, hi = span
        gens = [
            _sample_gen(seed, _PURPOSE_VERIFY, mcode, d, scode, i) for i in range(lo, hi)
        ]
        rhos, sigmas, hraw = _draw_pair_chunk(measure, d, gens, need_h)
        if suite == "lipschitz_ergotropy":
            E, V = _ngue_spectra_from_gue(_gue_from_ginibre(hraw))
            _, cols = _lipschitz_ergotropy_excess(rhos, sigmas, E, V, d)
        elif suite == "lipschitz_entropy":
            _, cols = _lipschitz_entropy_excess(rhos, sigmas, d)
        else:
            _, cols = _norm_suite_excess(suite, rhos, sigmas, d)
        excess[lo:hi] = cols

    _run_spans(_spans(n_pairs, _chunk_size(d)), worker, threads)
    checks = tuple(
        CheckStat(
            name=name,
            violations=int(np.sum(excess[:, i] > config.SWEEP_SLACK)),
            max_excess=float(np.max(excess[:, i])),
        )
        for i, name in enumerate(probe)
    )
    return SuiteEntry(measure=measure, d=d, pairs=n_pairs, checks=checks)


def _names_for_suite(suite, d):
    if suite == "lipschitz_ergotropy":
        return ("erg_vs_bures", "erg_vs_trace", "erg_vs_hs", "energy_vs_trace")
    if suite == "lipschitz_entropy":
        return (
            ("fannes", "bures_angle", "bures", "holder_trace", "holder_hs")
            if d >= 5
            else ("fannes",)
        )
    if suite == "lidskii":
        return ("lidskii",)
    if suite == "schatten":
        return ("schatten",)
    if suite == "fvdg":
        return ("fvdg_lower", "fvdg_upper")
    if suite == "purification":
        return ("purification",)
    raise ValueError(f"unknown suite {suite!r}")


_LEVY_DEFAULT_GRID = tuple(float(x) for x in np.geomspace(0.01, 0.6, 20))


def _run_levy_entry(d, n_samples, seed, threads, ell_grid):
    cfg = SweepConfig(
        measure="hilbert_schmidt",
        dims=(d,),
        samples_per_dim=n_samples,
        seed=seed,
        ell_grid=ell_grid,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rec = run_tail_experiment(cfg, threads=threads)[0]
    pars = levy_parameters(d, 1.0)
    ups_erg_hat = pars.upsilon_erg
    ups_ent_hat = pars.upsilon_ent / math.log(d)
    worst = {"erg": -math.inf, "ent": -math.inf}
    bad = {"erg": 0, "ent": 0}
    for ell, c_e, c_s in rec.tail_counts:
        for key, count, ups in (("erg", c_e, ups_erg_hat), ("ent", c_s, ups_ent_hat)):
            p = count / rec.n_samples
            sem = math.sqrt(p * (1.0 - p) / rec.n_samples)
            margin = p - (levy_tail_bound(ell, ups) + 3.0 * sem)
            worst[key] = max(worst[key], margin)
            if margin > 0.0:
                bad[key] += 1
    checks = (
        CheckStat("levy_erg", bad["erg"], worst["erg"]),
        CheckStat("levy_ent", bad["ent"], worst["ent"]),
    )
    return SuiteEntry(measure="hilbert_schmidt", d=d, pairs=rec.n_samples, checks=checks)


def run_verification_suite(
    suite: str,
    d_list: Sequence[int],
    n_pairs: int,
    seed: int,
    threads: int = 1,
    measures: Sequence[str] | None = None,
    ell_grid: Sequence[float] | None = None,
) -> SuiteReport:
    """Sweep one theorem suite over dimensions (and state measures) and count
    violations beyond the 1e-9 slack.

    levy_hs interprets n_pairs as the sample count per dimension and accepts
    an optional ell grid.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    dims = tuple(int(d) for d in d_list)
    if not dims or any(d < 2 for d in dims):
        raise ValueError("d_list must contain dimensions of at least 2")
    if max(dims) > config.DIM_CAP:
        raise ValueError(f"dims exceed the dense cap {config.DIM_CAP}")
    if n_pairs < 1:
        raise ValueError("n_pairs must be positive")
    entries = []
    if suite == "levy_hs":
        grid = tuple(float(x) for x in ell_grid) if ell_grid else _LEVY_DEFAULT_GRID
        for d in dims:
            entries.append(_run_levy_entry(d, n_pairs, seed, threads, grid))
    else:
        use_measures = tuple(canonical_measure(m) for m in measures) if measures else MEASURES
        for measure in use_measures:
            for d in dims:
                entries.append(_run_pair_suite(suite, measure, d, n_pairs, seed, threads))
    return SuiteReport(
        suite=suite, seed=int(seed), n_pairs=int(n_pairs), d_list=dims, entries=tuple(entries)
    )


_EE = math.e**math.e


def inset_transform(records: Sequence[EnsembleRecord]) -> list[tuple[float, float]]:
    """(ln d, mean_erg_hat * ln ln ln d) for dimensions beyond e^e; smaller
    dimensions are excluded with a warning since the factor is undefined or
    non-positive there."""
    out = []
    for rec in sorted(records, key=lambda r: r.d):
        if rec.d <= _EE:
            warnings.warn(
                f"d={rec.d} excluded from the inset transform (ln ln ln d <= 0)",
                stacklevel=2,
            )
            continue
        out.append((math.log(rec.d), rec.mean_erg_hat * math.log(math.log(math.log(rec.d)))))
    return out
