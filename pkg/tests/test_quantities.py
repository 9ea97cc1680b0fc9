from __future__ import annotations

import math

import numpy as np
import pytest

from ergolab.matcore import DensityMatrix, HermitianOperator
from ergolab.quantities import (
    ergotropy,
    extraction_unitary,
    normalize_hamiltonian,
    normalized_entropy,
    passive_state,
    von_neumann_entropy,
    work_variance,
)
from ergolab.sampler import RngStream, _haar_block, sample_hs_state, sample_ngue_hamiltonian

RNG = np.random.default_rng(5150)


def rand_state(d, rng=RNG):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def rand_hermitian(d, rng=RNG):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return HermitianOperator((g + g.conj().T) / 2)


def rand_unitary(d, rng=RNG):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


PLUS = DensityMatrix(np.full((2, 2), 0.5))
H01 = HermitianOperator(np.diag([0.0, 1.0]))


class TestPassiveState:
    def test_maximally_mixed_is_fixed(self):
        rho = DensityMatrix(np.eye(3) / 3)
        h = rand_hermitian(3)
        assert np.allclose(passive_state(rho, h).matrix, np.eye(3) / 3, atol=1e-12)

    def test_two_level_sorting(self):
        rho = DensityMatrix(np.diag([0.3, 0.7]))
        assert np.allclose(passive_state(rho, H01).matrix, np.diag([0.7, 0.3]), atol=1e-12)

    def test_beats_every_permutation(self):
        rho, h = rand_state(4), rand_hermitian(4)
        passive = ergotropy(rho, h).passive_energy
        lam = np.linalg.eigvalsh(rho.matrix)
        energies = np.linalg.eigvalsh(h.matrix)
        perms = RNG.permuted(np.tile(lam, (100_000, 1)), axis=1)
        assert np.all(perms @ energies >= passive - 1e-9)

    def test_commutes_with_hamiltonian(self):
        rho, h = rand_state(5), rand_hermitian(5)
        p = passive_state(rho, h).matrix
        assert np.max(np.abs(p @ h.matrix - h.matrix @ p)) <= 1e-8

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            passive_state(DensityMatrix(np.eye(2) / 2), rand_hermitian(3))


class TestErgotropy:
    def test_inverted_qubit(self):
        res = ergotropy(DensityMatrix(np.diag([0.3, 0.7])), H01)
        assert res.ergotropy == pytest.approx(0.4, abs=1e-12)
        assert res.initial_energy == pytest.approx(0.7, abs=1e-12)
        assert res.passive_energy == pytest.approx(0.3, abs=1e-12)

    def test_plus_state(self):
        res = ergotropy(PLUS, H01)
        assert res.ergotropy == pytest.approx(0.5, abs=1e-12)

    def test_bookkeeping_identity(self):
        for _ in range(25):
            d = int(RNG.integers(2, 9))
            res = ergotropy(rand_state(d), rand_hermitian(d))
            assert res.ergotropy >= 0.0
            assert res.ergotropy == pytest.approx(
                res.initial_energy - res.passive_energy, abs=1e-9
            )

    def test_random_unitaries_never_beat_it(self):
        rho, h = rand_state(4), rand_hermitian(4)
        res = ergotropy(rho, h)
        gen = RngStream(2024, 0).make_generator()
        best = math.inf
        for _ in range(10):
            u = _haar_block(gen, 10_000, 4)
            rotated = u @ rho.matrix @ u.conj().transpose(0, 2, 1)
            energies = np.einsum("nij,ji->n", rotated, h.matrix).real
            best = min(best, float(np.min(energies)))
        assert best >= res.passive_energy - 1e-9
        # with this many draws something must do better than standing still
        assert best < res.initial_energy

    def test_shift_invariance(self):
        rho, h = rand_state(6), rand_hermitian(6)
        base = ergotropy(rho, h).ergotropy
        for c in (-3.0, 0.25, 17.0):
            shifted = HermitianOperator(h.matrix + c * np.eye(6))
            assert ergotropy(rho, shifted).ergotropy == pytest.approx(base, abs=1e-9)

    def test_joint_unitary_covariance(self):
        rho, h = rand_state(5), rand_hermitian(5)
        u = rand_unitary(5)
        rho2 = DensityMatrix(u @ rho.matrix @ u.conj().T)
        h2 = HermitianOperator(u @ h.matrix @ u.conj().T)
        assert ergotropy(rho2, h2).ergotropy == pytest.approx(
            ergotropy(rho, h).ergotropy, abs=1e-9
        )

    def test_passive_fixed_point(self):
        rho, h = rand_state(6), rand_hermitian(6)
        assert ergotropy(passive_state(rho, h), h).ergotropy <= 1e-9

    def test_pure_state_equals_initial_energy(self):
        psi = RNG.standard_normal(5) + 1j * RNG.standard_normal(5)
        psi /= np.linalg.norm(psi)
        rho = DensityMatrix(np.outer(psi, psi.conj()))
        h = sample_ngue_hamiltonian(5, RngStream(314))
        res = ergotropy(rho, h)
        assert res.ergotropy == pytest.approx(res.initial_energy, abs=1e-9)

    def test_degenerate_spectra_pin_the_energy(self):
        # eigenvalues (0.5, 0.25, 0.25) against E = (0, 1, 1): passive
        # energy is 0.5 no matter how the ties are resolved
        h = HermitianOperator(np.diag([0.0, 1.0, 1.0]))
        base = np.diag([0.5, 0.25, 0.25])
        for _ in range(10):
            u = np.eye(3, dtype=complex)
            u[1:, 1:] = rand_unitary(2)
            rho = DensityMatrix(u @ base @ u.conj().T)
            assert ergotropy(rho, h).passive_energy == pytest.approx(0.5, abs=1e-9)


class TestExtractionUnitary:
    def test_passive_input_gives_identity(self):
        rho = DensityMatrix(np.diag([0.7, 0.3]))
        assert np.array_equal(extraction_unitary(rho, H01), np.eye(2))

    def test_excited_qubit_gives_bit_flip(self):
        rho = DensityMatrix(np.diag([0.0, 1.0]))
        u = extraction_unitary(rho, H01)
        assert np.allclose(np.abs(u), [[0, 1], [1, 0]], atol=1e-12)
        assert np.allclose(u @ rho.matrix @ u.conj().T, np.diag([1.0, 0.0]), atol=1e-12)

    def test_self_consistency(self):
        rho, h = rand_state(5), rand_hermitian(5)
        u = extraction_unitary(rho, h)
        assert np.max(np.abs(u.conj().T @ u - np.eye(5))) <= 1e-10
        final = u @ rho.matrix @ u.conj().T
        assert np.max(np.abs(final - passive_state(rho, h).matrix)) <= 1e-8
        recomputed = np.trace(rho.matrix @ h.matrix).real - np.trace(final @ h.matrix).real
        assert recomputed == pytest.approx(ergotropy(rho, h).ergotropy, abs=1e-9)


class TestEntropy:
    def test_pure_state(self):
        assert von_neumann_entropy(DensityMatrix(np.diag([1.0, 0.0]))) == 0.0

    def test_maximally_mixed(self):
        for d in (2, 3, 7):
            rho = DensityMatrix(np.eye(d) / d)
            assert von_neumann_entropy(rho) == pytest.approx(math.log(d), abs=1e-12)

    def test_embedded_coin(self):
        rho = DensityMatrix(np.diag([0.5, 0.5, 0.0]))
        assert von_neumann_entropy(rho) == pytest.approx(math.log(2), abs=1e-12)

    def test_unitary_invariance(self):
        rho = rand_state(6)
        u = rand_unitary(6)
        rotated = DensityMatrix(u @ rho.matrix @ u.conj().T)
        assert von_neumann_entropy(rotated) == pytest.approx(
            von_neumann_entropy(rho), abs=1e-9
        )

    def test_normalized(self):
        assert normalized_entropy(DensityMatrix(np.eye(4) / 4)) == pytest.approx(1.0)
        assert normalized_entropy(DensityMatrix(np.diag([1.0, 0, 0, 0]))) == 0.0
        rho = DensityMatrix(np.diag([0.5, 0.5, 0.0, 0.0]))
        assert normalized_entropy(rho) == pytest.approx(0.5, abs=1e-12)

    def test_normalized_rejects_d1(self):
        with pytest.raises(ValueError):
            normalized_entropy(DensityMatrix(np.eye(1)))


class TestWorkVariance:
    def test_passive_state_undefined_nsr(self):
        rho = DensityMatrix(np.diag([0.7, 0.3]))
        ws = work_variance(rho, H01)
        assert ws.mean == 0.0
        assert ws.variance == 0.0
        assert ws.nsr is None
        assert not ws.nsr_defined

    def test_plus_state_closed_form(self):
        ws = work_variance(PLUS, H01)
        assert ws.mean == pytest.approx(0.5, abs=1e-12)
        assert ws.variance == pytest.approx(0.25, abs=1e-12)
        assert ws.nsr == pytest.approx(1.0, abs=1e-12)
        assert ws.nsr_defined

    def test_inverted_qubit_closed_form(self):
        # U is the bit flip, H - U†HU = diag(-1, 1), so E[W^2] = tr(rho) = 1
        rho = DensityMatrix(np.diag([0.3, 0.7]))
        ws = work_variance(rho, H01)
        assert ws.mean == pytest.approx(0.4, abs=1e-12)
        assert ws.variance == pytest.approx(1.0 - 0.16, abs=1e-12)
        assert ws.nsr == pytest.approx(math.sqrt(0.84) / 0.4, abs=1e-12)

    def test_nsr_norm_insensitive(self):
        rho = sample_hs_state(6, RngStream(271))
        h = rand_hermitian(6)
        a = work_variance(rho, h)
        b = work_variance(rho, normalize_hamiltonian(h))
        c = work_variance(rho, HermitianOperator(3.7 * h.matrix))
        assert a.nsr == pytest.approx(b.nsr, abs=1e-9)
        assert a.nsr == pytest.approx(c.nsr, abs=1e-9)


class TestNormalizeHamiltonian:
    def test_diagonal(self):
        h = normalize_hamiltonian(HermitianOperator(np.diag([0.0, 2.0])))
        assert np.allclose(h.matrix, np.diag([0.0, 1.0]), atol=1e-12)

    def test_unit_norm(self):
        h = normalize_hamiltonian(rand_hermitian(7))
        assert float(np.max(np.abs(np.linalg.eigvalsh(h.matrix)))) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_ergotropy_scaling_identity(self):
        rho, h = rand_state(6), rand_hermitian(6)
        norm = float(np.max(np.abs(np.linalg.eigvalsh(h.matrix))))
        scaled = norm * ergotropy(rho, normalize_hamiltonian(h)).ergotropy
        assert ergotropy(rho, h).ergotropy == pytest.approx(scaled, abs=1e-9)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            normalize_hamiltonian(HermitianOperator(np.zeros((3, 3))))
