from __future__ import annotations

import math

import numpy as np
import pytest

from ergolab.bounds import (
    binary_entropy,
    entropy_bures_bounds,
    entropy_bures_lipschitz,
    entropy_fannes_bound,
    ergotropy_lipschitz_bounds,
    levy_parameters,
    levy_tail_bound,
)
from ergolab.matcore import HermitianOperator


class TestErgotropyLipschitz:
    def test_unit_norm_d4(self):
        h = HermitianOperator(np.diag([-1.0, -0.5, 0.5, 1.0]))
        b = ergotropy_lipschitz_bounds(h)
        assert b.erg_bures == pytest.approx(2.0, abs=1e-12)
        assert b.erg_trace == pytest.approx(2.0, abs=1e-12)
        assert b.erg_hs == pytest.approx(2.0, abs=1e-12)
        assert b.erg_euclid == pytest.approx(2.0, abs=1e-12)
        assert b.ent_bures is None
        assert b.ent_euclid == pytest.approx(math.sqrt(8) * math.log(4) / math.log(2))

    def test_norm_scaling(self):
        b = ergotropy_lipschitz_bounds(HermitianOperator(np.diag([0.0, 3.0])))
        assert b.erg_trace == pytest.approx(6.0, abs=1e-12)
        assert b.erg_bures == pytest.approx(6.0, abs=1e-12)
        assert b.erg_hs == pytest.approx(math.sqrt(2) * 3, abs=1e-12)

    def test_entropy_constant_appears_at_d5(self):
        h = HermitianOperator(np.eye(5))
        b = ergotropy_lipschitz_bounds(h)
        assert b.ent_bures == pytest.approx(math.pi * math.log(5) / math.log(2), abs=1e-12)

    def test_rejects_zero_hamiltonian(self):
        with pytest.raises(ValueError):
            ergotropy_lipschitz_bounds(HermitianOperator(np.zeros((4, 4))))


class TestBinaryEntropy:
    def test_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_peak(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2), abs=1e-12)

    def test_symmetry(self):
        assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8), abs=1e-12)

    def test_domain(self):
        for bad in (-0.01, 1.01):
            with pytest.raises(ValueError):
                binary_entropy(bad)


class TestFannesBound:
    def test_value(self):
        want = 0.1 * math.log(4) + binary_entropy(0.1)
        assert entropy_fannes_bound(0.1, 4) == pytest.approx(want, abs=1e-12)

    def test_zero_distance(self):
        assert entropy_fannes_bound(0.0, 8) == 0.0

    def test_small_dimension_rejected(self):
        with pytest.raises(ValueError):
            entropy_fannes_bound(0.1, 1)


class TestEntropyBuresBounds:
    def test_d8_lipschitz_constant(self):
        assert entropy_bures_lipschitz(8) == pytest.approx(9.42477796076938, abs=1e-9)

    def test_small_d_gated(self):
        with pytest.raises(ValueError):
            entropy_bures_lipschitz(4)
        b = entropy_bures_bounds(4)
        assert b.bures_lipschitz is None
        assert b.holder_trace is None
        assert b.holder_hs is None
        assert b.bures_angle_coeff == pytest.approx(4.02060316703158, abs=1e-9)

    def test_d16_full_record(self):
        b = entropy_bures_bounds(16)
        assert b.bures_angle_coeff == pytest.approx(8.0, abs=1e-12)
        lips = math.pi * math.log(16) / math.log(2)
        assert b.bures_lipschitz == pytest.approx(lips, abs=1e-9)
        assert b.holder_trace == pytest.approx(math.sqrt(2) * lips, abs=1e-9)
        assert b.holder_hs == pytest.approx(2.0 * lips, abs=1e-9)

    def test_fallback_always_present(self):
        for d in (2, 4, 16):
            assert entropy_bures_bounds(d).fallback_lipschitz == pytest.approx(
                3.35 * math.log(d), abs=1e-12
            )


class TestLevyParameters:
    def test_erg_width_frozen_value(self):
        p = levy_parameters(100, 1.0)
        assert p.n == 2 * 100 * 100
        assert p.upsilon_erg == pytest.approx(0.12533141373155, abs=1e-12)

    def test_ent_width_frozen_value(self):
        p = levy_parameters(10, 1.0)
        assert p.upsilon_ent == pytest.approx(
            17.7245385090552 * math.log(10) / 10, abs=1e-9
        )

    def test_widths_scale_with_norm(self):
        a = levy_parameters(16, 1.0)
        b = levy_parameters(16, 2.5)
        assert b.upsilon_erg == pytest.approx(2.5 * a.upsilon_erg, abs=1e-12)
        # the entropy width does not depend on the Hamiltonian at all
        assert b.upsilon_ent == pytest.approx(a.upsilon_ent, abs=1e-12)

    def test_alpha_override(self):
        base = levy_parameters(16, 1.0)
        halved = levy_parameters(16, 1.0, alpha=base.alpha / 2)
        assert halved.upsilon_erg == pytest.approx(
            math.sqrt(2) * base.upsilon_erg, abs=1e-12
        )
        assert halved.upsilon_ent == pytest.approx(
            math.sqrt(2) * base.upsilon_ent, abs=1e-12
        )

    def test_domain(self):
        with pytest.raises(ValueError):
            levy_parameters(1, 1.0)
        with pytest.raises(ValueError):
            levy_parameters(4, 0.0)
        with pytest.raises(ValueError):
            levy_parameters(4, 1.0, alpha=0.0)


class TestLevyTailBound:
    def test_capped_at_one(self):
        assert levy_tail_bound(0.0, 1.0) == 1.0
        # 3/e > 1 so the cap still binds at ell = upsilon
        assert levy_tail_bound(1.0, 1.0) == 1.0

    def test_two_widths_out(self):
        assert levy_tail_bound(2.0, 1.0) == pytest.approx(0.0549469166662025, abs=1e-12)

    def test_monotone_in_ell(self):
        vals = [levy_tail_bound(x, 0.3) for x in np.linspace(0, 2, 30)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            levy_tail_bound(-0.1, 1.0)
        with pytest.raises(ValueError):
            levy_tail_bound(0.5, 0.0)
