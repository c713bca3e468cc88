"""Parameter derivation and mirror-state expansion."""

import numpy as np
import pytest

from optospec import (
    CoherentState,
    DisplacedGround,
    NumberState,
    ParameterError,
    SuperpositionState,
    ThermalState,
    TruncationConfig,
    TruncationError,
    derive_params,
    overlap,
    state_coefficients,
)

TRUNC = TruncationConfig(64, 1e-10)


class TestDeriveParams:
    def test_zero_coupling(self):
        p = derive_params(1.0, 0.0, 0.2)
        assert p.beta_0 == 0.0
        assert p.delta == 0.0

    def test_figure_parameter_set(self):
        # g/omega_M = 0.8, gamma_c/omega_M = 0.2 -> beta_0 = 0.8, delta = 0.64
        p = derive_params(1.0, 0.8, 0.2)
        assert p.beta_0 == pytest.approx(0.8, rel=1e-15)
        assert p.delta == pytest.approx(0.64, rel=1e-15)

    def test_non_unit_omega(self):
        p = derive_params(2.0, 1.0, 0.1)
        assert p.beta_0 == pytest.approx(0.5, rel=1e-15)
        assert p.delta == pytest.approx(0.5, rel=1e-15)

    def test_idempotent_bit_for_bit(self):
        p = derive_params(1.0, 0.37, 0.21)
        q = derive_params(p.omega_M, p.g, p.gamma_c)
        assert (q.omega_M, q.g, q.gamma_c) == (p.omega_M, p.g, p.gamma_c)
        assert q == p

    def test_delta_consistency_exact(self):
        for g, w in [(0.8, 1.0), (0.1, 3.0), (1.7, 0.9)]:
            p = derive_params(w, g, 0.2)
            assert p.delta == p.beta_0 * p.g

    @pytest.mark.parametrize(
        "args",
        [(0.0, 0.1, 0.2), (-1.0, 0.1, 0.2), (1.0, -0.1, 0.2), (1.0, 0.1, 0.0),
         (1.0, 0.1, -0.2), (float("nan"), 0.1, 0.2), (1.0, float("inf"), 0.2)],
    )
    def test_invalid(self, args):
        with pytest.raises(ParameterError):
            derive_params(*args)


PARAMS = derive_params(1.0, 0.8, 0.2)


class TestStateCoefficients:
    def test_number_state(self):
        c = state_coefficients(NumberState(3), PARAMS, TRUNC)
        assert c.kind == "pure"
        expected = np.zeros(65)
        expected[3] = 1.0
        assert np.array_equal(c.values.real, expected)
        assert c.tail_deficit == 0.0

    def test_number_state_beyond_cutoff(self):
        with pytest.raises(TruncationError):
            state_coefficients(NumberState(65), PARAMS, TRUNC)

    def test_coherent_vacuum(self):
        c = state_coefficients(CoherentState(0.0), PARAMS, TRUNC)
        assert c.values[0] == 1.0
        assert np.all(c.values[1:] == 0.0)

    def test_coherent_amplitudes(self):
        beta = 3.0
        c = state_coefficients(CoherentState(beta), PARAMS, TRUNC)
        # ratio check avoids giant factorials: C_{n+1}/C_n = beta/sqrt(n+1)
        ratios = c.values.real[1:20] / c.values.real[0:19]
        assert ratios == pytest.approx(beta / np.sqrt(np.arange(1, 20)), rel=1e-12)
        assert c.values[0].real == pytest.approx(np.exp(-beta**2 / 2), rel=1e-10)
        assert np.sum(np.abs(c.values) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_coherent_complex_rejected(self):
        with pytest.raises(ParameterError):
            state_coefficients(CoherentState(1 + 1j), PARAMS, TRUNC)

    def test_coherent_cutoff_too_small(self):
        with pytest.raises(TruncationError) as err:
            state_coefficients(CoherentState(3.0), PARAMS, TruncationConfig(5, 1e-10))
        assert 0.0 < err.value.deficit <= 1.0

    def test_thermal_weights_closed_form(self):
        trunc = TruncationConfig(50, 1e-6)
        c = state_coefficients(ThermalState(2.0), PARAMS, trunc)
        assert c.kind == "mixed"
        n = np.arange(51)
        assert c.values.real == pytest.approx(2.0**n / 3.0 ** (n + 1), rel=1e-12)
        # retained weight is the closed-form geometric partial sum
        assert np.sum(c.values.real) == pytest.approx(1.0 - (2.0 / 3.0) ** 51, rel=1e-12)

    def test_thermal_zero_temperature(self):
        c = state_coefficients(ThermalState(0.0), PARAMS, TRUNC)
        assert c.values[0] == 1.0 and np.all(c.values[1:] == 0.0)

    def test_thermal_negative_rejected(self):
        with pytest.raises(ParameterError):
            state_coefficients(ThermalState(-0.5), PARAMS, TRUNC)

    def test_displaced_ground_matches_overlap_column(self):
        c = state_coefficients(DisplacedGround(), PARAMS, TRUNC)
        expected = np.array([overlap(n, 0, 0.8) for n in range(65)])
        assert c.values.real == pytest.approx(expected, abs=1e-13)
        # explicit form: exp(-0.32) * 0.8^n / sqrt(n!)
        assert c.values[0].real == pytest.approx(np.exp(-0.32), rel=1e-12)
        assert c.values[1].real == pytest.approx(0.8 * np.exp(-0.32), rel=1e-12)

    @pytest.mark.parametrize(
        "state",
        [NumberState(0), NumberState(7), CoherentState(3.0), CoherentState(-1.2),
         DisplacedGround(), ThermalState(2.0), ThermalState(0.3)],
    )
    def test_deficit_plus_retained_is_one(self, state):
        c = state_coefficients(state, PARAMS, TRUNC)
        if c.kind == "pure":
            # pure vectors are renormalized after the deficit is recorded, so
            # reconstruct the raw retained weight from the deficit itself
            assert np.sum(np.abs(c.values) ** 2) == pytest.approx(1.0, abs=1e-12)
            assert 0.0 <= c.tail_deficit < 1e-10
        else:
            assert np.sum(c.values.real) + c.tail_deficit == pytest.approx(
                1.0, abs=1e-12
            )

    def test_superposition_roundtrip(self):
        coeffs = tuple(np.array([1.0, 1.0j]) / np.sqrt(2.0))
        c = state_coefficients(SuperpositionState(coeffs), PARAMS, TRUNC)
        assert c.values[0] == pytest.approx(coeffs[0], abs=1e-15)
        assert c.values[1] == pytest.approx(coeffs[1], abs=1e-15)

    def test_superposition_unnormalized_rejected(self):
        with pytest.raises(ParameterError):
            state_coefficients(SuperpositionState((1.0, 1.0)), PARAMS, TRUNC)

    def test_values_read_only(self):
        c = state_coefficients(NumberState(0), PARAMS, TRUNC)
        with pytest.raises(ValueError):
            c.values[0] = 2.0
