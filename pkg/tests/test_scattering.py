"""Scattering amplitudes and spectra: channels, interference, unitarity."""

import math
import warnings

import numpy as np
import pytest

from optospec import (
    NumberState,
    ParameterError,
    PhotonWavepacket,
    ThermalState,
    TruncationConfig,
    derive_params,
    detect_peaks,
    scattering_longtime,
    scattering_spectrum,
    scattering_transient,
    tail_extended_grid,
    uniform_grid,
)

PARAMS = derive_params(1.0, 0.8, 0.2)
GRID = uniform_grid(-6.0, 6.0, 4001)
TRUNC = TruncationConfig(64, 1e-10)
FIG4_PACKET = PhotonWavepacket(delta_0=0.0, epsilon=2.0)


class TestWavepacket:
    def test_requires_positive_width(self):
        with pytest.raises(ParameterError):
            PhotonWavepacket(delta_0=0.0, epsilon=0.0)
        with pytest.raises(ParameterError):
            PhotonWavepacket(delta_0=0.0, epsilon=-1.0)

    def test_unit_norm(self):
        grid = tail_extended_grid(20.0, 0.01, 100000.0, 800)
        packet = PhotonWavepacket(delta_0=0.3, epsilon=2.0)
        density = np.abs(packet.amplitude(grid)) ** 2
        trapz = getattr(np, "trapezoid", np.trapz)
        assert trapz(density, grid) == pytest.approx(1.0, abs=5e-5)


class TestTransient:
    def test_initial_condition_exact(self):
        amps = scattering_transient(PARAMS, 1, FIG4_PACKET, 0.0, GRID, TRUNC)
        assert np.all(amps.A == 0.0)
        expected = math.sqrt(2.0 / math.pi) / (GRID - 0.0 + 2.0j)
        assert np.abs(amps.B[1] - expected).max() == 0.0
        others = np.delete(np.arange(65), 1)
        assert np.all(amps.B[others] == 0.0)

    def test_cavity_emptied_at_late_times(self):
        t = 12.0 / PARAMS.gamma_c
        amps = scattering_transient(PARAMS, 0, FIG4_PACKET, t, GRID, TRUNC)
        assert float(np.sum(np.abs(amps.A) ** 2)) < 1e-3

    def test_probability_conserved(self):
        grid = tail_extended_grid(10.0, 0.005, 200000.0, 900)
        trunc = TruncationConfig(16, 1e-8)
        for t in (0.0, 1.0, 4.0, 20.0):
            amps = scattering_transient(PARAMS, 0, FIG4_PACKET, t, grid, trunc)
            assert amps.total_probability() == pytest.approx(1.0, abs=3e-4)

    def test_converges_to_longtime_monotonically(self):
        grid = uniform_grid(-4.0, 4.0, 801)
        trunc = TruncationConfig(16, 1e-8)
        limit = scattering_longtime(PARAMS, 0, FIG4_PACKET, grid, trunc)
        m = np.arange(trunc.dim)
        gamma = PARAMS.gamma_c
        eps = FIG4_PACKET.epsilon
        previous = np.inf
        for t in (10.0, 25.0, 40.0, 60.0):
            amps = scattering_transient(PARAMS, 0, FIG4_PACKET, t, grid, trunc)
            phase = np.exp(-1j * (m[:, None] * 1.0 + grid[None, :]) * t)
            gap = np.max(np.abs(amps.B - phase * limit.B))
            assert gap < previous
            assert gap < 10.0 * (math.exp(-0.5 * gamma * t) + math.exp(-eps * t))
            previous = gap

    def test_pole_collision_warns_and_stays_finite(self):
        # epsilon = gamma_c/2 with the carrier on the n = n0 resonance
        params = derive_params(1.0, 0.8, 0.2)
        packet = PhotonWavepacket(delta_0=-params.delta, epsilon=0.1)
        with pytest.warns(RuntimeWarning, match="degenerate"):
            amps = scattering_transient(params, 0, packet, 3.0, GRID, TRUNC)
        assert np.all(np.isfinite(amps.B.real)) and np.all(np.isfinite(amps.A))
        # the perturbed solution should agree with a nearby regular epsilon
        near = scattering_transient(
            params, 0, PhotonWavepacket(-params.delta, 0.1 + 1e-6), 3.0, GRID, TRUNC
        )
        assert np.abs(amps.B - near.B).max() < 1e-2


class TestLongtime:
    def test_zero_coupling_reflection(self):
        # single-mode cavity: |reflection factor| = 1 so S equals the packet
        params = derive_params(1.0, 0.0, 0.2)
        packet = PhotonWavepacket(delta_0=0.4, epsilon=0.7)
        amps = scattering_longtime(params, 0, packet, GRID, TRUNC)
        expected = (
            math.sqrt(0.7 / math.pi)
            / (GRID - 0.4 + 0.7j)
            * (1.0 - 0.2j / (GRID + 0.1j))
        )
        assert np.abs(amps.B[0] - expected).max() < 1e-14
        assert np.abs(np.abs(amps.B[0]) - np.abs(packet.amplitude(GRID))).max() < 1e-14

    def test_cavity_channel_reduces_to_filtered_packet(self):
        # with identity overlaps (g = 0) the cavity channel alone is the
        # packet filtered by the bare cavity Lorentzian
        params = derive_params(1.0, 0.0, 0.2)
        packet = PhotonWavepacket(delta_0=0.0, epsilon=2.0)
        amps = scattering_longtime(params, 0, packet, GRID, TRUNC)
        direct = packet.amplitude(GRID)
        cavity = amps.B[0] - direct
        expected = -math.sqrt(2.0 / math.pi) * 0.2j / ((GRID + 2.0j) * (GRID + 0.1j))
        assert np.abs(cavity - expected).max() < 1e-14

    def test_pole_lattice_of_cavity_channel(self):
        # second-channel denominators vanish in real part on the resonance
        # lattice (n - m) omega_M - delta
        from optospec.emission import _pole_inverse

        inv_d = _pole_inverse(PARAMS, GRID, 65)
        r = np.arange(-64, 65)
        for idx in (60, 64, 70):
            poles = GRID[np.argmin(np.abs(inv_d[idx]) ** -1)]
            assert abs(poles - (r[idx] - PARAMS.delta)) < 0.003


class TestSpectrum:
    def test_zero_coupling_unit_norm(self):
        params = derive_params(1.0, 0.0, 0.2)
        grid = tail_extended_grid(20.0, 0.01, 100000.0, 800)
        spec = scattering_spectrum(
            params, NumberState(0), FIG4_PACKET, grid, TRUNC, norm_warn_tolerance=1.0
        )
        assert spec.norm_deficit < 1e-4

    def test_fig4_unitarity(self):
        grid = tail_extended_grid(66.0, 0.02, 60000.0, 600)
        spec = scattering_spectrum(
            PARAMS, NumberState(0), FIG4_PACKET, grid, TRUNC
        )
        assert spec.norm_deficit < 1e-4

    def test_fig4_has_peaks_and_dips(self):
        spec = scattering_spectrum(
            PARAMS, NumberState(0), FIG4_PACKET, GRID, TRUNC, norm_warn_tolerance=1.0
        )
        found = detect_peaks(spec, 0.05)
        assert any(p.is_dip for p in found)
        assert sum(not p.is_dip for p in found) >= 2

    def test_no_sidebands_below_coupling_threshold(self):
        params = derive_params(1.0, 0.1, 0.2)
        spec = scattering_spectrum(
            params, NumberState(0), FIG4_PACKET, GRID, TRUNC, norm_warn_tolerance=1.0
        )
        found = detect_peaks(spec, 0.05)
        assert sum(not p.is_dip for p in found) == 1

    def test_red_detuned_narrowband_red_sidebands_only(self):
        packet = PhotonWavepacket(delta_0=-PARAMS.delta, epsilon=0.05)
        spec = scattering_spectrum(
            PARAMS, NumberState(0), packet, GRID, TRUNC, norm_warn_tolerance=1.0
        )
        peaks = [p for p in detect_peaks(spec, 0.05) if not p.is_dip]
        assert peaks
        assert all(p.location <= PARAMS.gamma_c for p in peaks)

    def test_thermal_mixture_linearity(self):
        trunc = TruncationConfig(16, 1e-6)
        loose = TruncationConfig(16, 0.9)
        grid = uniform_grid(-4.0, 4.0, 401)
        nbar = 0.4
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            mixed = scattering_spectrum(
                PARAMS, ThermalState(nbar), FIG4_PACKET, grid, trunc,
                norm_warn_tolerance=1.0,
            )
            n = np.arange(trunc.dim)
            weights = nbar**n / (nbar + 1.0) ** (n + 1)
            total = np.zeros_like(grid)
            for n0, w in enumerate(weights):
                amps = scattering_longtime(PARAMS, n0, FIG4_PACKET, grid, loose)
                total += w * np.sum(np.abs(amps.B) ** 2, axis=0)
        assert np.abs(mixed.density - total).max() < 1e-12

    def test_metadata_fields(self):
        spec = scattering_spectrum(
            PARAMS, NumberState(0), FIG4_PACKET, GRID, TRUNC, norm_warn_tolerance=1.0
        )
        assert spec.metadata["mode"] == "scattering"
        assert spec.metadata["epsilon"] == 2.0
