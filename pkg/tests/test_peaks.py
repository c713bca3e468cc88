"""Extremum detection: thresholds, refinement accuracy, dip flagging."""

import math

import numpy as np
import pytest

from optospec import ParameterError, detect_peaks, make_spectrum, uniform_grid


def lorentzian(x, center, hwhm, height=1.0):
    return height * hwhm**2 / ((x - center) ** 2 + hwhm**2)


def as_spectrum(x, y):
    return make_spectrum(x, y, {"mode": "test"})


class TestDetection:
    def test_single_lorentzian(self):
        x = uniform_grid(-3.0, 3.0, 1201)
        spec = as_spectrum(x, lorentzian(x, 0.4, 0.2))
        found = detect_peaks(spec)
        assert len(found) == 1
        peak = found[0]
        assert not peak.is_dip
        assert peak.location == pytest.approx(0.4, abs=1e-4)
        assert peak.height == pytest.approx(1.0, rel=1e-4)
        assert peak.width == pytest.approx(0.4, rel=0.01)  # FWHM = 2 x hwhm

    def test_off_grid_center_refined(self):
        # true max between samples; parabolic refinement recovers it to a
        # small fraction of the step
        x = uniform_grid(-2.0, 2.0, 401)  # step 0.01
        center = 0.40371
        spec = as_spectrum(x, lorentzian(x, center, 0.15))
        found = detect_peaks(spec)
        assert len(found) == 1
        assert abs(found[0].location - center) < 2e-3

    def test_min_height_filter(self):
        x = uniform_grid(-6.0, 6.0, 2401)
        y = lorentzian(x, -1.0, 0.1) + 0.03 * lorentzian(x, 2.0, 0.1)
        spec = as_spectrum(x, y)
        assert len(detect_peaks(spec, 0.05)) == 1
        found = detect_peaks(spec, 0.01)
        assert sum(not p.is_dip for p in found) == 2

    def test_dip_between_peaks(self):
        x = uniform_grid(-4.0, 4.0, 1601)
        y = lorentzian(x, -1.0, 0.3) + lorentzian(x, 1.0, 0.3)
        spec = as_spectrum(x, y)
        found = detect_peaks(spec)
        dips = [p for p in found if p.is_dip]
        assert len(dips) == 1
        assert dips[0].location == pytest.approx(0.0, abs=1e-6)
        assert math.isnan(dips[0].width)

    def test_no_dip_without_flanking_peak(self):
        # a minimum next to a sub-threshold maximum is not a dip
        x = uniform_grid(-6.0, 6.0, 2401)
        y = lorentzian(x, -1.0, 0.1) + 0.02 * lorentzian(x, 2.0, 0.1)
        found = detect_peaks(as_spectrum(x, y), 0.05)
        assert not any(p.is_dip for p in found)

    def test_flat_density_no_extrema(self):
        x = uniform_grid(-1.0, 1.0, 101)
        assert detect_peaks(as_spectrum(x, np.ones_like(x))) == []

    def test_overlapping_lines_width_nan(self):
        # the half level is not bracketed inside the basin when lines merge
        x = uniform_grid(-2.0, 2.0, 801)
        y = lorentzian(x, -0.12, 0.2) + lorentzian(x, 0.12, 0.2)
        found = [p for p in detect_peaks(as_spectrum(x, y)) if not p.is_dip]
        assert any(math.isnan(p.width) for p in found)

    def test_requires_uniform_grid(self):
        x = np.concatenate([np.linspace(-1, 0, 50), np.linspace(0.01, 2, 60)])
        spec = as_spectrum(np.sort(x), np.ones(110))
        with pytest.raises(ParameterError):
            detect_peaks(spec)

    def test_rejects_bad_threshold(self):
        x = uniform_grid(-1.0, 1.0, 101)
        spec = as_spectrum(x, lorentzian(x, 0.0, 0.2))
        with pytest.raises(ParameterError):
            detect_peaks(spec, 0.0)
        with pytest.raises(ParameterError):
            detect_peaks(spec, 1.5)

    def test_results_sorted_by_location(self):
        x = uniform_grid(-6.0, 6.0, 2401)
        y = (
            lorentzian(x, -2.0, 0.2)
            + lorentzian(x, 0.5, 0.2, 0.8)
            + lorentzian(x, 3.0, 0.2, 0.6)
        )
        found = detect_peaks(as_spectrum(x, y))
        locs = [p.location for p in found]
        assert locs == sorted(locs)
