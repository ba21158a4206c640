"""Real-space kernel quadratures against the multiplier operators.

The quadratures are the independent reference: they never touch Fourier
space for the singular kernel itself, so agreement here certifies the
multiplier symbols rather than restating them.
"""

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from toruslab.grid import SpectralField, TorusGrid
from toruslab.kernel_oracle import derive_constant, kernel_apply
from toruslab.operators import frac_lap, hilbert, inv_frac_lap


def closed_form_constant(gamma, n):
    # independent closed form for the kernel normalization
    return 4 ** (gamma / 2) * gamma_fn((n + gamma) / 2) / (
        np.pi ** (n / 2) * abs(gamma_fn(-gamma / 2))
    )


def low_mode_field(n=64):
    g = TorusGrid((n,))
    x = g.axes()[0]
    return g, SpectralField.from_phys(g, 0.7 + np.cos(x) + 0.6 * np.sin(2 * x) + 0.3 * np.cos(3 * x))


def seeded_field(seed, n=64, kmax=10):
    rng = np.random.default_rng(seed)
    g = TorusGrid((n,))
    c = np.zeros(n, dtype=complex)
    for k in range(1, kmax + 1):
        c[k] = (rng.standard_normal() + 1j * rng.standard_normal()) / k
        c[-k] = np.conj(c[k])
    c[0] = rng.standard_normal()
    return g, SpectralField.from_phys(g, SpectralField.from_coeffs(g, c).phys)


class TestHilbertKernel:
    def test_matches_multiplier_on_seeded_fields(self):
        for seed in range(5):
            g, f = seeded_field(seed)
            out = kernel_apply("hilbert", f)
            assert np.max(np.abs(out.phys - hilbert(f).phys)) < 1e-12

    def test_mean_annihilated(self):
        g = TorusGrid((32,))
        f = SpectralField.from_phys(g, np.full(32, 3.0))
        assert np.max(np.abs(kernel_apply("hilbert", f).phys)) < 1e-13

    def test_rejects_2d(self):
        g = TorusGrid((16, 16))
        f = SpectralField.from_phys(g, np.ones(g.sizes))
        with pytest.raises(ValueError):
            kernel_apply("hilbert", f)


class TestLogKernel:
    def test_low_modes(self):
        g = TorusGrid((64,))
        x = g.axes()[0]
        for k, tol in [(1, 1e-7), (2, 1e-7), (5, 5e-6)]:
            f = SpectralField.from_phys(g, np.cos(k * x))
            err = np.max(np.abs(kernel_apply("inv_frac_lap", f).phys - inv_frac_lap(f).phys))
            assert err < tol, (k, err)

    def test_constant_response(self):
        g = TorusGrid((64,))
        f = SpectralField.from_phys(g, np.full(64, 2.0))
        out = kernel_apply("inv_frac_lap", f)
        assert np.max(np.abs(out.phys - 2.0 * 2.0 * np.log(2.0))) < 1e-12

    def test_fifth_order_convergence(self):
        errs = []
        for n in (32, 64, 128):
            g = TorusGrid((n,))
            f = SpectralField.from_phys(g, np.cos(g.axes()[0]))
            errs.append(np.max(np.abs(kernel_apply("inv_frac_lap", f).phys - inv_frac_lap(f).phys)))
        assert errs[0] > 10 * errs[1] > 100 * errs[2]

    def test_rejects_2d(self):
        g = TorusGrid((16, 16))
        f = SpectralField.from_phys(g, np.ones(g.sizes))
        with pytest.raises(ValueError):
            kernel_apply("inv_frac_lap", f)


class TestFracLapKernel:
    @pytest.mark.parametrize("gamma", [0.5, 1.0, 1.5])
    def test_matches_multiplier(self, gamma):
        g, f = low_mode_field()
        want = frac_lap(f, gamma)
        out = kernel_apply("frac_lap", f, gamma=gamma, trunc=1000)
        rel = np.max(np.abs(out.phys - want.phys)) / np.max(np.abs(want.phys))
        assert rel < 1e-8

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 1.5])
    def test_truncation_convergence(self, gamma):
        g, f = low_mode_field()
        want = frac_lap(f, gamma)
        scale = np.max(np.abs(want.phys))
        discrepancies = [
            np.max(np.abs(kernel_apply("frac_lap", f, gamma=gamma, trunc=k).phys - want.phys))
            / scale
            for k in (100, 1000)
        ]
        assert discrepancies[0] > discrepancies[1]

    def test_seeded_fields(self):
        for seed in range(3):
            g, f = seeded_field(seed)
            want = frac_lap(f, 0.5)
            out = kernel_apply("frac_lap", f, gamma=0.5, trunc=1000)
            rel = np.max(np.abs(out.phys - want.phys)) / np.max(np.abs(want.phys))
            assert rel < 1e-7

    def test_2d_matches_multiplier_at_cell_error_order(self):
        # no cell correction in 2d: O(h^(2-gamma)) quadrature accuracy, so
        # check the level and that refining the grid shrinks it accordingly
        rels = []
        for n in (32, 64):
            g = TorusGrid((n, n))
            x, y = g.meshgrid()
            f = SpectralField.from_phys(g, np.cos(x) + 0.5 * np.sin(x + y))
            want = frac_lap(f, 1.0)
            out = kernel_apply("frac_lap", f, gamma=1.0, trunc=40)
            rels.append(np.max(np.abs(out.phys - want.phys)) / np.max(np.abs(want.phys)))
        assert rels[0] < 5e-2
        assert rels[0] > 1.5 * rels[1]

    def test_validation(self):
        g, f = low_mode_field(16)
        with pytest.raises(ValueError):
            kernel_apply("frac_lap", f)  # gamma missing
        with pytest.raises(ValueError):
            kernel_apply("frac_lap", f, gamma=2.0)
        with pytest.raises(ValueError):
            kernel_apply("frac_lap", f, gamma=-0.5)
        with pytest.raises(ValueError):
            kernel_apply("frac_lap", f, gamma=1.0, trunc=0)
        with pytest.raises(ValueError):
            kernel_apply("smooth", f)


class TestDerivedConstant:
    @pytest.mark.parametrize("gamma,tol", [(0.5, 1e-8), (1.0, 1e-8), (1.5, 1e-8)])
    def test_1d_against_closed_form(self, gamma, tol):
        derived = derive_constant(gamma, 1)
        assert abs(derived - closed_form_constant(gamma, 1)) / closed_form_constant(gamma, 1) < tol

    def test_1d_special_value(self):
        # gamma = 1 kernel in 1d is the classical 1/(pi d^2) principal value
        assert derive_constant(1.0, 1) == pytest.approx(1 / np.pi, rel=1e-10)

    @pytest.mark.parametrize("gamma,tol", [(0.5, 2e-3), (1.0, 2e-3), (1.5, 5e-2)])
    def test_2d_against_closed_form(self, gamma, tol):
        derived = derive_constant(gamma, 2)
        assert abs(derived - closed_form_constant(gamma, 2)) / closed_form_constant(gamma, 2) < tol

    def test_2d_special_value(self):
        assert derive_constant(1.0, 2) == pytest.approx(1 / (2 * np.pi), rel=2e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            derive_constant(1.0, 3)
        with pytest.raises(ValueError):
            derive_constant(0.0, 1)
