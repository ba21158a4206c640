"""Initial-condition library: RNG stability, determinism, shapes, validation."""

import numpy as np
import pytest

from toruslab.diagnostics import entropy, functionals
from toruslab.grid import TorusGrid, forward_dft
from toruslab.initial import make_initial, splitmix64, unit_uniform

MASK = (1 << 64) - 1


def _reference_stream(seed, n):
    # stateful textbook form of the same generator, advanced n times
    state = seed & MASK
    out = []
    for _ in range(n):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


class TestGenerator:
    def test_pinned_words_seed_zero(self):
        # first outputs of the standard generator for seed 0
        got = splitmix64(0, np.arange(3))
        assert [int(v) for v in got] == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
        ]

    def test_counter_mode_matches_stateful_reference(self):
        for seed in (0, 1, 42, 2**63 + 7):
            got = [int(v) for v in splitmix64(seed, np.arange(16))]
            assert got == _reference_stream(seed, 16)

    def test_order_independence(self):
        # a draw depends only on (seed, counter), never on neighbors
        all_at_once = splitmix64(9, np.arange(10))
        one_by_one = np.array([splitmix64(9, [i])[0] for i in range(10)])
        assert np.array_equal(all_at_once, one_by_one)

    def test_uniform_range_and_spread(self):
        u = unit_uniform(3, np.arange(20000))
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.01
        assert abs(np.var(u) - 1.0 / 12.0) < 0.005


class TestRandomTrig:
    def test_repeat_draws_identical(self):
        grid = TorusGrid((128,))
        a = make_initial(grid, "random_trig", {"k_max": 8, "amp": 0.3, "seed": 42})
        b = make_initial(grid, "random_trig", {"k_max": 8, "amp": 0.3, "seed": 42})
        assert a.phys.tobytes() == b.phys.tobytes()

    def test_seeds_differ(self):
        grid = TorusGrid((64,))
        a = make_initial(grid, "random_trig", {"k_max": 4, "amp": 0.5, "seed": 1})
        b = make_initial(grid, "random_trig", {"k_max": 4, "amp": 0.5, "seed": 2})
        assert np.max(np.abs(a.phys - b.phys)) > 1e-3

    def test_band_limited_real_mean_free(self):
        grid = TorusGrid((128,))
        f = make_initial(grid, "random_trig", {"k_max": 6, "amp": 0.4, "seed": 5})
        assert np.all(np.isreal(f.phys))
        assert abs(f.mean()) < 1e-15
        coeffs = forward_dft(grid, f.phys)
        outside = np.abs(grid.k_abs()) > 6.0
        assert np.max(np.abs(coeffs[outside])) < 1e-15

    def test_coefficient_amplitude_bound(self):
        grid = TorusGrid((64,))
        amp = 0.25
        f = make_initial(grid, "random_trig", {"k_max": 10, "amp": amp, "seed": 11})
        coeffs = forward_dft(grid, f.phys)
        # symmetrized parts are averages of draws from [-amp, amp]
        assert np.max(np.abs(coeffs.real)) <= amp + 1e-12
        assert np.max(np.abs(coeffs.imag)) <= amp + 1e-12

    def test_nonneg_shift_with_floor(self):
        grid = TorusGrid((128,))
        f = make_initial(
            grid,
            "random_trig",
            {"k_max": 8, "amp": 0.3, "seed": 42, "nonneg_shift": True, "floor": 0.1},
        )
        assert abs(np.min(f.phys) - 0.1) < 1e-13

    def test_shift_skipped_when_already_above_floor(self):
        grid = TorusGrid((64,))
        base = make_initial(grid, "random_trig", {"k_max": 2, "amp": 1e-3, "seed": 3})
        shifted = make_initial(
            grid,
            "random_trig",
            {"k_max": 2, "amp": 1e-3, "seed": 3, "nonneg_shift": True, "floor": -1.0},
        )
        assert np.array_equal(base.phys, shifted.phys)

    def test_two_dimensional_draw(self):
        grid = TorusGrid((32, 32))
        a = make_initial(grid, "random_trig", {"k_max": 4, "amp": 0.3, "seed": 7})
        b = make_initial(grid, "random_trig", {"k_max": 4, "amp": 0.3, "seed": 7})
        assert a.phys.shape == (32, 32)
        assert a.phys.tobytes() == b.phys.tobytes()
        assert abs(a.mean()) < 1e-15


class TestNamedShapes:
    def test_constant_entropy_anchor(self):
        grid = TorusGrid((64,))
        f = make_initial(grid, "constant", {"c": 2.0})
        want = 2.0 * np.pi * (2.0 * np.log(2.0) - 1.0)
        assert abs(entropy(f) - want) < 1e-12

    def test_cosine_min_and_wiener(self):
        grid = TorusGrid((128,))
        f = make_initial(grid, "cosine", {"c": 1.0, "a": 0.5, "k": 1})
        assert abs(np.min(f.phys) - 0.5) < 1e-13
        rec = functionals(f)
        assert abs(rec.wiener_l1 - 0.5) < 1e-13

    def test_cosine_mode_number(self):
        grid = TorusGrid((128,))
        f = make_initial(grid, "cosine", {"c": 0.0, "a": 1.0, "k": 3})
        coeffs = forward_dft(grid, f.phys)
        assert abs(coeffs[3] - 0.5) < 1e-14
        assert abs(coeffs[-3] - 0.5) < 1e-14

    def test_bump_profile(self):
        grid = TorusGrid((256,))
        f = make_initial(
            grid, "bump", {"width": 0.5, "height": 2.0, "center": np.pi, "floor": 0.1}
        )
        x = grid.axes()[0]
        peak = np.argmax(f.phys)
        assert abs(x[peak] - np.pi) < grid.spacing[0]
        assert abs(np.max(f.phys) - 2.1) < 1e-12
        assert np.min(f.phys) >= 0.1 - 1e-12

    def test_bump_2d_scalar_center(self):
        grid = TorusGrid((32, 32))
        f = make_initial(grid, "bump", {"width": 1.0, "height": 1.0})
        assert abs(f.phys[0, 0] - 1.0) < 1e-12
        assert np.min(f.phys) > 0.0


class TestValidation:
    def test_unknown_kind(self):
        grid = TorusGrid((32,))
        with pytest.raises(ValueError, match="unknown initial kind"):
            make_initial(grid, "sawtooth", {})

    def test_missing_parameter(self):
        grid = TorusGrid((32,))
        with pytest.raises(ValueError, match="missing parameters"):
            make_initial(grid, "cosine", {"c": 1.0})

    def test_unknown_parameter(self):
        grid = TorusGrid((32,))
        with pytest.raises(ValueError, match="unknown parameters"):
            make_initial(grid, "constant", {"c": 1.0, "slope": 2.0})

    def test_bump_center_dimension_mismatch(self):
        grid = TorusGrid((32, 32))
        with pytest.raises(ValueError, match="center"):
            make_initial(grid, "bump", {"width": 1.0, "height": 1.0, "center": (0.0,)})

    def test_bump_width_positive(self):
        grid = TorusGrid((32,))
        with pytest.raises(ValueError, match="width"):
            make_initial(grid, "bump", {"width": 0.0, "height": 1.0})
