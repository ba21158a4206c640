"""Named demo configurations, one per headline property of the solver.

Each entry is a complete config document (see config.py for the schema) ready
for `toruslab run --scenario NAME`. They double as reference points for the
acceptance tests, which reuse these dictionaries instead of re-typing the
parameters.

The steepening run is exploratory: with no dissipation of any kind the 1d
transport model sharpens fronts until the grid can no longer represent them,
so it ships without pass/fail checks and the run report flags resolution loss.
"""

from __future__ import annotations

import copy


def _base(sizes, equation, t_end, dt, stride):
    return {
        "grid": {"sizes": list(sizes)},
        "model": {"equation": equation},
        "stepper": {"t_end": t_end, "dt": dt, "snapshot_stride": stride},
        "initial": {"kind": "cosine", "params": {"c": 1.0, "a": 0.5, "k": 1}},
        # snapshots are opt-in per scenario; dense-stride runs would write
        # one file pair per retained sample
        "outputs": {"formats": ["csv", "metadata"]},
        "checks": [],
    }


def entropy_balance() -> dict:
    """1d divergence-form flux with a small spectral viscosity; the entropy
    functional must fall at exactly the rate the dissipation terms predict."""
    doc = _base((512,), "1d", 1.0, 1e-4, 1)
    doc["model"].update(delta=1.0, nu=0.0, gamma=0.0, epsilon=1e-3)
    doc["initial"]["require_nonneg"] = True
    doc["checks"] = [
        "entropy", "mass", "min_principle", "positivity", "weak_form",
    ]
    return doc


def mixed_form() -> dict:
    """1d model with equal transport and flux weights plus full-strength
    fractional dissipation; both quadratic balance identities hold sample by
    sample and the inhomogeneous half-derivative norm must not grow."""
    doc = _base((512,), "1d", 1.0, 1e-4, 1)
    doc["model"].update(delta=0.5, nu=1.0, gamma=1.0, epsilon=0.0)
    doc["initial"]["m0_floor"] = 0.5
    # no mass check: with a transport component the 1d conjugate velocity has
    # nonzero divergence, so the spatial mean genuinely moves
    doc["checks"] = [
        "l2", "hhalf", "positivity", {"name": "min_principle", "tol": 1e-8},
    ]
    return doc


def small_data_wiener() -> dict:
    """Pure transport against gamma=1/2 dissipation with data whose derivative
    is small in the absolutely-summable sense; the summed coefficient norm must
    stay below the dissipation strength out to long times."""
    doc = _base((256,), "1d", 10.0, 1e-3, 10)
    doc["model"].update(delta=0.0, nu=1.0, gamma=0.5, epsilon=0.0)
    doc["checks"] = ["wiener", "positivity"]
    return doc


def flux_entropy_2d() -> dict:
    """2d divergence-form flux driven by the perpendicular-gradient velocity;
    entropy production must match the half-derivative dissipation rate."""
    doc = _base((128, 128), "nd", 0.25, 5e-4, 1)
    doc["model"].update(
        delta=0.5, nu=0.0, gamma=0.0, epsilon=1e-3, velocity_family="sqg"
    )
    doc["initial"] = {
        "kind": "random_trig",
        "params": {
            "k_max": 4, "amp": 0.3, "seed": 7, "nonneg_shift": True, "floor": 0.1,
        },
        "require_nonneg": True,
    }
    doc["checks"] = ["entropy", "mass", "extrema"]
    return doc


def advective_decay_2d() -> dict:
    """2d advection with unit fractional dissipation; the shifted entropy is a
    Lyapunov function and the sup norm sits under an explicit decay envelope."""
    doc = _base((128, 128), "nd", 2.0, 2e-3, 2)
    doc["model"].update(
        delta=0.0, nu=1.0, gamma=1.0, epsilon=0.0, velocity_family="sqg"
    )
    doc["initial"] = {
        "kind": "random_trig",
        "params": {
            "k_max": 4, "amp": 0.3, "seed": 11, "nonneg_shift": True, "floor": 0.25,
        },
        "require_nonneg": True,
    }
    doc["checks"] = ["entropy", "mass", "extrema", "envelope"]
    return doc


def lyapunov_weights() -> dict:
    """1d divergence-form run tracking the two weighted functionals built from
    the antiderivative of the solution; the logarithmic one must decrease."""
    doc = _base((256,), "1d", 2.0, 2e-4, 10)
    doc["model"].update(delta=1.0, nu=0.0, gamma=0.0, epsilon=1e-3)
    doc["initial"]["require_nonneg"] = True
    doc["checks"] = ["mass", "positivity", "min_principle"]
    return doc


def steepening_exploration() -> dict:
    """Undamped 1d transport by the conjugate field on rough seeded data:
    fronts sharpen to the grid scale and energy piles up at the dealias edge.
    Exploratory; no checks attached, expect blow-up or a resolution-loss flag
    in the metadata. Smooth single-mode data, by contrast, just sloshes."""
    doc = _base((512,), "1d", 6.0, 5e-4, 40)
    doc["model"].update(delta=0.0, nu=0.0, gamma=0.0, epsilon=0.0)
    doc["initial"] = {
        "kind": "random_trig",
        "params": {"k_max": 8, "amp": 1.0, "seed": 1},
    }
    doc["stepper"]["adaptive"] = True
    doc["outputs"]["formats"] = ["csv", "snapshots", "metadata"]
    doc["checks"] = []
    return doc


SCENARIOS = {
    "entropy_balance": entropy_balance,
    "mixed_form": mixed_form,
    "small_data_wiener": small_data_wiener,
    "flux_entropy_2d": flux_entropy_2d,
    "advective_decay_2d": advective_decay_2d,
    "lyapunov_weights": lyapunov_weights,
    "steepening_exploration": steepening_exploration,
}


def scenario_config(name: str) -> dict:
    """Deep copy of a named scenario's config document."""
    if name not in SCENARIOS:
        raise KeyError(
            f"unknown scenario {name!r}; choices: {', '.join(sorted(SCENARIOS))}"
        )
    return copy.deepcopy(SCENARIOS[name]())
