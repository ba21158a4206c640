"""toruslab: pseudospectral laboratory for transport equations driven by
nonlocal velocity operators on the 1d and 2d torus."""

__version__ = "0.1.0"

from .grid import (
    TorusGrid,
    SpectralField,
    forward_dft,
    inverse_dft,
    transform,
    apply_multiplier,
    dealias,
    dealiased_product,
    derivative,
    gradient,
)
from .operators import (
    hilbert,
    frac_lap,
    inv_frac_lap,
    riesz,
    velocity,
    VelocityFamily,
    family_from_name,
    FAMILY_NAMES,
)
from .models import (
    ModelParams,
    BlowUpSignal,
    rhs,
    linear_symbol,
    TestFunction,
    quartic_bump,
    weak_form_residual,
)
from .stepping import StepperConfig, Trajectory, run, cfl_dt
from .diagnostics import (
    CSV_COLUMNS,
    DiagnosticsRecord,
    functionals,
    records_for,
    balance_residuals,
    l1_criterion_monitor,
    extrema_monotonicity,
    decay_envelope_check,
)
from .initial import make_initial, splitmix64, unit_uniform
from .config import ConfigError, load_config, validate_config
from .scenarios import SCENARIOS, scenario_config
