"""Ordering and drawing of uncertain set systems as storylines or star plots."""

from .curve_order import CurveLayout, initial_order, order_curves, precedes
from .element_order import (
    OrderingResult,
    Solver,
    Strategy,
    feedback_weights,
    hamming_weights,
    order_elements,
    upper_bound_weights,
)
from .io import Dataset, InputError
from .layout import LayoutConfig, Scene, build_scene
from .metrics import LayoutMetrics, compute_metrics, crossings, min_crossings_oracle, turns, wiggle
from .render import render_svg
from .setsystem import (
    BinMatrix,
    KernelGroups,
    UncertainSetSystem,
    UncertaintyLevels,
    append_dummy,
    bin_from_beta,
    bin_from_raw,
    is_uncertain_subset,
    kernelize,
)
from .tsp import CapacityError, ElementOrder, WeightMatrix, solve_tsp_exact, solve_tsp_heuristic, tour_cost

__version__ = "0.1.0"
