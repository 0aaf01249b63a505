"""Dynamic approximate maximum independent set of fat objects."""

from .amortized import AmortizedMis
from .arqs import Arqs
from .deamortized import BudgetParams, DeamortizedMis, budget_params
from .disqs import Disqs
from .errors import (DimensionError, DynMisError, FeasibilityError, InstanceTooLarge, MixError,
                     UpdateError)
from .geometry import (Ball, EnclosingCube, FatObject, HyperRect, Placement, ShapeClass, ball,
                       classify_vs_cube, enclosing_cube, hypercube, intersects, object_order,
                       rect, square)
from .mixer import MixState, find_separator, mix_new
from .oracle import Instance, exact_mis, offline_greedy, opt_trajectory
from .updates import Delta, Update

__all__ = [
    "AmortizedMis", "Arqs", "Ball", "BudgetParams", "DeamortizedMis", "Delta", "DimensionError",
    "Disqs", "DynMisError", "EnclosingCube", "FatObject", "FeasibilityError", "HyperRect",
    "Instance", "InstanceTooLarge", "MixError", "MixState", "Placement", "ShapeClass", "Update",
    "UpdateError", "ball", "budget_params", "classify_vs_cube", "enclosing_cube", "exact_mis",
    "find_separator", "hypercube", "intersects", "mix_new", "object_order", "offline_greedy",
    "opt_trajectory", "rect", "square",
]
