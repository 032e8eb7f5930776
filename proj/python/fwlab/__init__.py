"""Frank-Wolfe on l_p balls: solver, slow-curve dynamics and experiments."""

from ._core import (
    DomainError,
    FwlabError,
    InfeasibleStartError,
    InsufficientDataError,
    UnsupportedExponentError,
    UnsupportedObjectiveError,
    __version__,
    coincidence_check,
    confinement_check,
    fit_rate,
    fixed_point_y,
    heatmap,
    iterations_to_target,
    lmo,
    lp_norm,
    one_step_uw,
    phi,
    phi_dy,
    slow_constants,
    slow_curve,
    slow_start,
    solve,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
