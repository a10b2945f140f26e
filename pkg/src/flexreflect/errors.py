"""Exception types raised by the geometry helpers and the planners."""


class GeometryError(ValueError):
    """Degenerate or ill-posed geometry (coincident points, grazing angles)."""


class PlannerError(RuntimeError):
    """Base class for planner failures; ``code`` is surfaced by the CLI."""

    code = "planner-error"
    exit_status = 10


class NoSolutionError(PlannerError):
    code = "no-solution"
    exit_status = 11


class SpacingInfeasibleError(PlannerError):
    code = "spacing-infeasible"
    exit_status = 12


class NonConvergenceError(PlannerError):
    code = "non-convergence"
    exit_status = 13


class UnhandledGeometryError(PlannerError):
    code = "unhandled-geometry"
    exit_status = 14


class BlockageError(PlannerError):
    code = "blockage"
    exit_status = 15
