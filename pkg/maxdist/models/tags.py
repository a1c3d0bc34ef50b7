"""
Tag constants for bound methods, solver moves and target modes.

Plain string constants so they serialize untouched into CSV/JSON.
"""


class TargetMode:
    """How the solver target is formed from the input set E."""

    SET = "set"
    NEIGHBORHOOD = "neighborhood"

    ALL = (SET, NEIGHBORHOOD)


class BoundMethod:
    """Methods that produce a lower or upper value for Lambda."""

    # Lower bounds
    DIAMETER = "diameter"
    SET_DIAMETER = "set_diameter"
    PACKING = "packing"

    # Upper bounds (verified covers)
    UNIT_RECTANGLE = "unit_rectangle"
    RECT_COVER = "rect_cover"
    CIRCLE_COVER = "circle_cover"
    SOLVER = "solver"

    # Sweep selector for "run the lower bounds"
    LOWER = "lower"

    SWEEP_METHODS = (RECT_COVER, CIRCLE_COVER, SOLVER, LOWER)


class MoveKind:
    """Solver local moves, as recorded in Solution.move_log."""

    INITIAL_TREE = "initial_tree"
    PRUNE = "prune"
    SHORTCUT = "shortcut"
    BALL_CUT = "ball_cut"
    STEINER = "steiner"
    VERTEX_DESCENT = "vertex_descent"
