"""Exception types raised across the package."""


class SingularResolvent(ArithmeticError):
    """``s*I - A`` is numerically singular at the requested point."""

    def __init__(self, s, rcond):
        self.s = s
        self.rcond = rcond
        super().__init__(f"sI - A is singular at s={s!r} (rcond={rcond:.3e})")


class SingularLftLoop(ArithmeticError):
    """``I - G11 @ Delta`` is singular; Delta destabilizes the loop."""


class StructureMismatch(ValueError):
    """Matrix dimensions do not agree with the block structure."""


class UnstableSystem(ValueError):
    """The state matrix has eigenvalues in the open right half plane."""


class NoIntersection(RuntimeError):
    """``delta * ||T(delta)|| - 1`` never changes sign on the scanned range."""

    def __init__(self, branch, endpoint):
        self.branch = branch
        self.endpoint = endpoint
        super().__init__(
            f"no intersection on the {branch} branch; range ends at {endpoint:g}")


class MaxIterExceeded(RuntimeError):
    """Fixed-point recursion hit its iteration cap without converging."""

    def __init__(self, best, iterations):
        self.best = best
        self.iterations = iterations
        super().__init__(f"no convergence after {iterations} iterations (best {best:g})")


class InvalidDelta(ValueError):
    """The requested parameter shift leaves the model's valid domain."""
