"""Exception types raised by the numerical core."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature could not reach the requested accuracy."""

    def __init__(self, message, achieved_error):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class NumericalInstabilityError(ArithmeticError):
    """A closed-form alternating sum lost too many digits to cancellation."""

    def __init__(self, message, est_abs_error):
        super().__init__(f"{message} (estimated error {est_abs_error:.3e})")
        self.est_abs_error = est_abs_error


class SolverError(RuntimeError):
    """Root bracketing or bisection failed."""
