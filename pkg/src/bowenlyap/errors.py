"""Exception types raised across the package."""


class BowenLyapError(Exception):
    """Base class for all package errors."""


class InvalidRadius(BowenLyapError, ValueError):
    pass


class NotHyperbolic(BowenLyapError, ValueError):
    pass


class CloudTooLarge(BowenLyapError, ValueError):
    pass


class NotDifferentiable(BowenLyapError, TypeError):
    pass


class EmptyBowenSample(BowenLyapError):
    """No candidate survived a Bowen-ball filter.

    ``n`` is the iterate at which the sample died and ``delta`` the ball radius.
    """

    def __init__(self, n, delta, message=None):
        self.n = n
        self.delta = delta
        super().__init__(message or f"no candidate survives the Bowen filter at n={n}, delta={delta:g}")
