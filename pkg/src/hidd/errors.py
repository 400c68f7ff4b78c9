"""Exception hierarchy for the differentiator library."""


class HIDDError(ValueError):
    """Base class for every error raised by this package."""


class NonPositiveError(HIDDError):
    pass


class GainCountMismatch(HIDDError):
    pass


class UnsupportedOrder(HIDDError):
    """No shipped gain set for the requested order; the caller must supply one."""


class TableOverflow(HIDDError):
    pass


class OrderTooSmall(HIDDError):
    pass


class NearZeroRadius(HIDDError):
    pass


class DeadZoneInput(HIDDError):
    pass


class NonFiniteIterate(HIDDError):
    pass


class NonFiniteState(HIDDError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NoClosedForm(HIDDError):
    pass


class BadRange(HIDDError):
    pass


class GainUnavailable(HIDDError):
    pass
