"""Exception hierarchy shared across the package."""


class ToricError(Exception):
    pass


class InputError(ToricError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class ResourceError(ToricError):
    """A configured cap or budget was exceeded (CLI exit code 3)."""


class FiberCapExceeded(ResourceError):
    pass


class BudgetExceeded(ResourceError):
    pass
