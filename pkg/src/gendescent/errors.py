"""Exception hierarchy shared by the library and the command line."""


class InputError(ValueError):
    """Malformed or inconsistent arguments (CLI exit code 1)."""


class UnsupportedRegimeError(InputError):
    """A closed form was requested outside the range where it was derived."""


class CapacityError(RuntimeError):
    """A configured size guard was exceeded (CLI exit code 2)."""
