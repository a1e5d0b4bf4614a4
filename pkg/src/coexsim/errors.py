"""Exception types shared across the package.

``InvalidInputError`` marks bad parameters or files (CLI exit code 2) and
``NumericError`` marks a well-formed input that has no numeric answer, such as
a singular covariance or a fully nulled steering direction (exit code 3).
"""


class CoexsimError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CoexsimError, ValueError):
    """An argument, scenario field or file is outside its valid domain."""


class NumericError(CoexsimError, ArithmeticError):
    """A computation is undefined for otherwise valid inputs."""
