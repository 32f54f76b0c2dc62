"""Exception hierarchy shared across the package.

``exit_code`` is what the CLI returns when the exception escapes a
subcommand: 1 for bad input, 2 for numerical failure, 3 for an oracle
guard refusal.
"""


class GridShieldError(Exception):
    exit_code = 1


class InputError(GridShieldError):
    """Invalid user input (files, ids, parameters)."""

    exit_code = 1


class ParseError(InputError):
    """Malformed grid/override/CAS file."""


class DomainError(InputError):
    """A value violates its domain (negative limit, zero susceptance, ...)."""


class UnknownIdError(InputError):
    """A cross-reference points at a component that does not exist."""


class MergeError(InputError):
    """CAS lists cannot be merged (different budgets or grids)."""


class ExhaustedError(GridShieldError):
    """No admissible attack set remains under the given exclusions."""

    exit_code = 1


class SolverFailure(GridShieldError):
    """The LP kernel did not return a certified optimum."""

    exit_code = 2


class GuardExceeded(GridShieldError):
    """A brute-force oracle refused an input beyond its size guard."""

    exit_code = 3


class ExhaustionWarning(UserWarning):
    """An evaluation had to shrink the attack size because too few
    unprotected attackable components remain."""
