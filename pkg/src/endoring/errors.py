"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class EndoringError(Exception):
    """Base class for all library errors."""

    exit_code = 4


class InvalidInputError(EndoringError):
    """Bad user input: non-prime field, singular or supersingular curve, bad discriminant."""

    exit_code = 2


class AlgorithmFailure(EndoringError):
    """Algorithmic failure: parameters too tight for the instance (retryable)."""

    exit_code = 3


class MaxTrialsExceeded(AlgorithmFailure):
    """Relation search exhausted its trial budget."""


class EmptyFactorBaseError(AlgorithmFailure):
    """No split prime below the requested norm bound."""


class InternalInvariantError(EndoringError):
    """A checked internal invariant failed; signals a bug, not an input condition."""

    exit_code = 4
