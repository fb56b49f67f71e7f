"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: usage errors exit 2 (argparse),
InputError 3, NetworkError 4, InternalError 5.
"""


class HasheconError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HasheconError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InputError(HasheconError, ValueError):
    """Malformed or unusable input data (files, CSV rows, queries)."""


class EmptyCorpusError(InputError):
    """A password corpus or distribution ended up with zero entries."""


class NetworkError(HasheconError, RuntimeError):
    """A live API call failed in a way that retrying did not fix."""


class RateLimitExceededError(NetworkError):
    """Search API budget exhausted; carries a resume token.

    ``resume token`` is a list of (from_date, to_date) ISO segments that
    were still pending when the budget ran out, so a later run can pick
    up where this one stopped (completed segments are already cached).
    """

    def __init__(self, message, pending_segments=None, retry_after=None):
        super().__init__(message)
        self.pending_segments = list(pending_segments or [])
        self.retry_after = retry_after


class FixtureMissError(InputError):
    """Offline mode was asked for a query that has no recorded fixture."""


class InternalError(HasheconError, AssertionError):
    """An internal consistency check failed (ledger arithmetic etc.)."""
