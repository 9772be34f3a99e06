"""Shared error types.

Precondition violations raise ValueError subclasses local to each module.
The two errors here cut across modules: resource caps (mapped to exit code 2
by the command line front end) and internal consistency failures, which mean
a structural guarantee the algorithms rely on did not hold and the run must
not be trusted.
"""


class ResourceLimitExceeded(RuntimeError):
    """A configured size or node cap was hit; the result is undecided."""


class InternalInconsistency(RuntimeError):
    """A structural invariant failed.  Always a bug, never a verdict."""
