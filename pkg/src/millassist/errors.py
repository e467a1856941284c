"""Exception types shared across the platform."""


class MillAssistError(Exception):
    """Base class for all platform errors."""


class ValidationError(MillAssistError):
    """A record or config violates an invariant; message names the field."""


class OrderingError(MillAssistError):
    """A time-ordered contract was violated (stepping backwards, stale append)."""


class NotFoundError(MillAssistError):
    """A referenced entity (reel, card, recommendation, ...) does not exist."""


class ConflictError(MillAssistError):
    """Duplicate id or stale-version write."""


class AuthorizationError(MillAssistError):
    """Caller lacks the role required for the operation."""


class RangeError(MillAssistError):
    """An interval argument has t0 > t1 or is otherwise ill-formed."""


class ContractError(MillAssistError):
    """Inputs do not match a trained model's feature contract."""


class TrainingError(MillAssistError):
    """Training preconditions not met (too few samples, degenerate target)."""


class CycleError(MillAssistError):
    """Adding a causal link would close a cycle; message names the path."""
