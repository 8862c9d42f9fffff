"""Error types shared across the package."""


class UsageError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class DomainError(ValueError):
    """Raised when inputs fall outside an operation's mathematical domain,
    e.g. a zero vector where cosine similarity is requested."""
