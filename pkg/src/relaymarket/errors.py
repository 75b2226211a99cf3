class GuardError(RuntimeError):
    """Raised when a desk-scale guard refuses the requested problem size."""
