class CapExceeded(ValueError):
    """Raised when a problem size exceeds a configured memory/enumeration cap."""
