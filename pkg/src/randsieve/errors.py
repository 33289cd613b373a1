"""Exception types shared across the package."""


class ResourceBoundError(RuntimeError):
    """A requested size exceeds a configured cap (sieve bound, census bound, ...)."""

    def __init__(self, name: str, value: int, cap: int):
        self.name = name
        self.value = value
        self.cap = cap
        super().__init__(f"{name}={value} exceeds the configured cap of {cap}")
