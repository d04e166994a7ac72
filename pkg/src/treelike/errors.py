"""Exception types shared across the toolkit."""


class InputError(ValueError):
    """Malformed or inconsistent user input (unknown letter, bad document, ...)."""


class DiamondViolation(RuntimeError):
    """An operation that requires a diamond automaton got a non-diamond one."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"automaton is not diamond, witness {witness!r}")


class DiamUndefined(RuntimeError):
    """No witness words exist for a state recombination query."""


class TraceClassTooLarge(RuntimeError):
    """A trace equivalence class exceeded the configured size bound."""


class NotShort(RuntimeError):
    """A leaf process admits unbounded runs of consecutive local actions."""

    def __init__(self, cycle):
        self.cycle = cycle
        super().__init__(f"local transition graph has a cycle: {cycle!r}")


class UnsupportedInstance(RuntimeError):
    """A synthesis stage could not establish its contract on this input."""
