"""Exception types shared across the package."""


class MilnerkitError(Exception):
    """Base class for all library errors."""


class ParseError(MilnerkitError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class CapExceeded(MilnerkitError):
    """A defensive size cap was hit."""


class ChartError(MilnerkitError):
    """Malformed chart or chart precondition violated."""


class NotWeaklyGuarded(ChartError):
    pass


class LoopError(MilnerkitError):
    """A candidate loop sub-1-chart violates one of L1, L2, L3."""

    def __init__(self, condition, message):
        self.condition = condition
        super().__init__(f"{condition}: {message}")


class WitnessError(MilnerkitError):
    pass


class ProofError(MilnerkitError):
    """A proof term failed to check."""


class RuleNotInSystem(ProofError):
    pass


class SideConditionViolation(ProofError):
    def __init__(self, rule, guard, message=None):
        self.rule = rule
        self.guard = guard
        super().__init__(message or f"{rule}: side condition violated, guard {guard} terminates")


class ShapeMismatch(ProofError):
    pass


class CoinductiveProofInvalid(ProofError):
    def __init__(self, message, vertex=None):
        self.vertex = vertex
        super().__init__(message if vertex is None else f"vertex {vertex}: {message}")


class SynthesisError(MilnerkitError):
    """A certificate could not be synthesized."""


class NotBisimilar(MilnerkitError):
    pass
