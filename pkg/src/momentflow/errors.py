"""Exception types shared across the package."""


class MomentFlowError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(MomentFlowError):
    """Shape or ordering violation: mismatched vector lengths, bad indices,
    conflicting re-insertion into a moment table."""


class DomainError(MomentFlowError):
    """An argument outside the operation's domain (empty set, negative power,
    mismatched multinomial parts)."""


class OrderError(MomentFlowError):
    """A moment of higher order than the supplying specification provides."""


class PropagationError(MomentFlowError):
    """A moment was read before it was donated; indicates an incomplete plan."""


class RoutingError(MomentFlowError):
    """A request was directed to a panel that cannot own it."""


class CapabilityError(MomentFlowError):
    """The requested operation is not supported by the given specification
    (e.g. simulating from a belief that only lists raw moments)."""


class DocumentError(MomentFlowError):
    """A network document failed to parse or violates the schema."""
