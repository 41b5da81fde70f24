"""Error taxonomy shared across the runtime.

The five fault codes form the closed set that can travel in a reply
envelope; each maps one-to-one onto a FaultError subclass so a received
fault can be re-raised locally without losing its code. Everything else
is a local error and never crosses the wire.
"""

from __future__ import annotations

from enum import Enum


class FaultCode(Enum):
    """Closed set of fault codes carried in reply envelopes."""

    UNKNOWN_SERVICE = "UNKNOWN_SERVICE"
    UNKNOWN_METHOD = "UNKNOWN_METHOD"
    TYPE_MISMATCH = "TYPE_MISMATCH"
    BAD_ENVELOPE = "BAD_ENVELOPE"
    INTERNAL = "INTERNAL"


class RefbusError(Exception):
    """Base class for all refbus errors."""


class FaultError(RefbusError):
    """An error carrying a wire-level fault code.

    Raised locally when the node itself detects the condition, or
    re-raised client-side when a fault envelope comes back.
    """

    code: FaultCode


class UnknownServiceError(FaultError):
    code = FaultCode.UNKNOWN_SERVICE


class UnknownMethodError(FaultError):
    code = FaultCode.UNKNOWN_METHOD


class TypeMismatchError(FaultError):
    code = FaultCode.TYPE_MISMATCH


class BadEnvelopeError(FaultError):
    code = FaultCode.BAD_ENVELOPE


class InternalFaultError(FaultError):
    code = FaultCode.INTERNAL


_FAULT_CLASSES = {
    cls.code: cls
    for cls in (
        UnknownServiceError,
        UnknownMethodError,
        TypeMismatchError,
        BadEnvelopeError,
        InternalFaultError,
    )
}


def fault_error(code: FaultCode, message: str) -> FaultError:
    """Build the FaultError subclass matching a received fault code."""
    return _FAULT_CLASSES[code](message)


class NameInUseError(RefbusError):
    """Deployment name already bound to a different deployment."""


class InvalidNameError(RefbusError):
    """Deployment name is empty or contains a reserved character."""


class IncompatibleComponentError(RefbusError):
    """Component lacks methods required by the deployment interface."""

    def __init__(self, message: str, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)


class NonInterfaceSignatureError(RefbusError):
    """Interface signature closure reaches a concrete class name."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class UnknownInterfaceError(RefbusError):
    """Interface name absent from the local type environment."""


class NetworkError(RefbusError):
    """Transport-level failure: connection refused, reset, non-200, ..."""


class CallTimeout(NetworkError):
    """A remote invocation exceeded its timeout."""


class ScenarioFailed(RefbusError):
    """A scenario transcript did not match its expectation."""
