"""refbus: expose live component instances for remote invocation over HTTP.

A Node deploys specific, pre-existing component instances behind
structural interfaces, serves them at name- and object-number-based
endpoints, and lets callers choose, per class, method, parameter, return
value, or individual call, whether arguments travel by value (a state
copy) or by reference (a remote reference that preserves identity).
"""

from .client import CallOptions, Proxy, get_component_by_name, materialize
from .component import ComponentHandle, snapshot_instance
from .errors import (
    BadEnvelopeError,
    CallTimeout,
    FaultCode,
    FaultError,
    IncompatibleComponentError,
    InternalFaultError,
    InvalidNameError,
    NameInUseError,
    NetworkError,
    NonInterfaceSignatureError,
    RefbusError,
    ScenarioFailed,
    TypeMismatchError,
    UnknownInterfaceError,
    UnknownMethodError,
    UnknownServiceError,
)
from .interfaces import (
    ClassDescriptor,
    ClosureViolation,
    InterfaceDescriptor,
    MethodSig,
    check_closure,
    check_compat,
    describe,
)
from .node import Node
from .policy import (
    BY_REFERENCE,
    BY_VALUE,
    CallOverride,
    ParamPos,
    PolicyStore,
    RETURN,
    ReturnPos,
    TransmissionPolicy,
)
from .registry import Deployment, ObjectTable, ProxyKey, ProxyTable
from .values import (
    NULL,
    InterfaceType,
    Ior,
    ListOf,
    Prim,
    RecordType,
    TypeEnvironment,
    TypeRef,
    Value,
    VBool,
    VFloat,
    VInt,
    VList,
    VNull,
    VRecord,
    VRef,
    VStr,
    conforms,
    type_check,
    value_equals,
)
from .wire import (
    CallEnvelope,
    Fault,
    ReplyEnvelope,
    decode_call,
    decode_reply,
    decode_value,
    encode_call,
    encode_reply,
    encode_value,
)

__version__ = "0.1.0"

__all__ = [
    "BY_REFERENCE",
    "BY_VALUE",
    "BadEnvelopeError",
    "CallEnvelope",
    "CallOptions",
    "CallOverride",
    "CallTimeout",
    "ClassDescriptor",
    "ClosureViolation",
    "ComponentHandle",
    "Deployment",
    "Fault",
    "FaultCode",
    "FaultError",
    "IncompatibleComponentError",
    "InterfaceDescriptor",
    "InterfaceType",
    "InternalFaultError",
    "InvalidNameError",
    "Ior",
    "ListOf",
    "MethodSig",
    "NULL",
    "NameInUseError",
    "NetworkError",
    "Node",
    "NonInterfaceSignatureError",
    "ObjectTable",
    "ParamPos",
    "PolicyStore",
    "Prim",
    "Proxy",
    "ProxyKey",
    "ProxyTable",
    "RETURN",
    "RecordType",
    "RefbusError",
    "ReplyEnvelope",
    "ReturnPos",
    "ScenarioFailed",
    "TransmissionPolicy",
    "TypeEnvironment",
    "TypeMismatchError",
    "TypeRef",
    "UnknownInterfaceError",
    "UnknownMethodError",
    "UnknownServiceError",
    "VBool",
    "VFloat",
    "VInt",
    "VList",
    "VNull",
    "VRecord",
    "VRef",
    "VStr",
    "Value",
    "check_closure",
    "check_compat",
    "conforms",
    "decode_call",
    "decode_reply",
    "decode_value",
    "describe",
    "encode_call",
    "encode_reply",
    "encode_value",
    "get_component_by_name",
    "materialize",
    "snapshot_instance",
    "type_check",
    "value_equals",
]
