"""Distributed, cross-platform, regression-capable test harness for web services.

The heavy lifting lives in the compiled ``soatest._core`` extension; this
package re-exports its public names.
"""

from soatest._core import (  # noqa: F401
    CaseStatus,
    Endpoint,
    ExecutionRecord,
    ExpectedSource,
    FailReason,
    FaultMode,
    Harness,
    HarnessError,
    LocalizeKind,
    LocalizeOutcome,
    MockService,
    OperationSignature,
    Param,
    Protocol,
    RunReport,
    RunSummary,
    ServiceDescriptor,
    TestCase,
    TestRequest,
    TypedValue,
    ValueType,
    Verdict,
    decode_request,
    encode_request,
    make_mock,
    value_from_text,
)

__all__ = [
    "CaseStatus",
    "Endpoint",
    "ExecutionRecord",
    "ExpectedSource",
    "FailReason",
    "FaultMode",
    "Harness",
    "HarnessError",
    "LocalizeKind",
    "LocalizeOutcome",
    "MockService",
    "OperationSignature",
    "Param",
    "Protocol",
    "RunReport",
    "RunSummary",
    "ServiceDescriptor",
    "TestCase",
    "TestRequest",
    "TypedValue",
    "ValueType",
    "Verdict",
    "decode_request",
    "encode_request",
    "make_mock",
    "value_from_text",
]

__version__ = "1.0.0"
