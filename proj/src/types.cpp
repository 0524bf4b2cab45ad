#include "soatest/types.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <random>

namespace soatest {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::InvalidDescriptor: return "InvalidDescriptor";
    case Errc::UnknownService: return "UnknownService";
    case Errc::UnknownOperation: return "UnknownOperation";
    case Errc::UnknownCase: return "UnknownCase";
    case Errc::UnknownRun: return "UnknownRun";
    case Errc::UnknownAgent: return "UnknownAgent";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::OracleAbsent: return "OracleAbsent";
    case Errc::OracleFailure: return "OracleFailure";
    case Errc::MalformedRequest: return "MalformedRequest";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::UnsupportedProtocol: return "UnsupportedProtocol";
    case Errc::StoreUnavailable: return "StoreUnavailable";
    case Errc::AcquireTimeout: return "AcquireTimeout";
    case Errc::Timeout: return "Timeout";
    case Errc::ConnectionRefused: return "ConnectionRefused";
    case Errc::TransportError: return "TransportError";
    case Errc::BindFailure: return "BindFailure";
    case Errc::NoCases: return "NoCases";
    case Errc::BadValue: return "BadValue";
  }
  return "UnknownError";
}

const char* value_type_name(ValueType t) noexcept {
  switch (t) {
    case ValueType::Int: return "INT";
    case ValueType::Float: return "FLOAT";
    case ValueType::Str: return "STRING";
    case ValueType::Bool: return "BOOL";
  }
  return "INT";
}

ValueType value_type_from_name(std::string_view name) {
  if (name == "INT") return ValueType::Int;
  if (name == "FLOAT") return ValueType::Float;
  if (name == "STRING") return ValueType::Str;
  if (name == "BOOL") return ValueType::Bool;
  throw Error(Errc::BadValue, "unknown value type '" + std::string(name) + "'");
}

std::string value_to_text(const TypedValue& v) {
  switch (v.type()) {
    case ValueType::Int:
      return std::to_string(v.as_int());
    case ValueType::Float: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v.as_float());
      if (ec != std::errc{}) throw Error(Errc::BadValue, "float not representable");
      return std::string(buf, end);
    }
    case ValueType::Str:
      return v.as_str();
    case ValueType::Bool:
      return v.as_bool() ? "true" : "false";
  }
  throw Error(Errc::BadValue, "corrupt value tag");
}

TypedValue value_from_text(ValueType t, std::string_view text) {
  switch (t) {
    case ValueType::Int: {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(Errc::BadValue, "not a 64-bit integer: '" + std::string(text) + "'");
      return TypedValue::of(out);
    }
    case ValueType::Float: {
      double out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(Errc::BadValue, "not a float: '" + std::string(text) + "'");
      return TypedValue::of(out);
    }
    case ValueType::Str:
      return TypedValue::of(std::string(text));
    case ValueType::Bool:
      if (text == "true") return TypedValue::of(true);
      if (text == "false") return TypedValue::of(false);
      throw Error(Errc::BadValue, "not a bool: '" + std::string(text) + "'");
  }
  throw Error(Errc::BadValue, "corrupt type tag");
}

const char* protocol_name(Protocol p) noexcept {
  switch (p) {
    case Protocol::Soap: return "SOAP";
    case Protocol::Rest: return "REST";
    case Protocol::Loopback: return "LOOPBACK";
  }
  return "SOAP";
}

Protocol protocol_from_name(std::string_view name) {
  if (name == "SOAP") return Protocol::Soap;
  if (name == "REST") return Protocol::Rest;
  if (name == "LOOPBACK") return Protocol::Loopback;
  throw Error(Errc::BadValue, "unknown protocol '" + std::string(name) + "'");
}

std::string Endpoint::authority() const { return host + ":" + std::to_string(port); }

std::string Endpoint::to_string() const { return authority() + path; }

Endpoint Endpoint::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0)
    throw Error(Errc::BadValue, "endpoint needs host:port — '" + std::string(text) + "'");
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  auto slash = rest.find('/');
  std::string_view port_part = slash == std::string_view::npos ? rest : rest.substr(0, slash);
  ep.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  auto [ptr, ec] = std::from_chars(port_part.data(), port_part.data() + port_part.size(), ep.port);
  if (ec != std::errc{} || ptr != port_part.data() + port_part.size())
    throw Error(Errc::BadValue, "endpoint port not numeric — '" + std::string(text) + "'");
  if (ep.port < 0 || ep.port > 65535)
    throw Error(Errc::BadValue, "endpoint port out of range — '" + std::string(text) + "'");
  return ep;
}

const OperationSignature* ServiceDescriptor::find_operation(std::string_view op_name) const {
  for (const auto& op : operations)
    if (op.op_name == op_name) return &op;
  return nullptr;
}

const char* expected_source_name(ExpectedSource s) noexcept {
  switch (s) {
    case ExpectedSource::Oracle: return "ORACLE";
    case ExpectedSource::Golden: return "GOLDEN";
    case ExpectedSource::Explicit: return "EXPLICIT";
  }
  return "ORACLE";
}

ExpectedSource expected_source_from_name(std::string_view name) {
  if (name == "ORACLE") return ExpectedSource::Oracle;
  if (name == "GOLDEN") return ExpectedSource::Golden;
  if (name == "EXPLICIT") return ExpectedSource::Explicit;
  throw Error(Errc::BadValue, "unknown expected source '" + std::string(name) + "'");
}

const char* case_status_name(CaseStatus s) noexcept {
  switch (s) {
    case CaseStatus::Pending: return "PENDING";
    case CaseStatus::Successful: return "SUCCESSFUL";
    case CaseStatus::Unsuccessful: return "UNSUCCESSFUL";
  }
  return "PENDING";
}

CaseStatus case_status_from_name(std::string_view name) {
  if (name == "PENDING") return CaseStatus::Pending;
  if (name == "SUCCESSFUL") return CaseStatus::Successful;
  if (name == "UNSUCCESSFUL") return CaseStatus::Unsuccessful;
  throw Error(Errc::BadValue, "unknown case status '" + std::string(name) + "'");
}

const char* fail_reason_name(FailReason r) noexcept {
  switch (r) {
    case FailReason::Mismatch: return "MISMATCH";
    case FailReason::TransportError: return "TRANSPORT_ERROR";
    case FailReason::FaultResponse: return "FAULT_RESPONSE";
    case FailReason::OracleFailure: return "ORACLE_FAILURE";
    case FailReason::Malformed: return "MALFORMED";
  }
  return "MISMATCH";
}

FailReason fail_reason_from_name(std::string_view name) {
  if (name == "MISMATCH") return FailReason::Mismatch;
  if (name == "TRANSPORT_ERROR") return FailReason::TransportError;
  if (name == "FAULT_RESPONSE") return FailReason::FaultResponse;
  if (name == "ORACLE_FAILURE") return FailReason::OracleFailure;
  if (name == "MALFORMED") return FailReason::Malformed;
  throw Error(Errc::BadValue, "unknown fail reason '" + std::string(name) + "'");
}

std::string wall_clock_stamp(std::chrono::system_clock::time_point tp) {
  std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  localtime_r(&t, &tm);
  int hour12 = tm.tm_hour % 12;
  if (hour12 == 0) hour12 = 12;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%d/%d/%d %02d:%02d:%02d%s", tm.tm_mon + 1, tm.tm_mday,
                tm.tm_year + 1900, hour12, tm.tm_min, tm.tm_sec, tm.tm_hour < 12 ? "AM" : "PM");
  return buf;
}

std::string fresh_id(std::string_view prefix) {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = [] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }();
  std::uint64_t n = counter.fetch_add(1, std::memory_order_relaxed);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*s-%08llx-%llu", static_cast<int>(prefix.size()),
                prefix.data(), static_cast<unsigned long long>(salt & 0xffffffffu),
                static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace soatest
