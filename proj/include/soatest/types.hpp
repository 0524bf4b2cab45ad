#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "soatest/error.hpp"

namespace soatest {

// ---------------------------------------------------------------------------
// Value model

enum class ValueType { Int, Float, Str, Bool };

const char* value_type_name(ValueType t) noexcept;
ValueType value_type_from_name(std::string_view name);

/// A value tagged with exactly one ValueType. INT is 64-bit signed, FLOAT is
/// IEEE binary64, STRING is UTF-8 text, BOOL is true/false.
class TypedValue {
 public:
  TypedValue() : v_(std::int64_t{0}) {}

  static TypedValue of(std::int64_t v) { return TypedValue(Payload(std::in_place_index<0>, v)); }
  static TypedValue of(int v) { return of(static_cast<std::int64_t>(v)); }
  static TypedValue of(double v) { return TypedValue(Payload(std::in_place_index<1>, v)); }
  static TypedValue of(std::string v) { return TypedValue(Payload(std::in_place_index<2>, std::move(v))); }
  static TypedValue of(const char* v) { return of(std::string(v)); }
  static TypedValue of(bool v) { return TypedValue(Payload(std::in_place_index<3>, v)); }

  ValueType type() const noexcept { return static_cast<ValueType>(v_.index()); }

  std::int64_t as_int() const { return get<std::int64_t>(ValueType::Int); }
  double as_float() const { return get<double>(ValueType::Float); }
  const std::string& as_str() const { return get<std::string>(ValueType::Str); }
  bool as_bool() const { return get<bool>(ValueType::Bool); }

  bool operator==(const TypedValue& other) const = default;

 private:
  using Payload = std::variant<std::int64_t, double, std::string, bool>;

  explicit TypedValue(Payload p) : v_(std::move(p)) {}

  template <class T>
  const T& get(ValueType want) const {
    if (type() != want)
      throw Error(Errc::BadValue, std::string("value is ") + value_type_name(type()) +
                                      ", wanted " + value_type_name(want));
    return std::get<T>(v_);
  }

  Payload v_;
};

/// Canonical text form: INT decimal, FLOAT shortest round-tripping decimal,
/// BOOL "true"/"false", STRING unchanged.
std::string value_to_text(const TypedValue& v);

/// Inverse of value_to_text; the whole text must parse. Throws BadValue.
TypedValue value_from_text(ValueType t, std::string_view text);

// ---------------------------------------------------------------------------
// Service description

enum class Protocol { Soap, Rest, Loopback };

const char* protocol_name(Protocol p) noexcept;
Protocol protocol_from_name(std::string_view name);

struct Endpoint {
  std::string host;
  int port = 0;
  std::string path = "/";

  std::string authority() const;  // "host:port"
  std::string to_string() const;  // "host:port/path"
  static Endpoint parse(std::string_view text);  // throws BadValue

  bool operator==(const Endpoint&) const = default;
};

struct Param {
  std::string name;
  ValueType type = ValueType::Int;

  bool operator==(const Param&) const = default;
};

struct OperationSignature {
  std::string op_name;
  std::vector<Param> params;
  ValueType return_type = ValueType::Int;

  bool operator==(const OperationSignature&) const = default;
};

struct ServiceDescriptor {
  std::int64_t service_id = 0;
  std::string name;
  Protocol protocol = Protocol::Soap;
  std::vector<Endpoint> endpoints;
  std::string soap_namespace;  // SOAP only
  std::vector<OperationSignature> operations;

  const OperationSignature* find_operation(std::string_view op_name) const;

  bool operator==(const ServiceDescriptor&) const = default;
};

// ---------------------------------------------------------------------------
// Test cases

enum class ExpectedSource { Oracle, Golden, Explicit };

const char* expected_source_name(ExpectedSource s) noexcept;
ExpectedSource expected_source_from_name(std::string_view name);

enum class CaseStatus { Pending, Successful, Unsuccessful };

const char* case_status_name(CaseStatus s) noexcept;
CaseStatus case_status_from_name(std::string_view name);

struct TestCase {
  std::string case_id;
  std::int64_t service_id = 0;
  std::string op_name;
  std::vector<TypedValue> args;
  ExpectedSource expected_source = ExpectedSource::Oracle;
  std::optional<TypedValue> explicit_expected;  // EXPLICIT only
  CaseStatus status = CaseStatus::Pending;
  std::string created_at;
};

struct BoundaryStrategy {};

struct RandomStrategy {
  std::uint64_t seed = 0;
  std::size_t count = 1;
};

struct ExplicitStrategy {
  std::vector<std::vector<TypedValue>> tuples;
};

using GenStrategy = std::variant<BoundaryStrategy, RandomStrategy, ExplicitStrategy>;

// ---------------------------------------------------------------------------
// Verdicts

enum class FailReason { Mismatch, TransportError, FaultResponse, OracleFailure, Malformed };

const char* fail_reason_name(FailReason r) noexcept;
FailReason fail_reason_from_name(std::string_view name);

struct Verdict {
  bool successful = false;
  std::optional<FailReason> reason;  // set iff unsuccessful

  static Verdict pass() { return {true, std::nullopt}; }
  static Verdict fail(FailReason r) { return {false, r}; }

  bool operator==(const Verdict&) const = default;
};

// ---------------------------------------------------------------------------
// Clock and id helpers

/// Wall-clock stamp in the harness message format: month/day/year without
/// zero padding, then a zero-padded 12-hour clock, e.g. "2/25/2012 05:22:17PM".
std::string wall_clock_stamp(std::chrono::system_clock::time_point tp = std::chrono::system_clock::now());

/// Process-unique id: prefix + random hex + counter.
std::string fresh_id(std::string_view prefix);

}  // namespace soatest
