#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "soatest/agents.hpp"
#include "soatest/codegen.hpp"
#include "soatest/registry.hpp"
#include "soatest/store.hpp"

namespace soatest {

/// Why a side of the comparison is missing a value.
enum class ErrorClass {
  Timeout,
  ConnectionRefused,
  TransportError,
  FaultResponse,
  MalformedResponse,
  OracleAbsent,
  OracleFailure,
};

const char* error_class_name(ErrorClass e) noexcept;

/// Everything known about one executed case, before and after judgement.
/// Exactly one of {expected, expected_error} is set, and one of
/// {actual, actual_error}; verdict stays empty until the monitor judges.
struct ExecutionRecord {
  std::string case_id;
  std::int64_t service_id = 0;
  std::string op_name;

  std::optional<TypedValue> expected;
  std::optional<ErrorClass> expected_error;
  std::string expected_detail;

  std::optional<TypedValue> actual;
  std::optional<ErrorClass> actual_error;
  std::string actual_detail;

  std::int64_t latency_ms = 0;
  int agent_id = -1;
  std::string server;

  std::optional<Verdict> verdict;
};

/// Drives cases through the pipeline: expected value first (oracle, stored
/// baseline, or the case's own EXPLICIT value), then acquire -> dispatch ->
/// decode, typed against the operation's declared return type.
///
/// GOLDEN cases with no stored baseline are calibrating runs: a clean actual
/// value is persisted as the baseline and doubles as the expected value.
class Executor {
 public:
  Executor(const PlanBuilder& plans, AgentPool& pool, Store& store)
      : plans_(plans), pool_(pool), store_(store) {}

  ExecutionRecord execute_case(const ClientPlan& plan, const TestCase& c,
                               std::chrono::milliseconds acquire_timeout);

  /// Runs the cases across `parallelism` worker threads (the pool's agent
  /// discipline still applies). Results come back in input order.
  std::vector<ExecutionRecord> execute_suite(const ClientPlan& plan,
                                             const std::vector<TestCase>& cases, int parallelism,
                                             std::chrono::milliseconds acquire_timeout);

 private:
  void fill_expected(const ClientPlan& plan, const TestCase& c, ExecutionRecord& rec);

  const PlanBuilder& plans_;
  AgentPool& pool_;
  Store& store_;
};

}  // namespace soatest
