#pragma once

#include <map>
#include <string>

#include "soatest/executor.hpp"
#include "soatest/store.hpp"

namespace soatest {

struct RunSummary {
  std::string run_id;
  std::size_t total = 0;
  std::size_t successful = 0;
  std::size_t unsuccessful = 0;
  std::map<FailReason, std::size_t> by_reason;
  std::int64_t duration_ms = -1;

  bool all_successful() const { return unsuccessful == 0; }
};

/// Turns execution records into verdicts and journal entries.
///
/// Judgement precedence: a missing expected value (oracle trouble) fails the
/// case as ORACLE_FAILURE before the wire outcome is even looked at; next the
/// wire-side error class decides; only when both sides hold values are they
/// compared. FLOAT comparison passes on identical bits or a relative error of
/// at most 1e-9; every other type must match exactly.
class Monitor {
 public:
  explicit Monitor(Store& store) : store_(store) {}

  static constexpr double kFloatRelTolerance = 1e-9;

  static bool values_match(const TypedValue& expected, const TypedValue& actual);
  static Verdict judge(const ExecutionRecord& rec);

  /// Judges, stamps the verdict into the record, journals the result (which
  /// also moves the case to its terminal status), and returns what was stored.
  ResultRecord mark_result(const std::string& run_id, ExecutionRecord& rec);

  /// Tallies a finished (or still running) run from the journal. Throws
  /// UnknownRun for ids never started.
  RunSummary summarize(const std::string& run_id) const;

 private:
  Store& store_;
};

}  // namespace soatest
