#include "soatest/monitor.hpp"

#include <cmath>
#include <cstring>

namespace soatest {

bool Monitor::values_match(const TypedValue& expected, const TypedValue& actual) {
  if (expected.type() != actual.type()) return false;
  if (expected.type() != ValueType::Float) return expected == actual;

  const double e = expected.as_float();
  const double a = actual.as_float();
  // Bitwise equality first: covers infinities and NaN-for-NaN baselines,
  // which the arithmetic path would reject.
  if (std::memcmp(&e, &a, sizeof(double)) == 0) return true;
  // The relative tolerance only makes sense for finite values; inf/NaN that
  // were not bitwise-equal (e.g. opposite infinities) never match.
  if (!std::isfinite(e) || !std::isfinite(a)) return false;
  const double scale = std::max(std::fabs(e), std::fabs(a));
  return std::fabs(e - a) <= kFloatRelTolerance * scale;
}

Verdict Monitor::judge(const ExecutionRecord& rec) {
  if (rec.expected_error) return Verdict{false, FailReason::OracleFailure};

  if (rec.actual_error) {
    switch (*rec.actual_error) {
      case ErrorClass::Timeout:
      case ErrorClass::ConnectionRefused:
      case ErrorClass::TransportError:
        return Verdict{false, FailReason::TransportError};
      case ErrorClass::FaultResponse:
        return Verdict{false, FailReason::FaultResponse};
      case ErrorClass::MalformedResponse:
        return Verdict{false, FailReason::Malformed};
      case ErrorClass::OracleAbsent:
      case ErrorClass::OracleFailure:
        return Verdict{false, FailReason::OracleFailure};
    }
  }

  if (!rec.expected || !rec.actual)
    return Verdict{false, FailReason::OracleFailure};  // nothing to compare against

  if (values_match(*rec.expected, *rec.actual)) return Verdict{true, std::nullopt};
  return Verdict{false, FailReason::Mismatch};
}

ResultRecord Monitor::mark_result(const std::string& run_id, ExecutionRecord& rec) {
  rec.verdict = judge(rec);

  ResultRecord r;
  r.case_id = rec.case_id;
  r.run_id = run_id;
  r.verdict = *rec.verdict;
  r.expected = rec.expected;
  r.actual = rec.actual;
  if (rec.expected_error)
    r.detail = std::string(error_class_name(*rec.expected_error)) +
               (rec.expected_detail.empty() ? "" : ": " + rec.expected_detail);
  else if (rec.actual_error)
    r.detail = std::string(error_class_name(*rec.actual_error)) +
               (rec.actual_detail.empty() ? "" : ": " + rec.actual_detail);
  else if (!rec.verdict->successful)
    r.detail = "expected " + value_to_text(*rec.expected) + ", got " + value_to_text(*rec.actual);
  r.latency_ms = rec.latency_ms;
  r.agent_id = rec.agent_id;
  r.server = rec.server;

  store_.append_result(r);
  return r;
}

RunSummary Monitor::summarize(const std::string& run_id) const {
  const auto run = store_.run(run_id);
  if (!run) throw Error(Errc::UnknownRun, "no run '" + run_id + "'");

  RunSummary s;
  s.run_id = run_id;
  s.duration_ms = run->duration_ms;
  for (const auto& r : store_.results_for_run(run_id)) {
    ++s.total;
    if (r.verdict.successful) {
      ++s.successful;
    } else {
      ++s.unsuccessful;
      if (r.verdict.reason) ++s.by_reason[*r.verdict.reason];
    }
  }
  return s;
}

}  // namespace soatest
