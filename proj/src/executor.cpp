#include "soatest/executor.hpp"

#include <atomic>
#include <exception>
#include <thread>

namespace soatest {

const char* error_class_name(ErrorClass e) noexcept {
  switch (e) {
    case ErrorClass::Timeout: return "TIMEOUT";
    case ErrorClass::ConnectionRefused: return "CONNECTION_REFUSED";
    case ErrorClass::TransportError: return "TRANSPORT_ERROR";
    case ErrorClass::FaultResponse: return "FAULT_RESPONSE";
    case ErrorClass::MalformedResponse: return "MALFORMED_RESPONSE";
    case ErrorClass::OracleAbsent: return "ORACLE_ABSENT";
    case ErrorClass::OracleFailure: return "ORACLE_FAILURE";
  }
  return "?";
}

namespace {

ErrorClass classify_transport(Errc code) {
  switch (code) {
    case Errc::Timeout: return ErrorClass::Timeout;
    case Errc::ConnectionRefused: return ErrorClass::ConnectionRefused;
    case Errc::MalformedResponse: return ErrorClass::MalformedResponse;
    default: return ErrorClass::TransportError;
  }
}

}  // namespace

void Executor::fill_expected(const ClientPlan& plan, const TestCase& c, ExecutionRecord& rec) {
  switch (c.expected_source) {
    case ExpectedSource::Oracle:
      try {
        rec.expected = plans_.evaluate_oracle(plan, c.args);
      } catch (const Error& e) {
        rec.expected_error =
            e.code() == Errc::OracleAbsent ? ErrorClass::OracleAbsent : ErrorClass::OracleFailure;
        rec.expected_detail = e.what();
      }
      return;
    case ExpectedSource::Golden:
      rec.expected = store_.baseline_for(c.case_id);  // empty on the calibrating run
      return;
    case ExpectedSource::Explicit:
      if (c.explicit_expected)
        rec.expected = *c.explicit_expected;
      else {
        rec.expected_error = ErrorClass::OracleAbsent;
        rec.expected_detail = "EXPLICIT case " + c.case_id + " carries no expected value";
      }
      return;
  }
  throw Error(Errc::BadValue, "corrupt expected_source tag");
}

ExecutionRecord Executor::execute_case(const ClientPlan& plan, const TestCase& c,
                                       std::chrono::milliseconds acquire_timeout) {
  if (c.service_id != plan.service_id || c.op_name != plan.signature.op_name)
    throw Error(Errc::UnknownCase, "case " + c.case_id + " targets " +
                                       std::to_string(c.service_id) + "/" + c.op_name +
                                       ", plan covers " + std::to_string(plan.service_id) + "/" +
                                       plan.signature.op_name);

  ExecutionRecord rec;
  rec.case_id = c.case_id;
  rec.service_id = c.service_id;
  rec.op_name = c.op_name;

  fill_expected(plan, c, rec);

  AgentHandle agent = pool_.acquire(acquire_timeout);
  DispatchResult sent = pool_.dispatch(agent, make_request(c, wall_clock_stamp()));

  rec.latency_ms = sent.latency_ms;
  rec.agent_id = sent.agent_id;
  rec.server = sent.server;

  if (sent.error) {
    rec.actual_error = classify_transport(*sent.error);
    rec.actual_detail = sent.error_detail;
    return rec;
  }

  const TestResponse& resp = *sent.response;
  if (!resp.ok) {
    rec.actual_error = ErrorClass::FaultResponse;
    rec.actual_detail = resp.fault;
    return rec;
  }

  try {
    rec.actual = value_from_text(plan.signature.return_type, resp.value);
  } catch (const Error&) {
    rec.actual_error = ErrorClass::MalformedResponse;
    rec.actual_detail = "value '" + resp.value + "' does not read as " +
                        value_type_name(plan.signature.return_type);
    return rec;
  }

  // Calibrating GOLDEN run: freeze the first clean observation as baseline.
  if (c.expected_source == ExpectedSource::Golden && !rec.expected && !rec.expected_error) {
    store_.append_baseline(BaselineRecord{c.case_id, *rec.actual});
    rec.expected = rec.actual;
    rec.expected_detail = "baseline recorded on this run";
  }

  return rec;
}

std::vector<ExecutionRecord> Executor::execute_suite(const ClientPlan& plan,
                                                     const std::vector<TestCase>& cases,
                                                     int parallelism,
                                                     std::chrono::milliseconds acquire_timeout) {
  if (parallelism < 1) throw Error(Errc::BadValue, "parallelism must be >= 1");
  std::vector<ExecutionRecord> out(cases.size());
  if (cases.empty()) return out;

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), cases.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      try {
        out[i] = execute_case(plan, cases[i], acquire_timeout);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();

  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace soatest
