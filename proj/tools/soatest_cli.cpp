// soatest — command-line front end for the web-service test harness.
//
// Exit codes: 0 = success (including an empty regression selection),
//             1 = the run judged at least one case UNSUCCESSFUL,
//             2 = usage, configuration, or harness errors.

#include <cctype>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "soatest/engine.hpp"
#include "soatest/mockfleet.hpp"
#include "soatest/testgen.hpp"

namespace {

using nlohmann::json;
using namespace soatest;

constexpr int kExitOk = 0;
constexpr int kExitVerdictFailures = 1;
constexpr int kExitError = 2;

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string default_store_path() {
  if (const char* env = std::getenv("SOATEST_STORE"); env && *env) return env;
  return "soatest.journal.jsonl";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadValue, "cannot open file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::BadValue, "file is not valid JSON: " + path);
  return j;
}

/// Store + registry + engine wired together the same way for every command.
struct Workbench {
  Store store;
  Registry registry;
  OracleCatalog catalog;
  AdapterSet adapters;
  AgentPool pool;
  Engine engine;
  MockFleet loopback_hosts;

  Workbench(const std::string& store_path, int parallelism, std::int64_t send_timeout_ms)
      : store(store_path),
        registry(store),
        pool(registry, adapters, parallelism, std::chrono::milliseconds(send_timeout_ms)),
        engine(registry, catalog, pool, store) {
    if (store.load_report().corrupt)
      std::cerr << "warning: " << store.load_report().warning << "\n";
    // Operations named after builtin behaviors get their reference oracle
    // bound automatically, so verdicts work across separate CLI invocations.
    for (const auto& d : registry.list_services())
      for (const auto& op : d.operations)
        if (auto oracle = builtin_oracle_for(op.op_name))
          catalog.bind(d.service_id, op.op_name, *oracle);
  }

  /// LOOPBACK services live in-process; host any that a run is about to hit.
  void host_loopback(std::int64_t service_id) {
    const ServiceDescriptor d = registry.lookup_service(service_id);
    if (d.protocol != Protocol::Loopback) return;
    for (const auto& hosted : loopback_hosts.services())
      if (hosted->descriptor().service_id == service_id) return;
    MockServiceConfig cfg;
    cfg.descriptor = d;
    loopback_hosts.add(std::move(cfg)).start();
  }
};

std::string reason_text(const Verdict& v) {
  if (v.successful) return "";
  return v.reason ? fail_reason_name(*v.reason) : "";
}

void print_records_table(const std::vector<ExecutionRecord>& records) {
  std::cout << std::left << std::setw(16) << "CASE" << std::setw(10) << "OP" << std::setw(22)
            << "EXPECTED" << std::setw(22) << "ACTUAL" << std::setw(14) << "VERDICT"
            << std::setw(18) << "REASON" << std::setw(8) << "MS" << std::setw(7) << "AGENT"
            << "SERVER\n";
  for (const auto& r : records) {
    auto cell = [](const std::optional<TypedValue>& v, const std::optional<ErrorClass>& e) {
      if (v) {
        std::string s = value_to_text(*v);
        if (s.size() > 20) s = s.substr(0, 17) + "...";
        return s;
      }
      return std::string(e ? error_class_name(*e) : "-");
    };
    std::cout << std::left << std::setw(16) << r.case_id.substr(0, 15) << std::setw(10)
              << r.op_name << std::setw(22) << cell(r.expected, r.expected_error) << std::setw(22)
              << cell(r.actual, r.actual_error) << std::setw(14)
              << (r.verdict ? case_status_name(r.verdict->successful ? CaseStatus::Successful
                                                                     : CaseStatus::Unsuccessful)
                            : "-")
              << std::setw(18) << (r.verdict ? reason_text(*r.verdict) : "") << std::setw(8)
              << r.latency_ms << std::setw(7) << r.agent_id << r.server << "\n";
  }
}

json record_to_json(const ExecutionRecord& r) {
  json j;
  j["case_id"] = r.case_id;
  j["service_id"] = r.service_id;
  j["op"] = r.op_name;
  if (r.expected) j["expected"] = *r.expected;
  if (r.expected_error) j["expected_error"] = error_class_name(*r.expected_error);
  if (r.actual) j["actual"] = *r.actual;
  if (r.actual_error) j["actual_error"] = error_class_name(*r.actual_error);
  if (!r.actual_detail.empty()) j["detail"] = r.actual_detail;
  j["latency_ms"] = r.latency_ms;
  j["agent_id"] = r.agent_id;
  j["server"] = r.server;
  if (r.verdict) {
    j["successful"] = r.verdict->successful;
    if (r.verdict->reason) j["reason"] = fail_reason_name(*r.verdict->reason);
  }
  return j;
}

json summary_to_json(const RunSummary& s) {
  json by_reason = json::object();
  for (const auto& [reason, n] : s.by_reason) by_reason[fail_reason_name(reason)] = n;
  return {{"run_id", s.run_id},
          {"total", s.total},
          {"successful", s.successful},
          {"unsuccessful", s.unsuccessful},
          {"by_reason", std::move(by_reason)},
          {"duration_ms", s.duration_ms}};
}

int finish_run(const RunReport& report, const std::string& format) {
  if (format == "machine") {
    json out;
    out["summary"] = summary_to_json(report.summary);
    out["warnings"] = report.warnings;
    out["results"] = json::array();
    for (const auto& r : report.records) out["results"].push_back(record_to_json(r));
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    print_records_table(report.records);
    const auto& s = report.summary;
    std::cout << "run " << s.run_id << ": " << s.total << " cases, " << s.successful
              << " successful, " << s.unsuccessful << " unsuccessful";
    if (s.duration_ms >= 0) std::cout << " (" << s.duration_ms << " ms)";
    std::cout << "\n";
    for (const auto& [reason, n] : s.by_reason)
      std::cout << "  " << fail_reason_name(reason) << ": " << n << "\n";
  }
  return report.summary.unsuccessful == 0 ? kExitOk : kExitVerdictFailures;
}

std::vector<RunTarget> parse_targets(const std::vector<std::string>& raw) {
  std::vector<RunTarget> targets;
  for (const auto& t : raw) {
    const auto colon = t.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= t.size())
      throw Error(Errc::BadValue, "target must look like SERVICE_ID:OPERATION, got '" + t + "'");
    RunTarget target;
    try {
      target.service_id = std::stoll(t.substr(0, colon));
    } catch (const std::exception&) {
      throw Error(Errc::BadValue, "target service id is not a number in '" + t + "'");
    }
    target.op_name = t.substr(colon + 1);
    targets.push_back(std::move(target));
  }
  return targets;
}

// ---------------------------------------------------------------- commands

int cmd_register(const std::string& store_path, const std::string& descriptor_file) {
  Workbench bench(store_path, 1, 1000);
  const ServiceDescriptor d = read_json_file(descriptor_file).get<ServiceDescriptor>();
  bench.registry.register_service(d);
  std::cout << "registered service " << d.service_id << " (" << d.name << ", "
            << protocol_name(d.protocol) << ", " << d.operations.size() << " operations)\n";
  return kExitOk;
}

int cmd_generate(const std::string& store_path, std::int64_t service_id, const std::string& op,
                 const std::string& strategy_name, std::uint64_t seed, std::size_t count,
                 const std::string& cases_file, const std::string& expected_source) {
  Workbench bench(store_path, 1, 1000);
  const ServiceDescriptor d = bench.registry.lookup_service(service_id);

  GenStrategy strategy;
  std::vector<TypedValue> explicit_expected;
  if (strategy_name == "boundary") {
    strategy = BoundaryStrategy{};
  } else if (strategy_name == "random") {
    strategy = RandomStrategy{seed, count};
  } else if (strategy_name == "explicit") {
    if (cases_file.empty())
      throw Error(Errc::BadValue, "explicit generation needs --cases-file");
    const json spec_json = read_json_file(cases_file);
    ExplicitStrategy ex;
    for (const auto& tuple : spec_json.at("tuples"))
      ex.tuples.push_back(tuple.get<std::vector<TypedValue>>());
    if (spec_json.contains("expected"))
      explicit_expected = spec_json.at("expected").get<std::vector<TypedValue>>();
    strategy = std::move(ex);
  } else {
    throw Error(Errc::BadValue, "unknown strategy '" + strategy_name + "'");
  }

  std::vector<TestCase> cases = generate_cases(d, op, strategy);

  if (!explicit_expected.empty()) {
    if (explicit_expected.size() != cases.size())
      throw Error(Errc::BadValue, "expected list has " + std::to_string(explicit_expected.size()) +
                                      " entries for " + std::to_string(cases.size()) + " tuples");
    for (std::size_t i = 0; i < cases.size(); ++i) {
      cases[i].expected_source = ExpectedSource::Explicit;
      cases[i].explicit_expected = explicit_expected[i];
    }
  } else if (expected_source == "golden") {
    for (auto& c : cases) c.expected_source = ExpectedSource::Golden;
  } else if (expected_source == "explicit") {
    throw Error(Errc::BadValue, "--expected-source explicit needs an 'expected' list in the file");
  }

  persist_cases(bench.store, cases);
  std::cout << "generated " << cases.size() << " cases for service " << service_id << " op "
            << op << "\n";
  for (const auto& c : cases) std::cout << "  " << c.case_id << "\n";
  return kExitOk;
}

int cmd_run(const std::string& store_path, const std::vector<std::string>& raw_targets,
            int parallelism, std::int64_t timeout_ms, std::int64_t acquire_timeout_ms,
            const std::string& run_id, const std::string& format) {
  Workbench bench(store_path, parallelism, timeout_ms);
  const std::vector<RunTarget> targets = parse_targets(raw_targets);
  for (const auto& t : targets) bench.host_loopback(t.service_id);

  RunConfig config;
  config.run_id = run_id;
  config.parallelism = parallelism;
  config.acquire_timeout = std::chrono::milliseconds(acquire_timeout_ms);
  return finish_run(bench.engine.run_full(targets, config), format);
}

int cmd_regress(const std::string& store_path, const std::vector<std::int64_t>& modified,
                int parallelism, std::int64_t timeout_ms, std::int64_t acquire_timeout_ms,
                const std::string& run_id, const std::string& format) {
  Workbench bench(store_path, parallelism, timeout_ms);
  for (auto id : modified) bench.host_loopback(id);

  RunConfig config;
  config.run_id = run_id;
  config.parallelism = parallelism;
  config.acquire_timeout = std::chrono::milliseconds(acquire_timeout_ms);
  return finish_run(bench.engine.run_regression(modified, config), format);
}

int cmd_report(const std::string& store_path, std::string run_id, const std::string& format) {
  Store store(store_path);
  if (store.load_report().corrupt)
    std::cerr << "warning: " << store.load_report().warning << "\n";
  Monitor monitor(store);

  if (run_id.empty()) {
    const auto ids = store.run_ids();
    if (ids.empty()) throw Error(Errc::UnknownRun, "the journal holds no runs");
    run_id = ids.back();
  }
  const RunSummary s = monitor.summarize(run_id);

  if (format == "machine") {
    json out;
    out["summary"] = summary_to_json(s);
    out["results"] = json::array();
    for (const auto& r : store.results_for_run(run_id)) {
      json row;
      row["case_id"] = r.case_id;
      row["successful"] = r.verdict.successful;
      if (r.verdict.reason) row["reason"] = fail_reason_name(*r.verdict.reason);
      if (r.expected) row["expected"] = *r.expected;
      if (r.actual) row["actual"] = *r.actual;
      if (!r.detail.empty()) row["detail"] = r.detail;
      row["latency_ms"] = r.latency_ms;
      row["agent_id"] = r.agent_id;
      row["server"] = r.server;
      out["results"].push_back(std::move(row));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "run " << s.run_id << ": " << s.total << " cases, " << s.successful
              << " successful, " << s.unsuccessful << " unsuccessful";
    if (s.duration_ms >= 0) std::cout << " (" << s.duration_ms << " ms)";
    std::cout << "\n";
    for (const auto& r : store.results_for_run(run_id)) {
      std::cout << "  " << r.case_id << "  "
                << (r.verdict.successful ? "SUCCESSFUL" : "UNSUCCESSFUL");
      if (r.verdict.reason) std::cout << "  " << fail_reason_name(*r.verdict.reason);
      if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
      std::cout << "\n";
    }
  }
  return s.unsuccessful == 0 ? kExitOk : kExitVerdictFailures;
}

std::string fleet_state_path(const std::string& store_path) {
  return store_path + ".fleet.json";
}

int cmd_fleet_up(const std::string& store_path, int count, const std::string& protocol_name_str,
                 int endpoints_per_service, std::vector<std::int64_t> ids,
                 const std::string& fault_name, std::int64_t delay_ms, int control_port) {
  const Protocol protocol = protocol_from_name(upper(protocol_name_str));
  if (count < 1) throw Error(Errc::BadValue, "--count must be >= 1");
  if (ids.empty())
    for (int i = 1; i <= count; ++i) ids.push_back(i);
  if (static_cast<int>(ids.size()) != count)
    throw Error(Errc::BadValue, "--id list must match --count");

  Store store(store_path);
  Registry registry(store);

  MockFleet fleet;
  std::vector<MockService*> services;
  for (int i = 0; i < count; ++i) {
    MockServiceConfig cfg;
    cfg.descriptor = standard_mock_descriptor(ids[static_cast<std::size_t>(i)],
                                              "mock-ws" + std::to_string(ids[i]), protocol,
                                              endpoints_per_service);
    cfg.initial_fault = fault_mode_from_name(upper(fault_name));
    cfg.delay = std::chrono::milliseconds(delay_ms);
    services.push_back(&fleet.add(std::move(cfg)));
  }
  fleet.start_all();
  for (auto* s : services) registry.register_service(s->descriptor());

  httplib::Server control;
  control.Post("/fault", [&](const httplib::Request& req, httplib::Response& res) {
    try {
      const json body = json::parse(req.body);
      const std::int64_t sid = body.at("service_id").get<std::int64_t>();
      const FaultMode mode = fault_mode_from_name(body.at("mode").get<std::string>());
      for (auto* s : services)
        if (s->descriptor().service_id == sid) {
          if (body.contains("delay_ms"))
            s->set_delay(std::chrono::milliseconds(body["delay_ms"].get<std::int64_t>()));
          s->inject_fault(mode);
          res.set_content(json{{"ok", true}}.dump(), "application/json");
          return;
        }
      res.status = 404;
      res.set_content(json{{"error", "no such service"}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  control.Get("/status", [&](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (auto* s : services)
      out.push_back({{"service_id", s->descriptor().service_id},
                     {"name", s->descriptor().name},
                     {"fault", fault_mode_name(s->fault())},
                     {"hits", s->hits()}});
    res.set_content(out.dump(2), "application/json");
  });
  control.Post("/shutdown", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"ok", true}}.dump(), "application/json");
    std::thread([&control] {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      control.stop();
    }).detach();
  });

  int bound_control_port = control_port;
  if (control_port == 0) {
    bound_control_port = control.bind_to_any_port("127.0.0.1");
    if (bound_control_port <= 0) throw Error(Errc::BindFailure, "cannot bind a control port");
  } else if (!control.bind_to_port("127.0.0.1", control_port)) {
    throw Error(Errc::BindFailure, "cannot bind control port " + std::to_string(control_port));
  }

  json state;
  state["control"] = "127.0.0.1:" + std::to_string(bound_control_port);
  state["services"] = json::array();
  for (auto* s : services) state["services"].push_back(s->descriptor());
  {
    std::ofstream out(fleet_state_path(store_path));
    out << state.dump(2) << "\n";
  }

  std::cout << "fleet up: " << count << " " << protocol_name_str << " service(s), control at "
            << state["control"].get<std::string>() << "\n";
  for (auto* s : services) {
    std::cout << "  service " << s->descriptor().service_id << ":";
    for (const auto& ep : s->descriptor().endpoints) std::cout << " " << ep.to_string();
    std::cout << "\n";
  }
  std::cout.flush();

  control.listen_after_bind();  // blocks until /shutdown
  fleet.stop_all();
  std::filesystem::remove(fleet_state_path(store_path));
  std::cout << "fleet stopped\n";
  return kExitOk;
}

int cmd_fleet_down(const std::string& store_path) {
  const std::string state_path = fleet_state_path(store_path);
  if (!std::filesystem::exists(state_path))
    throw Error(Errc::BadValue, "no fleet state file at " + state_path);
  const json state = read_json_file(state_path);
  const std::string control = state.at("control").get<std::string>();
  const auto colon = control.find(':');
  httplib::Client client(control.substr(0, colon), std::stoi(control.substr(colon + 1)));
  client.set_connection_timeout(2, 0);
  auto res = client.Post("/shutdown", "", "application/json");
  if (!res) {
    // The fleet process is already gone; clear the stale state file.
    std::filesystem::remove(state_path);
    std::cout << "fleet was not reachable; removed stale state file\n";
    return kExitOk;
  }
  std::cout << "fleet shutdown requested\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed cross-platform test harness for web services"};
  app.require_subcommand(1);

  std::string store_path = default_store_path();
  app.add_option("--store", store_path, "Journal file backing registry, cases, and results")
      ->envname("SOATEST_STORE");

  std::string format = "table";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "machine"}));

  // register
  auto* reg = app.add_subcommand("register", "Register a service descriptor (JSON file)");
  std::string descriptor_file;
  reg->add_option("--file", descriptor_file, "Descriptor JSON file")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate and persist test cases");
  std::int64_t gen_service = 0;
  std::string gen_op, gen_strategy = "boundary", gen_cases_file, gen_expected_source = "oracle";
  std::uint64_t gen_seed = 1;
  std::size_t gen_count = 16;
  gen->add_option("--service", gen_service, "Service id")->required();
  gen->add_option("--op", gen_op, "Operation name")->required();
  gen->add_option("--strategy", gen_strategy, "boundary | random | explicit")
      ->check(CLI::IsMember({"boundary", "random", "explicit"}));
  gen->add_option("--seed", gen_seed, "Seed for random generation");
  gen->add_option("--count", gen_count, "Number of random cases");
  gen->add_option("--cases-file", gen_cases_file,
                  "JSON file with {\"tuples\": [[value...]], \"expected\": [value...]} for "
                  "explicit generation");
  gen->add_option("--expected-source", gen_expected_source,
                  "Where expected values come from at run time")
      ->check(CLI::IsMember({"oracle", "golden", "explicit"}));

  // run
  auto* run = app.add_subcommand("run", "Execute every stored case of the given targets");
  std::vector<std::string> run_targets;
  int parallelism = 4;
  std::int64_t timeout_ms = 5000, acquire_timeout_ms = 5000;
  std::string run_id;
  run->add_option("--target", run_targets, "Target as SERVICE_ID:OPERATION (repeatable)")
      ->required();
  run->add_option("--parallelism", parallelism, "Worker/agent count");
  run->add_option("--timeout-ms", timeout_ms, "Per-dispatch send timeout");
  run->add_option("--acquire-timeout-ms", acquire_timeout_ms, "Agent acquisition timeout");
  run->add_option("--run-id", run_id, "Run id (generated when omitted)");

  // regress
  auto* regress = app.add_subcommand(
      "regress", "Re-run previously SUCCESSFUL cases of the modified services");
  std::vector<std::int64_t> modified;
  regress->add_option("--modified", modified, "Modified service id (repeatable)")->required();
  regress->add_option("--parallelism", parallelism, "Worker/agent count");
  regress->add_option("--timeout-ms", timeout_ms, "Per-dispatch send timeout");
  regress->add_option("--acquire-timeout-ms", acquire_timeout_ms, "Agent acquisition timeout");
  regress->add_option("--run-id", run_id, "Run id (generated when omitted)");

  // report
  auto* report = app.add_subcommand("report", "Summarize a stored run");
  std::string report_run_id;
  report->add_option("--run", report_run_id, "Run id (defaults to the newest run)");

  // fleet-up / fleet-down
  auto* fleet_up = app.add_subcommand("fleet-up", "Start mock services and block");
  int fleet_count = 1, fleet_endpoints = 1, fleet_control_port = 0;
  std::string fleet_protocol = "soap", fleet_fault = "NONE";
  std::int64_t fleet_delay_ms = 1000;
  std::vector<std::int64_t> fleet_ids;
  fleet_up->add_option("--count", fleet_count, "How many mock services");
  fleet_up->add_option("--protocol", fleet_protocol, "soap | rest")
      ->check(CLI::IsMember({"soap", "rest"}));
  fleet_up->add_option("--endpoints", fleet_endpoints, "Endpoints (ports) per service");
  fleet_up->add_option("--id", fleet_ids, "Service ids to use (defaults to 1..count)");
  fleet_up->add_option("--fault", fleet_fault,
                       "Initial fault mode (NONE, OFF_BY_ONE, SOAP_FAULT, DELAY, "
                       "DROP_CONNECTION, MALFORMED_BODY)");
  fleet_up->add_option("--delay-ms", fleet_delay_ms, "Pause used by the DELAY fault");
  fleet_up->add_option("--control-port", fleet_control_port, "Control port (0 = pick one)");

  auto* fleet_down = app.add_subcommand("fleet-down", "Stop a running fleet");
  (void)fleet_down;

  // Let the global options (--store, --format) appear on either side of the
  // subcommand name.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (reg->parsed()) return cmd_register(store_path, descriptor_file);
    if (gen->parsed())
      return cmd_generate(store_path, gen_service, gen_op, gen_strategy, gen_seed, gen_count,
                          gen_cases_file, gen_expected_source);
    if (run->parsed())
      return cmd_run(store_path, run_targets, parallelism, timeout_ms, acquire_timeout_ms,
                     run_id, format);
    if (regress->parsed())
      return cmd_regress(store_path, modified, parallelism, timeout_ms, acquire_timeout_ms,
                         run_id, format);
    if (report->parsed()) return cmd_report(store_path, report_run_id, format);
    if (fleet_up->parsed())
      return cmd_fleet_up(store_path, fleet_count, fleet_protocol, fleet_endpoints, fleet_ids,
                          fleet_fault, fleet_delay_ms, fleet_control_port);
    if (fleet_down->parsed()) return cmd_fleet_down(store_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
