// Python bindings for the harness core. The Harness class bundles the store,
// registry, oracle catalog, agent pool, and engine behind one object so
// Python callers never juggle C++ reference lifetimes.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "soatest/engine.hpp"
#include "soatest/middleware.hpp"
#include "soatest/mockfleet.hpp"
#include "soatest/testgen.hpp"

namespace py = pybind11;
using namespace soatest;

namespace {

/// Wraps a Python callable as an oracle. Worker threads run without the GIL,
/// so the wrapper re-acquires it for the duration of the Python call.
Oracle wrap_python_oracle(py::function fn) {
  return [fn = std::move(fn)](const std::vector<TypedValue>& args) -> TypedValue {
    py::gil_scoped_acquire gil;
    return fn(args).cast<TypedValue>();
  };
}

struct Harness {
  Store store;
  Registry registry;
  OracleCatalog catalog;
  AdapterSet adapters;
  AgentPool pool;
  Engine engine;

  Harness(const std::string& store_path, int parallelism, std::int64_t send_timeout_ms)
      : store(store_path),
        registry(store),
        pool(registry, adapters, parallelism, std::chrono::milliseconds(send_timeout_ms)),
        engine(registry, catalog, pool, store) {}

  void bind_builtin_oracles() {
    for (const auto& d : registry.list_services())
      for (const auto& op : d.operations)
        if (auto oracle = builtin_oracle_for(op.op_name))
          catalog.bind(d.service_id, op.op_name, *oracle);
  }

  std::vector<TestCase> generate(std::int64_t service_id, const std::string& op,
                                 const std::string& strategy, std::uint64_t seed,
                                 std::size_t count,
                                 const std::vector<std::vector<TypedValue>>& tuples) {
    const ServiceDescriptor d = registry.lookup_service(service_id);
    GenStrategy gen;
    if (strategy == "boundary")
      gen = BoundaryStrategy{};
    else if (strategy == "random")
      gen = RandomStrategy{seed, count};
    else if (strategy == "explicit")
      gen = ExplicitStrategy{tuples};
    else
      throw Error(Errc::BadValue, "unknown strategy '" + strategy + "'");
    std::vector<TestCase> cases = generate_cases(d, op, gen);
    persist_cases(store, cases);
    return cases;
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed, cross-platform, regression-capable web service test harness";

  py::register_exception<Error>(m, "HarnessError");

  py::enum_<ValueType>(m, "ValueType")
      .value("INT", ValueType::Int)
      .value("FLOAT", ValueType::Float)
      .value("STRING", ValueType::Str)
      .value("BOOL", ValueType::Bool);

  py::enum_<Protocol>(m, "Protocol")
      .value("SOAP", Protocol::Soap)
      .value("REST", Protocol::Rest)
      .value("LOOPBACK", Protocol::Loopback);

  py::enum_<ExpectedSource>(m, "ExpectedSource")
      .value("ORACLE", ExpectedSource::Oracle)
      .value("GOLDEN", ExpectedSource::Golden)
      .value("EXPLICIT", ExpectedSource::Explicit);

  py::enum_<CaseStatus>(m, "CaseStatus")
      .value("PENDING", CaseStatus::Pending)
      .value("SUCCESSFUL", CaseStatus::Successful)
      .value("UNSUCCESSFUL", CaseStatus::Unsuccessful);

  py::enum_<FailReason>(m, "FailReason")
      .value("MISMATCH", FailReason::Mismatch)
      .value("TRANSPORT_ERROR", FailReason::TransportError)
      .value("FAULT_RESPONSE", FailReason::FaultResponse)
      .value("ORACLE_FAILURE", FailReason::OracleFailure)
      .value("MALFORMED", FailReason::Malformed);

  py::enum_<FaultMode>(m, "FaultMode")
      .value("NONE", FaultMode::None)
      .value("OFF_BY_ONE", FaultMode::OffByOne)
      .value("SOAP_FAULT", FaultMode::SoapFault)
      .value("DELAY", FaultMode::Delay)
      .value("DROP_CONNECTION", FaultMode::DropConnection)
      .value("MALFORMED_BODY", FaultMode::MalformedBody);

  py::enum_<LocalizeKind>(m, "LocalizeKind")
      .value("NO_FAULT", LocalizeKind::NoFault)
      .value("LOCATED", LocalizeKind::Located)
      .value("INCONCLUSIVE", LocalizeKind::Inconclusive);

  py::class_<TypedValue>(m, "TypedValue")
      .def_static("of_int", [](std::int64_t v) { return TypedValue::of(v); })
      .def_static("of_float", [](double v) { return TypedValue::of(v); })
      .def_static("of_str", [](const std::string& v) { return TypedValue::of(v); })
      .def_static("of_bool", [](bool v) { return TypedValue::of(v); })
      .def_property_readonly("type", &TypedValue::type)
      .def("as_int", &TypedValue::as_int)
      .def("as_float", &TypedValue::as_float)
      .def("as_str", &TypedValue::as_str)
      .def("as_bool", &TypedValue::as_bool)
      .def("text", [](const TypedValue& v) { return value_to_text(v); })
      .def("__eq__", [](const TypedValue& a, const TypedValue& b) { return a == b; })
      .def("__repr__", [](const TypedValue& v) {
        return std::string("TypedValue(") + value_type_name(v.type()) + ", '" +
               value_to_text(v) + "')";
      });

  m.def("value_from_text",
        [](ValueType t, const std::string& s) { return value_from_text(t, s); });

  py::class_<Endpoint>(m, "Endpoint")
      .def(py::init([](const std::string& text) { return Endpoint::parse(text); }))
      .def_readwrite("host", &Endpoint::host)
      .def_readwrite("port", &Endpoint::port)
      .def_readwrite("path", &Endpoint::path)
      .def("authority", &Endpoint::authority)
      .def("__repr__", [](const Endpoint& e) { return "Endpoint('" + e.to_string() + "')"; });

  py::class_<Param>(m, "Param")
      .def(py::init([](const std::string& name, ValueType type) {
             return Param{name, type};
           }),
           py::arg("name"), py::arg("type"))
      .def_readwrite("name", &Param::name)
      .def_readwrite("type", &Param::type);

  py::class_<OperationSignature>(m, "OperationSignature")
      .def(py::init([](const std::string& name, const std::vector<Param>& params,
                       ValueType returns) {
             return OperationSignature{name, params, returns};
           }),
           py::arg("name"), py::arg("params"), py::arg("returns"))
      .def_readwrite("op_name", &OperationSignature::op_name)
      .def_readwrite("params", &OperationSignature::params)
      .def_readwrite("return_type", &OperationSignature::return_type);

  py::class_<ServiceDescriptor>(m, "ServiceDescriptor")
      .def(py::init<>())
      .def_readwrite("service_id", &ServiceDescriptor::service_id)
      .def_readwrite("name", &ServiceDescriptor::name)
      .def_readwrite("protocol", &ServiceDescriptor::protocol)
      .def_readwrite("endpoints", &ServiceDescriptor::endpoints)
      .def_readwrite("soap_namespace", &ServiceDescriptor::soap_namespace)
      .def_readwrite("operations", &ServiceDescriptor::operations)
      .def("__repr__", [](const ServiceDescriptor& d) {
        return "ServiceDescriptor(id=" + std::to_string(d.service_id) + ", name='" + d.name +
               "', protocol=" + protocol_name(d.protocol) + ")";
      });

  py::class_<TestCase>(m, "TestCase")
      .def_readonly("case_id", &TestCase::case_id)
      .def_readonly("service_id", &TestCase::service_id)
      .def_readonly("op_name", &TestCase::op_name)
      .def_readonly("args", &TestCase::args)
      .def_readonly("expected_source", &TestCase::expected_source)
      .def_readonly("explicit_expected", &TestCase::explicit_expected)
      .def_readonly("status", &TestCase::status)
      .def_readonly("created_at", &TestCase::created_at);

  py::class_<Verdict>(m, "Verdict")
      .def_readonly("successful", &Verdict::successful)
      .def_readonly("reason", &Verdict::reason);

  py::class_<ExecutionRecord>(m, "ExecutionRecord")
      .def_readonly("case_id", &ExecutionRecord::case_id)
      .def_readonly("expected", &ExecutionRecord::expected)
      .def_readonly("actual", &ExecutionRecord::actual)
      .def_readonly("latency_ms", &ExecutionRecord::latency_ms)
      .def_readonly("agent_id", &ExecutionRecord::agent_id)
      .def_readonly("server", &ExecutionRecord::server)
      .def_readonly("verdict", &ExecutionRecord::verdict);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("run_id", &RunSummary::run_id)
      .def_readonly("total", &RunSummary::total)
      .def_readonly("successful", &RunSummary::successful)
      .def_readonly("unsuccessful", &RunSummary::unsuccessful)
      .def_readonly("by_reason", &RunSummary::by_reason)
      .def_readonly("duration_ms", &RunSummary::duration_ms)
      .def("all_successful", &RunSummary::all_successful);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("summary", &RunReport::summary)
      .def_readonly("warnings", &RunReport::warnings)
      .def_readonly("records", &RunReport::records);

  py::class_<LocalizeOutcome>(m, "LocalizeOutcome")
      .def_readonly("kind", &LocalizeOutcome::kind)
      .def_readonly("faulty", &LocalizeOutcome::faulty)
      .def_readonly("iterations", &LocalizeOutcome::iterations)
      .def_readonly("note", &LocalizeOutcome::note);

  // Canonical XML codec, exposed for round-trip checks from Python.
  py::class_<TestRequest>(m, "TestRequest")
      .def(py::init([](std::int64_t sid, const std::string& op,
                       const std::vector<std::string>& params, const std::string& ts) {
             return TestRequest{sid, op, params, ts};
           }),
           py::arg("service_id"), py::arg("op_name"), py::arg("params"), py::arg("timestamp"))
      .def_readwrite("service_id", &TestRequest::service_id)
      .def_readwrite("op_name", &TestRequest::op_name)
      .def_readwrite("params", &TestRequest::params)
      .def_readwrite("timestamp", &TestRequest::timestamp)
      .def("__eq__", [](const TestRequest& a, const TestRequest& b) { return a == b; });

  m.def("encode_request", &encode_request);
  m.def("decode_request", &decode_request);

  py::class_<MockService>(m, "MockService")
      .def("start", &MockService::start, py::call_guard<py::gil_scoped_release>())
      .def("stop", &MockService::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("descriptor", &MockService::descriptor)
      .def("inject_fault", &MockService::inject_fault)
      .def("set_delay", [](MockService& s, std::int64_t ms) {
        s.set_delay(std::chrono::milliseconds(ms));
      })
      .def_property_readonly("hits", &MockService::hits);

  m.def(
      "make_mock",
      [](std::int64_t service_id, const std::string& name, Protocol protocol, int port_count) {
        MockServiceConfig cfg;
        cfg.descriptor = standard_mock_descriptor(service_id, name, protocol, port_count);
        return std::make_unique<MockService>(std::move(cfg));
      },
      py::arg("service_id"), py::arg("name"), py::arg("protocol") = Protocol::Loopback,
      py::arg("port_count") = 1,
      "A mock service exposing add/concat/echo on fresh endpoints (not yet started)");

  py::class_<Harness>(m, "Harness")
      .def(py::init<const std::string&, int, std::int64_t>(), py::arg("store_path"),
           py::arg("parallelism") = 4, py::arg("send_timeout_ms") = 5000)
      .def("register_service",
           [](Harness& h, const ServiceDescriptor& d) { return h.registry.register_service(d); })
      .def("lookup_service",
           [](const Harness& h, std::int64_t id) { return h.registry.lookup_service(id); })
      .def("list_services", [](const Harness& h) { return h.registry.list_services(); })
      .def("bind_builtin_oracles", &Harness::bind_builtin_oracles,
           "Bind the reference add/concat/echo oracles to every matching operation")
      .def("bind_oracle",
           [](Harness& h, std::int64_t service_id, const std::string& op, py::function fn) {
             PlanBuilder(h.store, h.catalog)
                 .register_oracle(service_id, op, wrap_python_oracle(std::move(fn)));
           },
           py::arg("service_id"), py::arg("op"), py::arg("oracle"),
           "Bind a Python callable (list[TypedValue] -> TypedValue) as the oracle")
      .def("generate", &Harness::generate, py::arg("service_id"), py::arg("op"),
           py::arg("strategy") = "boundary", py::arg("seed") = std::uint64_t{1},
           py::arg("count") = std::size_t{16},
           py::arg("tuples") = std::vector<std::vector<TypedValue>>{},
           "Generate and persist cases; returns them")
      .def("cases_for",
           [](const Harness& h, std::int64_t id) { return h.store.cases_for(id); })
      .def("successful_cases_for",
           [](const Harness& h, std::int64_t id) { return h.store.successful_cases_for(id); })
      .def(
          "run_full",
          [](Harness& h, const std::vector<std::pair<std::int64_t, std::string>>& targets,
             const std::string& run_id, int parallelism, std::int64_t acquire_timeout_ms) {
            std::vector<RunTarget> ts;
            for (const auto& [sid, op] : targets) ts.push_back({sid, op});
            RunConfig cfg;
            cfg.run_id = run_id;
            cfg.parallelism = parallelism;
            cfg.acquire_timeout = std::chrono::milliseconds(acquire_timeout_ms);
            return h.engine.run_full(ts, cfg);
          },
          py::arg("targets"), py::arg("run_id") = "", py::arg("parallelism") = 4,
          py::arg("acquire_timeout_ms") = std::int64_t{5000},
          py::call_guard<py::gil_scoped_release>(),
          "Run every stored case of [(service_id, op), ...]")
      .def(
          "run_regression",
          [](Harness& h, const std::vector<std::int64_t>& modified, const std::string& run_id,
             int parallelism, std::int64_t acquire_timeout_ms) {
            RunConfig cfg;
            cfg.run_id = run_id;
            cfg.parallelism = parallelism;
            cfg.acquire_timeout = std::chrono::milliseconds(acquire_timeout_ms);
            return h.engine.run_regression(modified, cfg);
          },
          py::arg("modified"), py::arg("run_id") = "", py::arg("parallelism") = 4,
          py::arg("acquire_timeout_ms") = std::int64_t{5000},
          py::call_guard<py::gil_scoped_release>(),
          "Re-run previously SUCCESSFUL cases of the modified services")
      .def(
          "localize_fault",
          [](Harness& h,
             const std::vector<std::tuple<std::int64_t, std::string, std::vector<TypedValue>>>&
                 stages,
             int max_iterations, int parallelism) {
            CompositeSpec spec;
            for (const auto& [sid, op, extra] : stages) spec.stages.push_back({sid, op, extra});
            RunConfig cfg;
            cfg.parallelism = parallelism;
            cfg.max_localization_iterations = max_iterations;
            return h.engine.localize_fault(spec, cfg);
          },
          py::arg("stages"), py::arg("max_iterations") = 3, py::arg("parallelism") = 4,
          py::call_guard<py::gil_scoped_release>(),
          "Find the faulty service in a composite of (service_id, op, extra_args) stages")
      .def("run_ids", [](const Harness& h) { return h.store.run_ids(); })
      .def("journal_corrupt", [](const Harness& h) { return h.store.load_report().corrupt; })
      .def("journal_warning", [](const Harness& h) { return h.store.load_report().warning; });
}
