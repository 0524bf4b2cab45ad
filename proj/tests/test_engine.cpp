#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "soatest/engine.hpp"
#include "soatest/mockfleet.hpp"
#include "soatest/testgen.hpp"

using namespace soatest;
using namespace std::chrono_literals;

namespace {

/// Engine wired to a loopback mock fleet. Each test adds the mocks it needs,
/// then calls wire() to register their resolved descriptors.
struct EngineBench {
  testutil::TempDir dir;
  Store store{dir.file("j.jsonl")};
  Registry registry{store};
  OracleCatalog catalog;
  AdapterSet adapters;
  AgentPool pool{registry, adapters, 4, 2000ms};
  Engine engine{registry, catalog, pool, store};
  MockFleet fleet;

  MockService& add_mock(std::int64_t id) {
    MockServiceConfig config;
    config.descriptor = standard_mock_descriptor(id, "ws" + std::to_string(id),
                                                 Protocol::Loopback);
    return fleet.add(std::move(config));
  }

  void wire() {
    fleet.start_all();
    for (const auto& d : fleet.descriptors()) {
      registry.register_service(d);
      for (const auto& op : d.operations)
        catalog.bind(d.service_id, op.op_name, *builtin_oracle_for(op.op_name));
    }
  }

  std::vector<TestCase> seed_explicit(std::int64_t sid, int pairs) {
    ExplicitStrategy strategy;
    for (int i = 1; i <= pairs; ++i)
      strategy.tuples.push_back({TypedValue::of(i), TypedValue::of(i * 10)});
    auto cases = generate_cases(registry.lookup_service(sid), "add", strategy);
    persist_cases(store, cases);
    return cases;
  }

  ~EngineBench() { fleet.stop_all(); }
};

}  // namespace

TEST_SUITE("full runs") {
  TEST_CASE("runs every stored case of the target and journals the outcome") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    const auto cases = bench.seed_explicit(5, 6);

    RunConfig config;
    config.run_id = "run-a";
    config.parallelism = 3;
    const RunReport report = bench.engine.run_full({{5, "add"}}, config);

    CHECK(report.summary.run_id == "run-a");
    CHECK(report.summary.total == 6);
    CHECK(report.summary.successful == 6);
    CHECK(report.summary.all_successful());
    CHECK(report.summary.duration_ms >= 0);
    REQUIRE(report.records.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(report.records[i].case_id == cases[i].case_id);
      CHECK(report.records[i].verdict == Verdict::pass());
    }

    // journal agrees: run record completed, every case flipped SUCCESSFUL
    REQUIRE(bench.store.run("run-a").has_value());
    CHECK(bench.store.run("run-a")->duration_ms >= 0);
    CHECK(bench.store.results_for_run("run-a").size() == 6);
    CHECK(bench.store.successful_cases_for(5).size() == 6);
  }

  TEST_CASE("one run can cover several targets, grouped per operation") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 2);
    ExplicitStrategy strategy;
    strategy.tuples = {{TypedValue::of("a"), TypedValue::of("b")}};
    persist_cases(bench.store,
                  generate_cases(bench.registry.lookup_service(5), "concat", strategy));

    const RunReport report =
        bench.engine.run_full({{5, "add"}, {5, "concat"}}, RunConfig{.run_id = "run-b"});
    CHECK(report.summary.total == 3);
    CHECK(report.summary.all_successful());
  }

  TEST_CASE("bad targets are rejected before anything runs") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 1);

    CHECK_THROWS_AS((void)bench.engine.run_full({}, RunConfig{}), Error);
    try {
      (void)bench.engine.run_full({{9, "add"}}, RunConfig{});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownService);
    }
    try {
      (void)bench.engine.run_full({{5, "divide"}}, RunConfig{});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownOperation);
    }
    try {
      (void)bench.engine.run_full({{5, "echo"}}, RunConfig{});  // no cases seeded
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoCases);
    }
    CHECK(bench.store.run_ids().empty());  // nothing was journaled
  }

  TEST_CASE("a run id cannot be journaled twice") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 1);
    (void)bench.engine.run_full({{5, "add"}}, RunConfig{.run_id = "dup"});
    try {
      (void)bench.engine.run_full({{5, "add"}}, RunConfig{.run_id = "dup"});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DuplicateId);
    }
  }

  TEST_CASE("failures show up with their reasons in the summary") {
    EngineBench bench;
    MockService& mock = bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 4);
    (void)bench.engine.run_full({{5, "add"}}, RunConfig{.run_id = "green"});

    mock.inject_fault(FaultMode::OffByOne);
    const RunReport report = bench.engine.run_full({{5, "add"}}, RunConfig{.run_id = "red"});
    CHECK(report.summary.total == 4);
    CHECK(report.summary.successful == 0);
    CHECK(report.summary.unsuccessful == 4);
    CHECK(report.summary.by_reason.at(FailReason::Mismatch) == 4);
  }
}

TEST_SUITE("regression runs") {
  TEST_CASE("selects exactly the previously successful cases of the modified services") {
    EngineBench bench;
    MockService& ws5 = bench.add_mock(5);
    bench.add_mock(7);
    bench.wire();

    // seed history: ws5 passes one case and fails another; ws7 passes one
    const auto ws5_cases = bench.seed_explicit(5, 1);
    auto failing = testutil::explicit_case(5, "add", {TypedValue::of(1), TypedValue::of(1)},
                                           TypedValue::of(3));  // wrong on purpose
    bench.store.append_case(failing);
    ExplicitStrategy strategy;
    strategy.tuples = {{TypedValue::of(2), TypedValue::of(3)}};
    persist_cases(bench.store, generate_cases(bench.registry.lookup_service(7), "add", strategy));
    (void)bench.engine.run_full({{5, "add"}, {7, "add"}}, RunConfig{.run_id = "seed"});

    // brute-force expectation from the store itself
    const auto expected_selection = bench.store.successful_cases_for(5);
    REQUIRE(expected_selection.size() == 1);
    CHECK(expected_selection[0].case_id == ws5_cases[0].case_id);

    const RunReport report =
        bench.engine.run_regression({5}, RunConfig{.run_id = "regress-1"});
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].case_id == ws5_cases[0].case_id);
    CHECK(report.summary.all_successful());
    CHECK(report.warnings.empty());

    // after a fault is injected, the same selection now fails
    ws5.inject_fault(FaultMode::OffByOne);
    const RunReport rerun = bench.engine.run_regression({5}, RunConfig{.run_id = "regress-2"});
    REQUIRE(rerun.records.size() == 1);
    CHECK(rerun.records[0].case_id == ws5_cases[0].case_id);
    CHECK(rerun.summary.unsuccessful == 1);

    // and because that case is no longer SUCCESSFUL, the next selection is empty
    const RunReport empty = bench.engine.run_regression({5}, RunConfig{.run_id = "regress-3"});
    CHECK(empty.records.empty());
    REQUIRE_FALSE(empty.warnings.empty());
    CHECK(empty.warnings[0].find("no previously") != std::string::npos);
  }

  TEST_CASE("duplicate ids are collapsed; unknown ids are refused") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 2);
    (void)bench.engine.run_full({{5, "add"}}, RunConfig{.run_id = "seed"});

    const RunReport report =
        bench.engine.run_regression({5, 5, 5}, RunConfig{.run_id = "regress"});
    CHECK(report.records.size() == 2);  // not 6

    CHECK_THROWS_AS((void)bench.engine.run_regression({}, RunConfig{}), Error);
    try {
      (void)bench.engine.run_regression({99}, RunConfig{});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownService);
    }
  }

  TEST_CASE("regression spans every operation with successful history") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 1);
    ExplicitStrategy strategy;
    strategy.tuples = {{TypedValue::of("x"), TypedValue::of("y")}};
    persist_cases(bench.store,
                  generate_cases(bench.registry.lookup_service(5), "concat", strategy));
    (void)bench.engine.run_full({{5, "add"}, {5, "concat"}}, RunConfig{.run_id = "seed"});

    const RunReport report = bench.engine.run_regression({5}, RunConfig{.run_id = "regress"});
    CHECK(report.records.size() == 2);
    std::vector<std::string> ops;
    for (const auto& rec : report.records) ops.push_back(rec.op_name);
    std::sort(ops.begin(), ops.end());
    CHECK(ops == std::vector<std::string>{"add", "concat"});
  }
}

TEST_SUITE("fault localization") {
  TEST_CASE("a healthy chain reports NO_FAULT") {
    EngineBench bench;
    bench.add_mock(5);
    bench.add_mock(7);
    bench.wire();
    bench.seed_explicit(5, 1);
    bench.seed_explicit(7, 1);

    CompositeSpec spec;
    spec.stages = {{5, "add", {TypedValue::of(1), TypedValue::of(2)}},
                   {7, "add", {TypedValue::of(10)}}};
    const LocalizeOutcome out = bench.engine.localize_fault(spec, RunConfig{});
    CHECK(out.kind == LocalizeKind::NoFault);
    CHECK(out.faulty.empty());
    CHECK(out.iterations == 1);
  }

  TEST_CASE("the faulty service is named exactly, whichever stage it sits at") {
    for (std::int64_t faulty_id : {5, 7, 9}) {
      CAPTURE(faulty_id);
      EngineBench bench;
      MockService* mocks[] = {&bench.add_mock(5), &bench.add_mock(7), &bench.add_mock(9)};
      bench.wire();
      bench.seed_explicit(5, 2);
      bench.seed_explicit(7, 2);
      bench.seed_explicit(9, 2);

      const int index = faulty_id == 5 ? 0 : faulty_id == 7 ? 1 : 2;
      mocks[index]->inject_fault(FaultMode::OffByOne);

      CompositeSpec spec;
      spec.stages = {{5, "add", {TypedValue::of(1), TypedValue::of(2)}},
                     {7, "add", {TypedValue::of(10)}},
                     {9, "add", {TypedValue::of(100)}}};
      const LocalizeOutcome out = bench.engine.localize_fault(spec, RunConfig{});
      CHECK(out.kind == LocalizeKind::Located);
      CHECK(out.faulty == std::vector<std::int64_t>{faulty_id});
    }
  }

  TEST_CASE("a transport-dead stage is implicated without isolation evidence") {
    EngineBench bench;
    bench.add_mock(5);
    MockService& ws7 = bench.add_mock(7);
    bench.wire();
    bench.seed_explicit(5, 1);
    ws7.stop();  // service 7 vanishes from the loopback table

    CompositeSpec spec;
    spec.stages = {{5, "add", {TypedValue::of(1), TypedValue::of(2)}},
                   {7, "add", {TypedValue::of(10)}}};
    const LocalizeOutcome out = bench.engine.localize_fault(spec, RunConfig{});
    CHECK(out.kind == LocalizeKind::Located);
    CHECK(out.faulty == std::vector<std::int64_t>{7});
    CHECK(out.note.find("service 7") != std::string::npos);
  }

  TEST_CASE("a chain that fails while every isolation passes is INCONCLUSIVE") {
    EngineBench bench;
    bench.add_mock(5);
    bench.add_mock(7);
    bench.wire();
    bench.seed_explicit(5, 2);
    bench.seed_explicit(7, 2);

    // Poison only the composite: service 7's oracle is wrong solely for the
    // piped value produced by stage one (1 + 2 = 3), so isolation on stored
    // cases stays green while the chain keeps failing.
    bench.catalog.bind(7, "add", [](const std::vector<TypedValue>& args) {
      const std::int64_t a = args.at(0).as_int();
      const std::int64_t b = args.at(1).as_int();
      return TypedValue::of(a == 3 ? a + b + 1 : a + b);
    });

    CompositeSpec spec;
    spec.stages = {{5, "add", {TypedValue::of(1), TypedValue::of(2)}},
                   {7, "add", {TypedValue::of(10)}}};
    RunConfig config;
    config.max_localization_iterations = 2;
    const LocalizeOutcome out = bench.engine.localize_fault(spec, config);
    CHECK(out.kind == LocalizeKind::Inconclusive);
    CHECK(out.faulty.empty());
    CHECK(out.iterations == 2);
    CHECK(out.note.find("after 2 attempts") != std::string::npos);
    CHECK(out.note.find("every service passed in isolation") != std::string::npos);
  }

  TEST_CASE("localization journals nothing and validates its inputs") {
    EngineBench bench;
    bench.add_mock(5);
    bench.wire();
    bench.seed_explicit(5, 1);
    const auto seq_before = bench.store.last_seq();

    CompositeSpec spec;
    spec.stages = {{5, "add", {TypedValue::of(1), TypedValue::of(2)}}};
    (void)bench.engine.localize_fault(spec, RunConfig{});
    CHECK(bench.store.last_seq() == seq_before);  // pure diagnostic

    CHECK_THROWS_AS((void)bench.engine.localize_fault(CompositeSpec{}, RunConfig{}), Error);
    RunConfig bad;
    bad.max_localization_iterations = 0;
    CHECK_THROWS_AS((void)bench.engine.localize_fault(spec, bad), Error);

    CompositeSpec unknown;
    unknown.stages = {{42, "add", {}}};
    CHECK_THROWS_AS((void)bench.engine.localize_fault(unknown, RunConfig{}), Error);
  }
}
