#include <doctest.h>

#include <fstream>
#include <optional>

#include "helpers.hpp"
#include "soatest/store.hpp"

using namespace soatest;

namespace {

ResultRecord result_for(const std::string& case_id, const std::string& run_id, bool pass) {
  ResultRecord r;
  r.case_id = case_id;
  r.run_id = run_id;
  r.verdict = pass ? Verdict::pass() : Verdict::fail(FailReason::Mismatch);
  r.expected = TypedValue::of(30);
  r.actual = pass ? TypedValue::of(30) : TypedValue::of(31);
  r.detail = pass ? "" : "expected 30, got 31";
  r.latency_ms = 7;
  r.agent_id = 2;
  r.server = "127.0.0.1:400";
  return r;
}

std::string journal_text(const std::filesystem::path& p) { return testutil::read_file(p); }

}  // namespace

TEST_SUITE("journal store") {
  TEST_CASE("a fresh store is empty and not corrupt") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    CHECK(store.last_seq() == 0);
    CHECK_FALSE(store.load_report().corrupt);
    CHECK(store.services().empty());
    CHECK(store.run_ids().empty());
  }

  TEST_CASE("sequence numbers increase strictly across record types") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    const auto d = testutil::add_descriptor(5, Protocol::Soap);
    CHECK(store.append_service(d) == 1);
    CHECK(store.append_case(testutil::explicit_case(5, "add", {TypedValue::of(1),
                                                               TypedValue::of(2)},
                                                    TypedValue::of(3))) == 2);
    CHECK(store.append_run(RunRecord{"r1", nlohmann::json::object(), -1}) == 3);
    CHECK(store.last_seq() == 3);
  }

  TEST_CASE("duplicate service ids are rejected atomically") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    const auto d = testutil::add_descriptor(5, Protocol::Soap);
    store.append_service_unique(d);
    try {
      store.append_service_unique(d);
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DuplicateId);
    }
    // plain append_service supersedes instead
    auto renamed = d;
    renamed.name = "renamed";
    store.append_service(renamed);
    CHECK(store.service(5)->name == "renamed");
    CHECK(store.services().size() == 1);
  }

  TEST_CASE("services come back ascending by id") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    store.append_service(testutil::add_descriptor(9, Protocol::Soap));
    store.append_service(testutil::add_descriptor(2, Protocol::Rest));
    store.append_service(testutil::add_descriptor(5, Protocol::Loopback));
    const auto all = store.services();
    REQUIRE(all.size() == 3);
    CHECK(all[0].service_id == 2);
    CHECK(all[1].service_id == 5);
    CHECK(all[2].service_id == 9);
  }

  TEST_CASE("cases keep creation order and later appends supersede by id") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    auto c1 = testutil::explicit_case(5, "add", {TypedValue::of(1), TypedValue::of(2)},
                                      TypedValue::of(3));
    auto c2 = testutil::explicit_case(5, "add", {TypedValue::of(3), TypedValue::of(4)},
                                      TypedValue::of(7));
    store.append_case(c1);
    store.append_case(c2);
    c1.status = CaseStatus::Successful;
    store.append_case(c1);  // supersedes, must not reorder

    const auto cases = store.cases_for(5);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].case_id == c1.case_id);
    CHECK(cases[0].status == CaseStatus::Successful);
    CHECK(cases[1].case_id == c2.case_id);
    CHECK(store.find_case(c2.case_id).has_value());
    CHECK_FALSE(store.find_case("no-such-case").has_value());
    CHECK(store.cases_for(6).empty());
  }

  TEST_CASE("results flip the owning case's status; selection follows the latest verdict") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    auto c1 = testutil::explicit_case(5, "add", {TypedValue::of(1), TypedValue::of(2)},
                                      TypedValue::of(3));
    auto c2 = testutil::explicit_case(5, "add", {TypedValue::of(3), TypedValue::of(4)},
                                      TypedValue::of(7));
    auto c3 = testutil::explicit_case(7, "add", {TypedValue::of(5), TypedValue::of(6)},
                                      TypedValue::of(11));
    store.append_case(c1);
    store.append_case(c2);
    store.append_case(c3);

    store.append_result(result_for(c1.case_id, "r1", true));
    store.append_result(result_for(c2.case_id, "r1", false));
    store.append_result(result_for(c3.case_id, "r1", true));

    auto selected = store.successful_cases_for(5);
    REQUIRE(selected.size() == 1);
    CHECK(selected[0].case_id == c1.case_id);
    CHECK(store.find_case(c2.case_id)->status == CaseStatus::Unsuccessful);

    // the newest verdict wins
    store.append_result(result_for(c1.case_id, "r2", false));
    CHECK(store.successful_cases_for(5).empty());
    store.append_result(result_for(c2.case_id, "r2", true));
    selected = store.successful_cases_for(5);
    REQUIRE(selected.size() == 1);
    CHECK(selected[0].case_id == c2.case_id);
  }

  TEST_CASE("runs, results, plans, and baselines are queryable") {
    testutil::TempDir dir;
    Store store(dir.file("j.jsonl"));
    store.append_run(RunRecord{"r1", nlohmann::json{{"parallelism", 4}}, -1});
    store.append_run(RunRecord{"r1", nlohmann::json{{"parallelism", 4}}, 120});  // completion
    store.append_run(RunRecord{"r2", nlohmann::json::object(), 50});

    REQUIRE(store.run("r1").has_value());
    CHECK(store.run("r1")->duration_ms == 120);
    CHECK(store.run("r1")->config.at("parallelism") == 4);
    CHECK_FALSE(store.run("zzz").has_value());
    CHECK(store.run_ids() == std::vector<std::string>{"r1", "r2"});

    store.append_result(result_for("c1", "r1", true));
    store.append_result(result_for("c2", "r2", false));
    CHECK(store.results_for_run("r1").size() == 1);
    CHECK(store.results_for_run("r2").at(0).detail == "expected 30, got 31");
    CHECK(store.results_for_run("r3").empty());

    store.append_plan(PlanMeta{"p1", 5, "add", true});
    store.append_plan(PlanMeta{"p2", 6, "echo", false});
    REQUIRE(store.plans_for(5).size() == 1);
    CHECK(store.plans_for(5)[0] == PlanMeta{"p1", 5, "add", true});

    store.append_baseline(BaselineRecord{"c1", TypedValue::of(30)});
    store.append_baseline(BaselineRecord{"c1", TypedValue::of(31)});  // latest wins
    REQUIRE(store.baseline_for("c1").has_value());
    CHECK(*store.baseline_for("c1") == TypedValue::of(31));
    CHECK_FALSE(store.baseline_for("c9").has_value());
  }

  TEST_CASE("reopening the journal reproduces the folded state field-for-field") {
    testutil::TempDir dir;
    const std::string path = dir.file("j.jsonl");
    std::string c1_id, c2_id;
    {
      Store store(path);
      store.append_service(testutil::add_descriptor(5, Protocol::Soap));
      store.append_service(testutil::add_descriptor(7, Protocol::Rest));
      auto c1 = testutil::explicit_case(5, "add", {TypedValue::of(10), TypedValue::of(20)},
                                        TypedValue::of(30));
      auto c2 = testutil::explicit_case(7, "add", {TypedValue::of(0.5),
                                                   TypedValue::of("x")},
                                        TypedValue::of(true));
      c1_id = c1.case_id;
      c2_id = c2.case_id;
      store.append_case(c1);
      store.append_case(c2);
      store.append_plan(PlanMeta{"p1", 5, "add", true});
      store.append_run(RunRecord{"r1", nlohmann::json{{"parallelism", 2}}, 99});
      store.append_result(result_for(c1_id, "r1", true));
      store.append_baseline(BaselineRecord{c2_id, TypedValue::of("base")});
    }

    Store reopened(path);
    CHECK_FALSE(reopened.load_report().corrupt);
    CHECK(reopened.load_report().records_loaded == 8);
    CHECK(reopened.last_seq() == 8);

    REQUIRE(reopened.services().size() == 2);
    CHECK(reopened.service(5)->soap_namespace == "urn:soatest:ws5");
    CHECK(reopened.service(7)->protocol == Protocol::Rest);

    const auto c1 = reopened.find_case(c1_id);
    REQUIRE(c1.has_value());
    CHECK(c1->args == std::vector<TypedValue>{TypedValue::of(10), TypedValue::of(20)});
    CHECK(c1->explicit_expected == TypedValue::of(30));
    CHECK(c1->status == CaseStatus::Successful);  // re-derived from the result record
    const auto c2 = reopened.find_case(c2_id);
    REQUIRE(c2.has_value());
    CHECK(c2->args == std::vector<TypedValue>{TypedValue::of(0.5),
                                              TypedValue::of("x")});
    CHECK(c2->status == CaseStatus::Pending);

    CHECK(reopened.plans_for(5) == std::vector<PlanMeta>{PlanMeta{"p1", 5, "add", true}});
    REQUIRE(reopened.run("r1").has_value());
    CHECK(reopened.run("r1")->duration_ms == 99);
    const auto results = reopened.results_for_run("r1");
    REQUIRE(results.size() == 1);
    CHECK(results[0] == result_for(c1_id, "r1", true));
    CHECK(*reopened.baseline_for(c2_id) == TypedValue::of("base"));

    // appending continues the sequence rather than restarting it
    CHECK(reopened.append_run(RunRecord{"r2", nlohmann::json::object(), 1}) == 9);
  }

  TEST_CASE("a truncated final line loads the valid prefix with a warning") {
    testutil::TempDir dir;
    const std::string path = dir.file("j.jsonl");
    {
      Store store(path);
      store.append_service(testutil::add_descriptor(5, Protocol::Soap));
      store.append_case(testutil::explicit_case(5, "add", {TypedValue::of(1),
                                                           TypedValue::of(2)},
                                                TypedValue::of(3)));
    }
    std::string text = journal_text(path);
    REQUIRE_FALSE(text.empty());
    const auto first_line_end = text.find('\n');
    REQUIRE(first_line_end != std::string::npos);
    REQUIRE(text.size() > first_line_end + 21);  // the second record is longer than the cut
    // keep record 1 whole and tear record 2 mid-write
    std::ofstream(path, std::ios::binary | std::ios::trunc)
        << text.substr(0, first_line_end + 21);

    Store recovered(path);
    const auto& report = recovered.load_report();
    CHECK(report.corrupt);
    CHECK(report.warning.rfind("corrupt journal:", 0) == 0);
    CHECK(report.last_valid_seq == 1);
    CHECK(report.records_loaded == 1);
    CHECK(recovered.services().size() == 1);
    CHECK(recovered.cases_for(5).empty());

    // appends after recovery land on a clean line and survive the next replay
    recovered.append_run(RunRecord{"r1", nlohmann::json::object(), 5});
    Store third(path);
    CHECK_FALSE(third.load_report().corrupt);
    CHECK(third.services().size() == 1);
    REQUIRE(third.run("r1").has_value());
    CHECK(third.run("r1")->duration_ms == 5);
  }

  TEST_CASE("unknown record types are skipped, counted, and preserved on reload") {
    testutil::TempDir dir;
    const std::string path = dir.file("j.jsonl");
    {
      Store store(path);
      store.append_service(testutil::add_descriptor(5, Protocol::Soap));
    }
    {
      std::ofstream out(path, std::ios::binary | std::ios::app);
      out << R"({"seq":2,"type":"ANNOTATION","at":"x","payload":{"note":"future record"}})"
          << "\n";
    }
    Store store(path);
    CHECK_FALSE(store.load_report().corrupt);
    CHECK(store.load_report().unknown_skipped == 1);
    CHECK(store.load_report().records_loaded == 1);
    CHECK(store.services().size() == 1);
    CHECK(store.last_seq() == 2);  // the foreign record still advances the sequence
  }

  TEST_CASE("blank lines in the journal are harmless") {
    testutil::TempDir dir;
    const std::string path = dir.file("j.jsonl");
    {
      Store store(path);
      store.append_service(testutil::add_descriptor(5, Protocol::Soap));
    }
    {
      std::ofstream out(path, std::ios::binary | std::ios::app);
      out << "\n\n";
    }
    {
      Store store(path);
      CHECK_FALSE(store.load_report().corrupt);
      store.append_run(RunRecord{"r1", nlohmann::json::object(), 1});
    }
    Store store(path);
    CHECK_FALSE(store.load_report().corrupt);
    CHECK(store.run("r1").has_value());
  }
}
