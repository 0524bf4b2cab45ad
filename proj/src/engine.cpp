#include "soatest/engine.hpp"

#include <algorithm>
#include <set>

namespace soatest {

namespace {

using Clock = std::chrono::steady_clock;

nlohmann::json config_snapshot(const RunConfig& config, const std::vector<RunTarget>& targets) {
  nlohmann::json targets_json = nlohmann::json::array();
  for (const auto& t : targets) targets_json.push_back({{"service_id", t.service_id},
                                                        {"op", t.op_name}});
  return {{"parallelism", config.parallelism},
          {"acquire_timeout_ms", config.acquire_timeout.count()},
          {"targets", std::move(targets_json)}};
}

/// Splits one service's cases into per-operation groups, first-seen order.
std::pair<std::vector<RunTarget>, std::vector<std::vector<TestCase>>> group_by_op(
    std::int64_t service_id, const std::vector<TestCase>& cases) {
  std::vector<RunTarget> groups;
  std::vector<std::vector<TestCase>> grouped;
  for (const auto& c : cases) {
    std::size_t g = 0;
    for (; g < groups.size(); ++g)
      if (groups[g].op_name == c.op_name) break;
    if (g == groups.size()) {
      groups.push_back({service_id, c.op_name});
      grouped.emplace_back();
    }
    grouped[g].push_back(c);
  }
  return {std::move(groups), std::move(grouped)};
}

}  // namespace

RunReport Engine::execute_groups(const std::vector<RunTarget>& groups,
                                 const std::vector<std::vector<TestCase>>& cases_per_group,
                                 const RunConfig& config, std::vector<std::string> warnings) {
  const std::string run_id = config.run_id.empty() ? fresh_id("run") : config.run_id;
  if (store_.run(run_id))
    throw Error(Errc::DuplicateId, "run '" + run_id + "' was already journaled");

  store_.append_run(RunRecord{run_id, config_snapshot(config, groups), -1});
  const auto started = Clock::now();

  RunReport report;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ClientPlan plan = plans_.build_client_plan(groups[g].service_id, groups[g].op_name);
    std::vector<ExecutionRecord> records =
        executor_.execute_suite(plan, cases_per_group[g], config.parallelism,
                                config.acquire_timeout);
    for (auto& rec : records) {
      monitor_.mark_result(run_id, rec);
      report.records.push_back(std::move(rec));
    }
  }

  const auto duration =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  store_.append_run(RunRecord{run_id, config_snapshot(config, groups), duration.count()});

  report.summary = monitor_.summarize(run_id);
  report.warnings = std::move(warnings);
  return report;
}

RunReport Engine::run_full(const std::vector<RunTarget>& targets, const RunConfig& config) {
  if (targets.empty()) throw Error(Errc::NoCases, "run has no targets");

  std::vector<RunTarget> groups;
  std::vector<std::vector<TestCase>> cases_per_group;
  for (const auto& t : targets) {
    const ServiceDescriptor d = registry_.lookup_service(t.service_id);
    if (!d.find_operation(t.op_name))
      throw Error(Errc::UnknownOperation, "service " + std::to_string(t.service_id) +
                                              " has no operation '" + t.op_name + "'");
    std::vector<TestCase> selected;
    for (auto& c : store_.cases_for(t.service_id))
      if (c.op_name == t.op_name) selected.push_back(std::move(c));
    if (selected.empty())
      throw Error(Errc::NoCases, "no stored cases for service " + std::to_string(t.service_id) +
                                     " operation '" + t.op_name + "'");
    groups.push_back(t);
    cases_per_group.push_back(std::move(selected));
  }

  return execute_groups(groups, cases_per_group, config, {});
}

RunReport Engine::run_regression(const std::vector<std::int64_t>& modified_service_ids,
                                 const RunConfig& config) {
  if (modified_service_ids.empty())
    throw Error(Errc::BadValue, "regression needs at least one modified service id");

  std::vector<std::int64_t> ids;
  for (auto id : modified_service_ids)
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);

  std::vector<RunTarget> groups;
  std::vector<std::vector<TestCase>> cases_per_group;
  std::vector<std::string> warnings;
  for (auto id : ids) {
    registry_.lookup_service(id);  // UnknownService for ids never registered
    auto [svc_groups, svc_cases] = group_by_op(id, store_.successful_cases_for(id));
    for (std::size_t g = 0; g < svc_groups.size(); ++g) {
      groups.push_back(std::move(svc_groups[g]));
      cases_per_group.push_back(std::move(svc_cases[g]));
    }
  }

  if (groups.empty())
    warnings.push_back("regression selection is empty: the modified services have no previously "
                       "SUCCESSFUL cases");

  return execute_groups(groups, cases_per_group, config, std::move(warnings));
}

ClientPlan Engine::quiet_plan(std::int64_t service_id, const std::string& op_name) const {
  const ServiceDescriptor d = registry_.lookup_service(service_id);
  const OperationSignature* op = d.find_operation(op_name);
  if (!op)
    throw Error(Errc::UnknownOperation, "service " + std::to_string(service_id) +
                                            " has no operation '" + op_name + "'");
  ClientPlan plan;
  plan.plan_id = fresh_id("probe");
  plan.service_id = service_id;
  plan.signature = *op;
  plan.oracle = catalog_.find(service_id, op_name);
  return plan;
}

Engine::ChainProbe Engine::probe_chain(const CompositeSpec& spec,
                                       const std::vector<ClientPlan>& stage_plans,
                                       const RunConfig& config) {
  ChainProbe probe;

  // Expected value: pipe the oracles the same way the services are piped.
  TypedValue expected;
  for (std::size_t k = 0; k < spec.stages.size(); ++k) {
    std::vector<TypedValue> args;
    if (k > 0) args.push_back(expected);
    args.insert(args.end(), spec.stages[k].extra_args.begin(), spec.stages[k].extra_args.end());
    expected = plans_.evaluate_oracle(stage_plans[k], args);  // throws when an oracle is missing
  }

  // Actual value: pipe the services.
  TypedValue actual;
  for (std::size_t k = 0; k < spec.stages.size(); ++k) {
    const CompositeStage& stage = spec.stages[k];
    std::vector<TypedValue> args;
    if (k > 0) args.push_back(actual);
    args.insert(args.end(), stage.extra_args.begin(), stage.extra_args.end());

    TestRequest req;
    req.service_id = stage.service_id;
    req.op_name = stage.op_name;
    for (const auto& v : args) req.params.push_back(value_to_text(v));
    req.timestamp = wall_clock_stamp();

    AgentHandle agent = pool_.acquire(config.acquire_timeout);
    DispatchResult sent = pool_.dispatch(agent, req);
    if (sent.error) {
      probe.suspects = {stage.service_id};
      probe.note = "stage " + std::to_string(k) + " (service " +
                   std::to_string(stage.service_id) + ") failed in transit: " + sent.error_detail;
      return probe;
    }
    if (!sent.response->ok) {
      probe.suspects = {stage.service_id};
      probe.note = "stage " + std::to_string(k) + " (service " +
                   std::to_string(stage.service_id) + ") answered a fault: " +
                   sent.response->fault;
      return probe;
    }
    try {
      actual = value_from_text(stage_plans[k].signature.return_type, sent.response->value);
    } catch (const Error&) {
      probe.suspects = {stage.service_id};
      probe.note = "stage " + std::to_string(k) + " (service " +
                   std::to_string(stage.service_id) + ") returned unreadable value '" +
                   sent.response->value + "'";
      return probe;
    }
  }

  if (Monitor::values_match(expected, actual)) {
    probe.passed = true;
    return probe;
  }
  probe.note = "chain produced " + value_to_text(actual) + ", oracles expected " +
               value_to_text(expected);
  return probe;
}

LocalizeOutcome Engine::localize_fault(const CompositeSpec& spec, const RunConfig& config) {
  if (spec.stages.empty()) throw Error(Errc::BadValue, "composite has no stages");
  if (config.max_localization_iterations < 1)
    throw Error(Errc::BadValue, "max_localization_iterations must be >= 1");

  std::vector<ClientPlan> stage_plans;
  stage_plans.reserve(spec.stages.size());
  for (const auto& stage : spec.stages)
    stage_plans.push_back(quiet_plan(stage.service_id, stage.op_name));

  std::set<std::int64_t> participating;
  for (const auto& stage : spec.stages) participating.insert(stage.service_id);

  LocalizeOutcome out;
  for (int iter = 1; iter <= config.max_localization_iterations; ++iter) {
    out.iterations = iter;
    ChainProbe probe = probe_chain(spec, stage_plans, config);
    if (probe.passed) {
      out.kind = LocalizeKind::NoFault;
      out.faulty.clear();
      return out;
    }

    // The chain misbehaved: a stage that died in transit already named its
    // service; beyond that, exercise every participating service alone on
    // its stored cases and see which ones fail on their own.
    std::set<std::int64_t> faulty(probe.suspects.begin(), probe.suspects.end());
    std::string note = probe.note;
    for (auto sid : participating) {
      const std::vector<TestCase> cases = store_.cases_for(sid);
      if (cases.empty()) {
        note += "; service " + std::to_string(sid) + " has no stored cases to isolate with";
        continue;
      }
      auto [groups, grouped] = group_by_op(sid, cases);
      for (std::size_t g = 0; g < groups.size() && !faulty.count(sid); ++g) {
        ClientPlan plan = quiet_plan(sid, groups[g].op_name);
        for (auto& rec : executor_.execute_suite(plan, grouped[g], config.parallelism,
                                                 config.acquire_timeout)) {
          const Verdict v = Monitor::judge(rec);
          // Oracle trouble indicts the plan, not the service under test.
          if (!v.successful && v.reason != FailReason::OracleFailure) {
            faulty.insert(sid);
            break;
          }
        }
      }
    }

    if (!faulty.empty()) {
      out.kind = LocalizeKind::Located;
      out.faulty.assign(faulty.begin(), faulty.end());
      out.note = note;
      return out;
    }
    out.note = note + "; every service passed in isolation";
  }

  out.kind = LocalizeKind::Inconclusive;
  out.faulty.clear();
  out.note += " (after " + std::to_string(out.iterations) + " attempts)";
  return out;
}

}  // namespace soatest
