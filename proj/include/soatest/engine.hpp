#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "soatest/agents.hpp"
#include "soatest/codegen.hpp"
#include "soatest/executor.hpp"
#include "soatest/monitor.hpp"
#include "soatest/registry.hpp"

namespace soatest {

struct RunTarget {
  std::int64_t service_id = 0;
  std::string op_name;
};

struct RunConfig {
  std::string run_id;  // generated when empty
  int parallelism = 4;
  std::chrono::milliseconds acquire_timeout{5000};
  int max_localization_iterations = 3;
};

struct RunReport {
  RunSummary summary;
  std::vector<std::string> warnings;
  std::vector<ExecutionRecord> records;  // execution order
};

/// One stage of a composite (piped) invocation. The first stage runs on
/// extra_args alone; each later stage receives the previous stage's actual
/// value as its first argument, followed by its own extra_args.
struct CompositeStage {
  std::int64_t service_id = 0;
  std::string op_name;
  std::vector<TypedValue> extra_args;
};

struct CompositeSpec {
  std::vector<CompositeStage> stages;
};

enum class LocalizeKind { NoFault, Located, Inconclusive };

struct LocalizeOutcome {
  LocalizeKind kind = LocalizeKind::Inconclusive;
  std::vector<std::int64_t> faulty;  // ascending, deduplicated
  int iterations = 0;
  std::string note;
};

/// Orchestrates whole runs on top of the lower layers. Full and regression
/// runs are journaled (RUN record up front, superseded with the duration when
/// done); fault localization is a pure diagnostic and journals nothing.
class Engine {
 public:
  Engine(Registry& registry, OracleCatalog& catalog, AgentPool& pool, Store& store)
      : registry_(registry),
        store_(store),
        pool_(pool),
        catalog_(catalog),
        plans_(store, catalog),
        executor_(plans_, pool, store),
        monitor_(store) {}

  /// Runs every stored case of every target. Throws NoCases when a target
  /// has none (and when `targets` itself is empty), UnknownService /
  /// UnknownOperation for bad targets.
  RunReport run_full(const std::vector<RunTarget>& targets, const RunConfig& config);

  /// Re-runs exactly the previously SUCCESSFUL cases of the modified
  /// services. An empty selection is not an error: the report carries a
  /// warning and an empty summary.
  RunReport run_regression(const std::vector<std::int64_t>& modified_service_ids,
                           const RunConfig& config);

  /// Pinpoints misbehaving services in a composite invocation: run the whole
  /// chain; on failure, exercise each participating service in isolation on
  /// its stored cases; repeat up to max_localization_iterations when the
  /// evidence conflicts (chain fails, every isolation passes).
  LocalizeOutcome localize_fault(const CompositeSpec& spec, const RunConfig& config);

  PlanBuilder& plans() { return plans_; }
  Monitor& monitor() { return monitor_; }

 private:
  struct ChainProbe {
    bool passed = false;
    std::vector<std::int64_t> suspects;  // services implicated by this probe
    std::string note;
  };

  RunReport execute_groups(const std::vector<RunTarget>& groups,
                           const std::vector<std::vector<TestCase>>& cases_per_group,
                           const RunConfig& config, std::vector<std::string> warnings);
  ChainProbe probe_chain(const CompositeSpec& spec, const std::vector<ClientPlan>& stage_plans,
                         const RunConfig& config);

  ClientPlan quiet_plan(std::int64_t service_id, const std::string& op_name) const;

  Registry& registry_;
  Store& store_;
  AgentPool& pool_;
  OracleCatalog& catalog_;
  PlanBuilder plans_;
  Executor executor_;
  Monitor monitor_;
};

}  // namespace soatest
