#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "soatest/json_codec.hpp"
#include "soatest/types.hpp"

namespace soatest {

enum class RecordType { Service, Case, Plan, Result, Run, Baseline };

const char* record_type_name(RecordType t) noexcept;

struct PlanMeta {
  std::string plan_id;
  std::int64_t service_id = 0;
  std::string op_name;
  bool has_oracle = false;

  bool operator==(const PlanMeta&) const = default;
};

struct ResultRecord {
  std::string case_id;
  std::string run_id;
  Verdict verdict;
  std::optional<TypedValue> expected;
  std::optional<TypedValue> actual;
  std::string detail;  // error class or fault text when a side is missing
  std::int64_t latency_ms = 0;
  int agent_id = -1;
  std::string server;

  bool operator==(const ResultRecord&) const = default;
};

struct RunRecord {
  std::string run_id;
  nlohmann::json config;       // run configuration snapshot
  std::int64_t duration_ms = -1;  // -1 until the run completes
};

struct BaselineRecord {
  std::string case_id;
  TypedValue value;
};

void to_json(nlohmann::json& j, const PlanMeta& p);
void from_json(const nlohmann::json& j, PlanMeta& p);
void to_json(nlohmann::json& j, const ResultRecord& r);
void from_json(const nlohmann::json& j, ResultRecord& r);
void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);
void to_json(nlohmann::json& j, const BaselineRecord& b);
void from_json(const nlohmann::json& j, BaselineRecord& b);

/// What Store::open found in an existing journal.
struct LoadReport {
  bool corrupt = false;
  std::uint64_t last_valid_seq = 0;
  std::size_t records_loaded = 0;
  std::size_t unknown_skipped = 0;
  std::string warning;
};

/// Append-only journal plus the state folded from it. One JSON record per
/// line; state reconstruction is a fold over records in sequence order, with
/// later records for the same key superseding earlier ones.
///
/// Writes are serialized (single writer); reads take a shared lock and copy
/// out, so they are safely concurrent with appends.
class Store {
 public:
  explicit Store(std::filesystem::path journal_path);

  const std::filesystem::path& path() const { return path_; }
  const LoadReport& load_report() const { return load_report_; }

  std::uint64_t append_service(const ServiceDescriptor& d);
  /// Atomic register: throws DuplicateId under the writer lock.
  std::uint64_t append_service_unique(const ServiceDescriptor& d);
  std::uint64_t append_case(const TestCase& c);
  std::uint64_t append_plan(const PlanMeta& p);
  std::uint64_t append_result(const ResultRecord& r);
  std::uint64_t append_run(const RunRecord& r);
  std::uint64_t append_baseline(const BaselineRecord& b);

  std::uint64_t last_seq() const;

  std::optional<ServiceDescriptor> service(std::int64_t service_id) const;
  std::vector<ServiceDescriptor> services() const;  // ascending service_id

  std::optional<TestCase> find_case(const std::string& case_id) const;
  std::vector<TestCase> cases_for(std::int64_t service_id) const;  // creation order

  /// The regression selection rule: cases whose latest status is SUCCESSFUL
  /// and whose service_id matches, in case creation order.
  std::vector<TestCase> successful_cases_for(std::int64_t service_id) const;

  std::vector<PlanMeta> plans_for(std::int64_t service_id) const;
  std::optional<TypedValue> baseline_for(const std::string& case_id) const;

  std::vector<ResultRecord> results_for_run(const std::string& run_id) const;
  std::optional<RunRecord> run(const std::string& run_id) const;
  std::vector<std::string> run_ids() const;

 private:
  std::uint64_t append(RecordType type, const nlohmann::json& payload);
  std::uint64_t append_unlocked(RecordType type, const nlohmann::json& payload);
  void fold(RecordType type, const nlohmann::json& payload);

  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::ofstream out_;
  std::uint64_t seq_ = 0;
  LoadReport load_report_;

  // folded state
  std::map<std::int64_t, ServiceDescriptor> services_;
  std::unordered_map<std::string, TestCase> cases_;
  std::vector<std::string> case_order_;
  std::map<std::string, PlanMeta> plans_;
  std::vector<ResultRecord> results_;
  std::map<std::string, RunRecord> runs_;
  std::vector<std::string> run_order_;
  std::unordered_map<std::string, TypedValue> baselines_;
};

}  // namespace soatest
