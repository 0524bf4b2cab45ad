#include "soatest/store.hpp"

#include <algorithm>

namespace soatest {

using nlohmann::json;

const char* record_type_name(RecordType t) noexcept {
  switch (t) {
    case RecordType::Service: return "SERVICE";
    case RecordType::Case: return "CASE";
    case RecordType::Plan: return "PLAN";
    case RecordType::Result: return "RESULT";
    case RecordType::Run: return "RUN";
    case RecordType::Baseline: return "BASELINE";
  }
  return "UNKNOWN";
}

namespace {

std::optional<RecordType> record_type_from_name(std::string_view name) {
  if (name == "SERVICE") return RecordType::Service;
  if (name == "CASE") return RecordType::Case;
  if (name == "PLAN") return RecordType::Plan;
  if (name == "RESULT") return RecordType::Result;
  if (name == "RUN") return RecordType::Run;
  if (name == "BASELINE") return RecordType::Baseline;
  return std::nullopt;
}

}  // namespace

void to_json(json& j, const PlanMeta& p) {
  j = json{{"plan_id", p.plan_id}, {"service_id", p.service_id}, {"op", p.op_name},
           {"has_oracle", p.has_oracle}};
}

void from_json(const json& j, PlanMeta& p) {
  p.plan_id = j.at("plan_id").get<std::string>();
  p.service_id = j.at("service_id").get<std::int64_t>();
  p.op_name = j.at("op").get<std::string>();
  p.has_oracle = j.value("has_oracle", false);
}

void to_json(json& j, const ResultRecord& r) {
  j = json{{"case_id", r.case_id}, {"run_id", r.run_id}, {"verdict", r.verdict},
           {"latency_ms", r.latency_ms}, {"agent_id", r.agent_id}, {"server", r.server}};
  if (r.expected) j["expected"] = *r.expected;
  if (r.actual) j["actual"] = *r.actual;
  if (!r.detail.empty()) j["detail"] = r.detail;
}

void from_json(const json& j, ResultRecord& r) {
  r.case_id = j.at("case_id").get<std::string>();
  r.run_id = j.at("run_id").get<std::string>();
  r.verdict = j.at("verdict").get<Verdict>();
  r.latency_ms = j.value("latency_ms", std::int64_t{0});
  r.agent_id = j.value("agent_id", -1);
  r.server = j.value("server", "");
  if (j.contains("expected")) r.expected = j.at("expected").get<TypedValue>();
  else r.expected.reset();
  if (j.contains("actual")) r.actual = j.at("actual").get<TypedValue>();
  else r.actual.reset();
  r.detail = j.value("detail", "");
}

void to_json(json& j, const RunRecord& r) {
  j = json{{"run_id", r.run_id}, {"config", r.config}, {"duration_ms", r.duration_ms}};
}

void from_json(const json& j, RunRecord& r) {
  r.run_id = j.at("run_id").get<std::string>();
  r.config = j.value("config", json::object());
  r.duration_ms = j.value("duration_ms", std::int64_t{-1});
}

void to_json(json& j, const BaselineRecord& b) {
  j = json{{"case_id", b.case_id}, {"value", b.value}};
}

void from_json(const json& j, BaselineRecord& b) {
  b.case_id = j.at("case_id").get<std::string>();
  b.value = j.at("value").get<TypedValue>();
}

Store::Store(std::filesystem::path journal_path) : path_(std::move(journal_path)) {
  // Replay whatever is already in the file; a missing file is an empty store.
  std::ifstream in(path_, std::ios::binary);
  if (in) {
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t offset = 0;    // byte offset of the line being read
    std::uint64_t good_end = 0;  // one past the last line that replayed cleanly
    while (std::getline(in, line)) {
      ++line_no;
      const std::uint64_t line_bytes = line.size() + (in.eof() ? 0 : 1);
      if (line.empty()) {
        offset += line_bytes;
        good_end = offset;
        continue;
      }
      json rec;
      std::uint64_t seq = 0;
      std::string type_name;
      try {
        rec = json::parse(line);
        seq = rec.at("seq").get<std::uint64_t>();
        type_name = rec.at("type").get<std::string>();
        auto type = record_type_from_name(type_name);
        if (type) {
          fold(*type, rec.at("payload"));
          ++load_report_.records_loaded;
        } else {
          ++load_report_.unknown_skipped;
        }
      } catch (const std::exception& e) {
        load_report_.corrupt = true;
        load_report_.warning = "corrupt journal: line " + std::to_string(line_no) +
                               " unreadable after sequence " + std::to_string(seq_) +
                               "; loaded the valid prefix and discarded the rest (" + e.what() +
                               ")";
        break;
      }
      seq_ = std::max(seq_, seq);
      offset += line_bytes;
      good_end = offset;
    }
    load_report_.last_valid_seq = seq_;
    in.close();
    // A torn tail (half-written final line, or garbage after it) would sit in
    // front of every future append and make them unreadable on the next
    // replay, so recovery drops it; the fold keeps only the valid prefix
    // either way.
    if (load_report_.corrupt) {
      std::error_code ec;
      std::filesystem::resize_file(path_, good_end, ec);
      if (ec)
        throw Error(Errc::StoreUnavailable,
                    "cannot drop corrupt journal tail: " + path_.string() + " (" + ec.message() +
                        ")");
    }
  }

  out_.open(path_, std::ios::app);
  if (!out_)
    throw Error(Errc::StoreUnavailable, "cannot open journal for append: " + path_.string());
}

std::uint64_t Store::append_unlocked(RecordType type, const json& payload) {
  if (!out_) throw Error(Errc::StoreUnavailable, "journal closed: " + path_.string());
  std::uint64_t seq = ++seq_;
  json rec{{"seq", seq},
           {"type", record_type_name(type)},
           {"at", wall_clock_stamp()},
           {"payload", payload}};
  out_ << rec.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(Errc::StoreUnavailable, "journal write failed: " + path_.string());
  fold(type, payload);
  return seq;
}

std::uint64_t Store::append(RecordType type, const json& payload) {
  std::unique_lock lock(mu_);
  return append_unlocked(type, payload);
}

void Store::fold(RecordType type, const json& payload) {
  switch (type) {
    case RecordType::Service: {
      auto d = payload.get<ServiceDescriptor>();
      services_[d.service_id] = std::move(d);
      break;
    }
    case RecordType::Case: {
      auto c = payload.get<TestCase>();
      if (!cases_.contains(c.case_id)) case_order_.push_back(c.case_id);
      cases_[c.case_id] = std::move(c);
      break;
    }
    case RecordType::Plan: {
      auto p = payload.get<PlanMeta>();
      plans_[p.plan_id] = std::move(p);
      break;
    }
    case RecordType::Result: {
      auto r = payload.get<ResultRecord>();
      if (auto it = cases_.find(r.case_id); it != cases_.end())
        it->second.status = r.verdict.successful ? CaseStatus::Successful
                                                 : CaseStatus::Unsuccessful;
      results_.push_back(std::move(r));
      break;
    }
    case RecordType::Run: {
      auto r = payload.get<RunRecord>();
      if (!runs_.contains(r.run_id)) run_order_.push_back(r.run_id);
      runs_[r.run_id] = std::move(r);
      break;
    }
    case RecordType::Baseline: {
      auto b = payload.get<BaselineRecord>();
      baselines_[b.case_id] = std::move(b.value);
      break;
    }
  }
}

std::uint64_t Store::append_service(const ServiceDescriptor& d) {
  return append(RecordType::Service, d);
}

std::uint64_t Store::append_service_unique(const ServiceDescriptor& d) {
  std::unique_lock lock(mu_);
  if (services_.contains(d.service_id))
    throw Error(Errc::DuplicateId,
                "service id " + std::to_string(d.service_id) + " already registered");
  return append_unlocked(RecordType::Service, d);
}
std::uint64_t Store::append_case(const TestCase& c) { return append(RecordType::Case, c); }
std::uint64_t Store::append_plan(const PlanMeta& p) { return append(RecordType::Plan, p); }
std::uint64_t Store::append_result(const ResultRecord& r) { return append(RecordType::Result, r); }
std::uint64_t Store::append_run(const RunRecord& r) { return append(RecordType::Run, r); }
std::uint64_t Store::append_baseline(const BaselineRecord& b) {
  return append(RecordType::Baseline, b);
}

std::uint64_t Store::last_seq() const {
  std::shared_lock lock(mu_);
  return seq_;
}

std::optional<ServiceDescriptor> Store::service(std::int64_t service_id) const {
  std::shared_lock lock(mu_);
  auto it = services_.find(service_id);
  if (it == services_.end()) return std::nullopt;
  return it->second;
}

std::vector<ServiceDescriptor> Store::services() const {
  std::shared_lock lock(mu_);
  std::vector<ServiceDescriptor> out;
  out.reserve(services_.size());
  for (const auto& [id, d] : services_) out.push_back(d);
  return out;
}

std::optional<TestCase> Store::find_case(const std::string& case_id) const {
  std::shared_lock lock(mu_);
  auto it = cases_.find(case_id);
  if (it == cases_.end()) return std::nullopt;
  return it->second;
}

std::vector<TestCase> Store::cases_for(std::int64_t service_id) const {
  std::shared_lock lock(mu_);
  std::vector<TestCase> out;
  for (const auto& id : case_order_) {
    const auto& c = cases_.at(id);
    if (c.service_id == service_id) out.push_back(c);
  }
  return out;
}

std::vector<TestCase> Store::successful_cases_for(std::int64_t service_id) const {
  std::shared_lock lock(mu_);
  std::vector<TestCase> out;
  for (const auto& id : case_order_) {
    const auto& c = cases_.at(id);
    if (c.service_id == service_id && c.status == CaseStatus::Successful) out.push_back(c);
  }
  return out;
}

std::vector<PlanMeta> Store::plans_for(std::int64_t service_id) const {
  std::shared_lock lock(mu_);
  std::vector<PlanMeta> out;
  for (const auto& [id, p] : plans_)
    if (p.service_id == service_id) out.push_back(p);
  return out;
}

std::optional<TypedValue> Store::baseline_for(const std::string& case_id) const {
  std::shared_lock lock(mu_);
  auto it = baselines_.find(case_id);
  if (it == baselines_.end()) return std::nullopt;
  return it->second;
}

std::vector<ResultRecord> Store::results_for_run(const std::string& run_id) const {
  std::shared_lock lock(mu_);
  std::vector<ResultRecord> out;
  for (const auto& r : results_)
    if (r.run_id == run_id) out.push_back(r);
  return out;
}

std::optional<RunRecord> Store::run(const std::string& run_id) const {
  std::shared_lock lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Store::run_ids() const {
  std::shared_lock lock(mu_);
  return run_order_;
}

}  // namespace soatest
