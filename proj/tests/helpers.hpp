#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "soatest/types.hpp"

namespace testutil {

/// Fresh directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::mt19937_64 rng(std::random_device{}());
    std::ostringstream name;
    name << "soatest-test-" << std::hex << rng();
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::filesystem::path data_dir() { return std::filesystem::path(SOATEST_TEST_DATA_DIR); }

/// SOAP add(x:INT, y:INT) -> INT on one endpoint, matching the worked example.
inline soatest::ServiceDescriptor add_descriptor(std::int64_t id, soatest::Protocol protocol,
                                                 int port = 400) {
  soatest::ServiceDescriptor d;
  d.service_id = id;
  d.name = "ws" + std::to_string(id);
  d.protocol = protocol;
  d.endpoints = {soatest::Endpoint{"127.0.0.1", port, "/svc"}};
  if (protocol == soatest::Protocol::Soap)
    d.soap_namespace = "urn:soatest:ws" + std::to_string(id);
  soatest::OperationSignature add;
  add.op_name = "add";
  add.params = {soatest::Param{"x", soatest::ValueType::Int},
                soatest::Param{"y", soatest::ValueType::Int}};
  add.return_type = soatest::ValueType::Int;
  d.operations = {add};
  return d;
}

inline soatest::TestCase explicit_case(std::int64_t service_id, const std::string& op,
                                       std::vector<soatest::TypedValue> args,
                                       soatest::TypedValue expected) {
  soatest::TestCase c;
  c.case_id = soatest::fresh_id("case");
  c.service_id = service_id;
  c.op_name = op;
  c.args = std::move(args);
  c.expected_source = soatest::ExpectedSource::Explicit;
  c.explicit_expected = std::move(expected);
  c.status = soatest::CaseStatus::Pending;
  c.created_at = soatest::wall_clock_stamp();
  return c;
}

}  // namespace testutil
