#include "soatest/json_codec.hpp"

namespace soatest {

using nlohmann::json;

void to_json(json& j, const TypedValue& v) {
  j = json{{"type", value_type_name(v.type())}, {"text", value_to_text(v)}};
}

void from_json(const json& j, TypedValue& v) {
  v = value_from_text(value_type_from_name(j.at("type").get<std::string>()),
                      j.at("text").get<std::string>());
}

void to_json(json& j, const Endpoint& e) { j = e.to_string(); }

void from_json(const json& j, Endpoint& e) { e = Endpoint::parse(j.get<std::string>()); }

void to_json(json& j, const Param& p) {
  j = json{{"name", p.name}, {"type", value_type_name(p.type)}};
}

void from_json(const json& j, Param& p) {
  p.name = j.at("name").get<std::string>();
  p.type = value_type_from_name(j.at("type").get<std::string>());
}

void to_json(json& j, const OperationSignature& op) {
  j = json{{"name", op.op_name}, {"params", op.params},
           {"returns", value_type_name(op.return_type)}};
}

void from_json(const json& j, OperationSignature& op) {
  op.op_name = j.at("name").get<std::string>();
  op.params = j.value("params", std::vector<Param>{});
  op.return_type = value_type_from_name(j.at("returns").get<std::string>());
}

void to_json(json& j, const ServiceDescriptor& d) {
  j = json{{"service_id", d.service_id}, {"name", d.name},
           {"protocol", protocol_name(d.protocol)}, {"endpoints", d.endpoints},
           {"operations", d.operations}};
  if (!d.soap_namespace.empty()) j["soap_namespace"] = d.soap_namespace;
}

void from_json(const json& j, ServiceDescriptor& d) {
  d.service_id = j.at("service_id").get<std::int64_t>();
  d.name = j.value("name", "");
  d.protocol = protocol_from_name(j.at("protocol").get<std::string>());
  d.endpoints = j.at("endpoints").get<std::vector<Endpoint>>();
  d.soap_namespace = j.value("soap_namespace", "");
  d.operations = j.value("operations", std::vector<OperationSignature>{});
}

void to_json(json& j, const TestCase& c) {
  j = json{{"case_id", c.case_id},
           {"service_id", c.service_id},
           {"op", c.op_name},
           {"args", c.args},
           {"expected_source", expected_source_name(c.expected_source)},
           {"status", case_status_name(c.status)},
           {"created_at", c.created_at}};
  if (c.explicit_expected) j["explicit_expected"] = *c.explicit_expected;
}

void from_json(const json& j, TestCase& c) {
  c.case_id = j.at("case_id").get<std::string>();
  c.service_id = j.at("service_id").get<std::int64_t>();
  c.op_name = j.at("op").get<std::string>();
  c.args = j.value("args", std::vector<TypedValue>{});
  c.expected_source = expected_source_from_name(j.at("expected_source").get<std::string>());
  c.status = case_status_from_name(j.at("status").get<std::string>());
  c.created_at = j.value("created_at", "");
  if (j.contains("explicit_expected"))
    c.explicit_expected = j.at("explicit_expected").get<TypedValue>();
  else
    c.explicit_expected.reset();
}

void to_json(json& j, const Verdict& v) {
  j = json{{"successful", v.successful}};
  if (v.reason) j["reason"] = fail_reason_name(*v.reason);
}

void from_json(const json& j, Verdict& v) {
  v.successful = j.at("successful").get<bool>();
  if (j.contains("reason"))
    v.reason = fail_reason_from_name(j.at("reason").get<std::string>());
  else
    v.reason.reset();
}

}  // namespace soatest
