#pragma once

#include <json.hpp>

#include "soatest/types.hpp"

namespace soatest {

// nlohmann ADL hooks for the domain types that cross the journal and the
// descriptor/fleet configuration files.

void to_json(nlohmann::json& j, const TypedValue& v);
void from_json(const nlohmann::json& j, TypedValue& v);

void to_json(nlohmann::json& j, const Endpoint& e);
void from_json(const nlohmann::json& j, Endpoint& e);

void to_json(nlohmann::json& j, const Param& p);
void from_json(const nlohmann::json& j, Param& p);

void to_json(nlohmann::json& j, const OperationSignature& op);
void from_json(const nlohmann::json& j, OperationSignature& op);

void to_json(nlohmann::json& j, const ServiceDescriptor& d);
void from_json(const nlohmann::json& j, ServiceDescriptor& d);

void to_json(nlohmann::json& j, const TestCase& c);
void from_json(const nlohmann::json& j, TestCase& c);

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

}  // namespace soatest
