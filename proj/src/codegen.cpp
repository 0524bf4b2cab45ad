#include "soatest/codegen.hpp"

#include <cstdint>

namespace soatest {

void OracleCatalog::bind(std::int64_t service_id, const std::string& op_name, Oracle oracle) {
  oracles_[{service_id, op_name}] = std::move(oracle);
}

const Oracle* OracleCatalog::find(std::int64_t service_id, const std::string& op_name) const {
  auto it = oracles_.find({service_id, op_name});
  return it == oracles_.end() ? nullptr : &it->second;
}

void PlanBuilder::register_oracle(std::int64_t service_id, const std::string& op_name,
                                  Oracle oracle) {
  if (!oracle) throw Error(Errc::OracleAbsent, "cannot bind an empty oracle");
  const auto descriptor = store_.service(service_id);
  if (!descriptor)
    throw Error(Errc::UnknownService, "no service with id " + std::to_string(service_id));
  if (!descriptor->find_operation(op_name))
    throw Error(Errc::UnknownOperation, "service " + std::to_string(service_id) +
                                            " has no operation '" + op_name + "'");
  catalog_.bind(service_id, op_name, std::move(oracle));
}

ClientPlan PlanBuilder::build_client_plan(std::int64_t service_id, const std::string& op_name) {
  const auto descriptor = store_.service(service_id);
  if (!descriptor)
    throw Error(Errc::UnknownService, "no service with id " + std::to_string(service_id));
  const OperationSignature* op = descriptor->find_operation(op_name);
  if (!op)
    throw Error(Errc::UnknownOperation, "service " + std::to_string(service_id) +
                                            " has no operation '" + op_name + "'");

  ClientPlan plan;
  plan.plan_id = fresh_id("plan");
  plan.service_id = service_id;
  plan.signature = *op;
  plan.oracle = catalog_.find(service_id, op_name);

  PlanMeta meta;
  meta.plan_id = plan.plan_id;
  meta.service_id = service_id;
  meta.op_name = op_name;
  meta.has_oracle = plan.oracle != nullptr;
  store_.append_plan(meta);

  return plan;
}

TypedValue PlanBuilder::evaluate_oracle(const ClientPlan& plan,
                                        const std::vector<TypedValue>& args) const {
  if (!plan.oracle)
    throw Error(Errc::OracleAbsent,
                "plan " + plan.plan_id + " has no oracle for '" + plan.signature.op_name + "'");
  if (args.size() != plan.signature.params.size())
    throw Error(Errc::OracleFailure, "oracle for '" + plan.signature.op_name + "' got " +
                                         std::to_string(args.size()) + " args, wants " +
                                         std::to_string(plan.signature.params.size()));
  try {
    return (*plan.oracle)(args);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::OracleFailure,
                "oracle for '" + plan.signature.op_name + "' threw: " + e.what());
  }
}

TypedValue builtin_add(const std::vector<TypedValue>& args) {
  if (args.size() != 2) throw Error(Errc::OracleFailure, "add wants 2 args");
  // wrapping two's-complement add, defined for every input pair
  const auto a = static_cast<std::uint64_t>(args[0].as_int());
  const auto b = static_cast<std::uint64_t>(args[1].as_int());
  return TypedValue::of(static_cast<std::int64_t>(a + b));
}

TypedValue builtin_concat(const std::vector<TypedValue>& args) {
  if (args.size() != 2) throw Error(Errc::OracleFailure, "concat wants 2 args");
  return TypedValue::of(args[0].as_str() + args[1].as_str());
}

TypedValue builtin_echo(const std::vector<TypedValue>& args) {
  if (args.size() != 1) throw Error(Errc::OracleFailure, "echo wants 1 arg");
  return args[0];
}

std::optional<Oracle> builtin_oracle_for(const std::string& op_name) {
  if (op_name == "add") return Oracle(builtin_add);
  if (op_name == "concat") return Oracle(builtin_concat);
  if (op_name == "echo") return Oracle(builtin_echo);
  return std::nullopt;
}

}  // namespace soatest
