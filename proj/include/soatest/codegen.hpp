#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soatest/store.hpp"
#include "soatest/types.hpp"

namespace soatest {

/// Pure reference implementation of an operation, used to compute the
/// expected value for a case before it is dispatched. Throwing from an
/// oracle marks affected cases ORACLE_FAILURE; it never aborts a run.
using Oracle = std::function<TypedValue(const std::vector<TypedValue>&)>;

/// In-memory binding of (service_id, op_name) -> Oracle. Bindings are not
/// persisted; processes rebuild the catalog at startup and the journal only
/// records whether a plan had one (PlanMeta::has_oracle).
class OracleCatalog {
 public:
  void bind(std::int64_t service_id, const std::string& op_name, Oracle oracle);
  const Oracle* find(std::int64_t service_id, const std::string& op_name) const;

 private:
  std::map<std::pair<std::int64_t, std::string>, Oracle> oracles_;
};

/// Everything the executor needs to run one operation's cases: the signature
/// to type-check against, and the oracle when one is bound.
struct ClientPlan {
  std::string plan_id;
  std::int64_t service_id = 0;
  OperationSignature signature;
  const Oracle* oracle = nullptr;  // owned by the catalog, not the plan
};

class PlanBuilder {
 public:
  PlanBuilder(Store& store, OracleCatalog& catalog) : store_(store), catalog_(catalog) {}

  /// Validates the oracle's shape against the registered signature by probing
  /// nothing -- binding is name-based; evaluation errors surface per case.
  void register_oracle(std::int64_t service_id, const std::string& op_name, Oracle oracle);

  /// Builds (and journals) a plan for one operation of a registered service.
  /// Throws UnknownService / UnknownOperation.
  ClientPlan build_client_plan(std::int64_t service_id, const std::string& op_name);

  /// Runs the plan's oracle on one argument tuple. Throws OracleAbsent when
  /// the plan has none; arity mismatches and oracle exceptions surface as
  /// OracleFailure so the caller can pin the failure on the plan, not the
  /// service under test.
  TypedValue evaluate_oracle(const ClientPlan& plan, const std::vector<TypedValue>& args) const;

 private:
  Store& store_;
  OracleCatalog& catalog_;
};

/// Reference behaviors shared by oracles and the mock services, so an
/// unfaulted mock always agrees with its oracle:
///   add(a, b)    -> INT, wrapping two's-complement addition
///   concat(a, b) -> STRING concatenation
///   echo(x)      -> x unchanged (any single argument)
TypedValue builtin_add(const std::vector<TypedValue>& args);
TypedValue builtin_concat(const std::vector<TypedValue>& args);
TypedValue builtin_echo(const std::vector<TypedValue>& args);

/// Looks up a builtin by operation name; nullopt for unknown names.
std::optional<Oracle> builtin_oracle_for(const std::string& op_name);

}  // namespace soatest
