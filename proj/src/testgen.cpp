#include "soatest/testgen.hpp"

#include <limits>
#include <random>

namespace soatest {

namespace {

// Character pool for random strings; includes the XML-special characters so
// generated cases exercise escaping end to end.
constexpr std::string_view kStringPool =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_- <>&\"'";

// Unbiased bounded draw on top of mt19937_64 (the engine is bit-exact across
// platforms; std::uniform_int_distribution is not, so roll the mapping here).
std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = n == 0 ? 0 : (0 - n) % n;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

TypedValue random_value(std::mt19937_64& rng, ValueType t) {
  switch (t) {
    case ValueType::Int: {
      // stay in [-1e6, 1e6] so chained oracle arithmetic cannot overflow
      std::int64_t v = static_cast<std::int64_t>(bounded_u64(rng, 2'000'001)) - 1'000'000;
      return TypedValue::of(v);
    }
    case ValueType::Float: {
      double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
      return TypedValue::of(-1.0e6 + unit * 2.0e6);
    }
    case ValueType::Str: {
      std::size_t len = bounded_u64(rng, 17);
      std::string s;
      s.reserve(len);
      for (std::size_t i = 0; i < len; ++i)
        s.push_back(kStringPool[bounded_u64(rng, kStringPool.size())]);
      return TypedValue::of(std::move(s));
    }
    case ValueType::Bool:
      return TypedValue::of((rng() & 1) == 1);
  }
  throw Error(Errc::BadValue, "corrupt type tag");
}

TestCase make_case(const ServiceDescriptor& d, const OperationSignature& op,
                   std::vector<TypedValue> args) {
  TestCase c;
  c.case_id = fresh_id("case");
  c.service_id = d.service_id;
  c.op_name = op.op_name;
  c.args = std::move(args);
  c.expected_source = ExpectedSource::Oracle;
  c.status = CaseStatus::Pending;
  c.created_at = wall_clock_stamp();
  return c;
}

}  // namespace

std::vector<TypedValue> boundary_values(ValueType t) {
  switch (t) {
    case ValueType::Int:
      return {TypedValue::of(std::int64_t{0}), TypedValue::of(std::int64_t{1}),
              TypedValue::of(std::int64_t{-1}),
              TypedValue::of(std::numeric_limits<std::int64_t>::max()),
              TypedValue::of(std::numeric_limits<std::int64_t>::min())};
    case ValueType::Float:
      return {TypedValue::of(0.0), TypedValue::of(1.0), TypedValue::of(-1.0),
              TypedValue::of(std::numeric_limits<double>::min()),
              TypedValue::of(std::numeric_limits<double>::max())};
    case ValueType::Str:
      return {TypedValue::of(""), TypedValue::of("a"), TypedValue::of(std::string(256, 'x'))};
    case ValueType::Bool:
      return {TypedValue::of(false), TypedValue::of(true)};
  }
  throw Error(Errc::BadValue, "corrupt type tag");
}

std::vector<TestCase> generate_cases(const ServiceDescriptor& descriptor,
                                     std::string_view op_name, const GenStrategy& strategy) {
  const OperationSignature* op = descriptor.find_operation(op_name);
  if (!op)
    throw Error(Errc::UnknownOperation, "service " + std::to_string(descriptor.service_id) +
                                            " has no operation '" + std::string(op_name) + "'");

  std::vector<TestCase> out;

  if (std::holds_alternative<BoundaryStrategy>(strategy)) {
    std::vector<std::vector<TypedValue>> pools;
    pools.reserve(op->params.size());
    std::size_t total = 1;
    for (const auto& p : op->params) {
      pools.push_back(boundary_values(p.type));
      total *= pools.back().size();
      if (total > kBoundaryCap) total = kBoundaryCap;  // saturate; exact count not needed past cap
    }
    std::vector<std::size_t> idx(op->params.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
      std::vector<TypedValue> args;
      args.reserve(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) args.push_back(pools[i][idx[i]]);
      out.push_back(make_case(descriptor, *op, std::move(args)));
      // advance the rightmost index first: lexicographic order over parameters
      for (std::size_t i = idx.size(); i-- > 0;) {
        if (++idx[i] < pools[i].size()) break;
        idx[i] = 0;
      }
    }
  } else if (const auto* rnd = std::get_if<RandomStrategy>(&strategy)) {
    if (rnd->count < 1) throw Error(Errc::BadValue, "RANDOM count must be >= 1");
    std::mt19937_64 rng(rnd->seed);
    for (std::size_t n = 0; n < rnd->count; ++n) {
      std::vector<TypedValue> args;
      args.reserve(op->params.size());
      for (const auto& p : op->params) args.push_back(random_value(rng, p.type));
      out.push_back(make_case(descriptor, *op, std::move(args)));
    }
  } else {
    const auto& tuples = std::get<ExplicitStrategy>(strategy).tuples;
    for (std::size_t n = 0; n < tuples.size(); ++n) {
      const auto& tuple = tuples[n];
      if (tuple.size() != op->params.size())
        throw Error(Errc::ArityMismatch,
                    "tuple " + std::to_string(n) + " has " + std::to_string(tuple.size()) +
                        " args, operation '" + op->op_name + "' takes " +
                        std::to_string(op->params.size()));
      for (std::size_t i = 0; i < tuple.size(); ++i)
        if (tuple[i].type() != op->params[i].type)
          throw Error(Errc::ArityMismatch,
                      "tuple " + std::to_string(n) + " arg " + std::to_string(i) + " is " +
                          value_type_name(tuple[i].type()) + ", parameter '" +
                          op->params[i].name + "' wants " + value_type_name(op->params[i].type));
      out.push_back(make_case(descriptor, *op, tuple));
    }
  }

  return out;
}

std::size_t persist_cases(Store& store, std::span<const TestCase> cases) {
  for (const auto& c : cases) store.append_case(c);
  return cases.size();
}

}  // namespace soatest
