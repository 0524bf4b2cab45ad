#pragma once

#include <span>
#include <vector>

#include "soatest/store.hpp"
#include "soatest/types.hpp"

namespace soatest {

/// Hard cap on the BOUNDARY cross-product per operation; truncation is
/// deterministic in lexicographic parameter order.
inline constexpr std::size_t kBoundaryCap = 256;

/// Fixed deterministic boundary list per type:
///   INT    -> 0, 1, -1, INT64_MAX, INT64_MIN
///   FLOAT  -> 0.0, 1.0, -1.0, smallest positive normal, largest finite
///   STRING -> "", "a", 256-char string
///   BOOL   -> false, true
std::vector<TypedValue> boundary_values(ValueType t);

/// Builds PENDING cases for one operation. BOUNDARY takes the (capped)
/// cross-product of the per-parameter boundary lists; RANDOM is a pure
/// function of (descriptor, op, seed, count) with identical output on every
/// platform; EXPLICIT passes the supplied tuples through after a shape check.
std::vector<TestCase> generate_cases(const ServiceDescriptor& descriptor,
                                     std::string_view op_name, const GenStrategy& strategy);

/// Appends the cases to the journal; returns how many were written.
std::size_t persist_cases(Store& store, std::span<const TestCase> cases);

}  // namespace soatest
