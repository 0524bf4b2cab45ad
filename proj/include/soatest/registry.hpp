#pragma once

#include <cstdint>
#include <vector>

#include "soatest/store.hpp"
#include "soatest/types.hpp"

namespace soatest {

/// Local catalogue of services under test, persisted through the store.
/// Service ids are caller-assigned and unique.
class Registry {
 public:
  explicit Registry(Store& store) : store_(store) {}

  /// Validates the descriptor, rejects duplicate ids, persists, returns the id.
  std::int64_t register_service(const ServiceDescriptor& descriptor);

  ServiceDescriptor lookup_service(std::int64_t service_id) const;  // UnknownService

  std::vector<ServiceDescriptor> list_services() const;  // ascending service_id

  /// Throws InvalidDescriptor naming the violated invariant.
  static void validate(const ServiceDescriptor& descriptor);

  Store& store() const { return store_; }

 private:
  Store& store_;
};

}  // namespace soatest
