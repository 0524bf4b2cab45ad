#include "soatest/registry.hpp"

#include <cctype>
#include <set>

namespace soatest {

namespace {

bool valid_host(const std::string& host) {
  if (host.empty()) return false;
  for (char c : host) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

void Registry::validate(const ServiceDescriptor& d) {
  auto reject = [](const std::string& why) { throw Error(Errc::InvalidDescriptor, why); };

  if (d.service_id <= 0) reject("service_id must be a positive integer");
  if (d.name.empty()) reject("name must be non-empty");
  if (d.endpoints.empty()) reject("endpoints must be non-empty");
  for (const auto& ep : d.endpoints) {
    if (!valid_host(ep.host)) reject("endpoint host invalid: '" + ep.host + "'");
    if (ep.port < 1 || ep.port > 65535)
      reject("endpoint port out of range: " + std::to_string(ep.port));
    if (ep.path.empty() || ep.path.front() != '/')
      reject("endpoint path must start with '/': '" + ep.path + "'");
  }
  if (d.protocol == Protocol::Soap && d.soap_namespace.empty())
    reject("SOAP service needs a non-empty soap_namespace");

  std::set<std::string> op_names;
  for (const auto& op : d.operations) {
    if (op.op_name.empty()) reject("operation name must be non-empty");
    if (!op_names.insert(op.op_name).second)
      reject("duplicate operation name '" + op.op_name + "'");
    std::set<std::string> param_names;
    for (const auto& p : op.params) {
      if (p.name.empty()) reject("parameter name must be non-empty in '" + op.op_name + "'");
      if (!param_names.insert(p.name).second)
        reject("duplicate parameter name '" + p.name + "' in '" + op.op_name + "'");
    }
  }
}

std::int64_t Registry::register_service(const ServiceDescriptor& descriptor) {
  validate(descriptor);
  store_.append_service_unique(descriptor);
  return descriptor.service_id;
}

ServiceDescriptor Registry::lookup_service(std::int64_t service_id) const {
  auto d = store_.service(service_id);
  if (!d) throw Error(Errc::UnknownService, "no service with id " + std::to_string(service_id));
  return *d;
}

std::vector<ServiceDescriptor> Registry::list_services() const { return store_.services(); }

}  // namespace soatest
