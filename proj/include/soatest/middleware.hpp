#pragma once

#include <string>
#include <vector>

#include "soatest/registry.hpp"
#include "soatest/types.hpp"

namespace soatest {

/// Canonical protocol-neutral test request: service id, operation, parameter
/// values as text (already rendered with value_to_text), and a wall-clock
/// stamp. Every case turns into one of these before any protocol is chosen.
struct TestRequest {
  std::int64_t service_id = 0;
  std::string op_name;
  std::vector<std::string> params;
  std::string timestamp;

  bool operator==(const TestRequest&) const = default;
};

/// Canonical protocol-neutral test response. ok == true carries a value,
/// ok == false carries fault text.
struct TestResponse {
  std::int64_t service_id = 0;
  bool ok = true;
  std::string value;  // when ok
  std::string fault;  // when !ok
  std::string timestamp;

  bool operator==(const TestResponse&) const = default;
};

/// One protocol-specific HTTP message. `path` is the URL path the POST goes
/// to; `http_status` is only meaningful on responses (0 = not applicable).
struct WireMessage {
  Protocol protocol = Protocol::Loopback;
  std::string path;
  std::string content_type;
  std::string body;
  int http_status = 0;
};

TestRequest make_request(const TestCase& c, std::string timestamp);

/// Canonical XML codec. encode_* is byte-stable (2-space indent, single
/// trailing newline); decode_* enforces the grammar strictly and throws
/// MalformedRequest / MalformedResponse naming what was wrong.
std::string encode_request(const TestRequest& r);
TestRequest decode_request(const std::string& xml_text);
std::string encode_response(const TestResponse& r);
TestResponse decode_response(const std::string& xml_text);

/// Converts a canonical request into the wire form the descriptor's protocol
/// wants:
///   SOAP     -> POST endpoint.path, text/xml, 1.2-style envelope with the
///               operation element bound to the descriptor's namespace and
///               one child per parameter in signature order
///   REST     -> POST endpoint.path + "/" + op, application/json, body
///               {"<param>": "<text>", ...} in signature order
///   LOOPBACK -> POST endpoint.path, application/xml, canonical request XML
/// Throws ArityMismatch when params don't line up with the signature and
/// UnknownOperation when the descriptor lacks the operation.
WireMessage to_protocol(const TestRequest& r, const ServiceDescriptor& d);

/// Converts a protocol-specific HTTP response back into canonical form.
/// Malformed payloads throw MalformedResponse; protocol-level faults (SOAP
/// Fault, REST non-200) come back as ok == false, not exceptions.
TestResponse from_protocol(const ServiceDescriptor& d, const WireMessage& wire);

/// Descriptor lookup for a canonical request (throws UnknownService).
ServiceDescriptor route(const TestRequest& r, const Registry& registry);

/// Envelope builders shared with the mock services, so that what the fleet
/// sends is exactly what the converter expects.
std::string soap_request_body(const std::string& op_name, const std::string& soap_namespace,
                              const std::vector<std::string>& param_names,
                              const std::vector<std::string>& param_values);
std::string soap_response_body(const std::string& op_name, const std::string& soap_namespace,
                               const std::string& result_text);
std::string soap_fault_body(const std::string& fault_text);

}  // namespace soatest
