#include "soatest/middleware.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "soatest/xml.hpp"

namespace soatest {

namespace {

constexpr std::string_view kSoapEnvelopeNs = "http://www.w3.org/2001/12/soap-envelope";
constexpr std::string_view kSoapEncodingNs = "http://www.w3.org/2001/12/soap-encoding";

std::string trimmed(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::int64_t parse_service_id(const std::string& raw, Errc err) {
  const std::string t = trimmed(raw);
  std::int64_t id = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), id);
  if (ec != std::errc() || p != t.data() + t.size())
    throw Error(err, "WS-ID is not an integer: '" + t + "'");
  return id;
}

[[noreturn]] void malformed(Errc err, const std::string& what) {
  throw Error(err, what);
}

const xml::Node& expect_child(const xml::Node& parent, std::size_t i, std::string_view local,
                              Errc err) {
  if (i >= parent.children.size())
    malformed(err, "missing <" + std::string(local) + "> element");
  const xml::Node& n = parent.children[i];
  if (n.local_name() != local)
    malformed(err, "expected <" + std::string(local) + ">, found <" + n.name + ">");
  return n;
}

}  // namespace

TestRequest make_request(const TestCase& c, std::string timestamp) {
  TestRequest r;
  r.service_id = c.service_id;
  r.op_name = c.op_name;
  r.params.reserve(c.args.size());
  for (const auto& v : c.args) r.params.push_back(value_to_text(v));
  r.timestamp = std::move(timestamp);
  return r;
}

std::string encode_request(const TestRequest& r) {
  std::ostringstream os;
  os << "<request>\n";
  os << "  <WS-ID>" << r.service_id << "</WS-ID>\n";
  os << "  <function-to-call>" << xml::escape_text(r.op_name) << "</function-to-call>\n";
  if (r.params.empty()) {
    os << "  <parameters/>\n";
  } else {
    os << "  <parameters>\n";
    for (const auto& p : r.params) os << "    <param>" << xml::escape_text(p) << "</param>\n";
    os << "  </parameters>\n";
  }
  os << "  <timestamp>" << xml::escape_text(r.timestamp) << "</timestamp>\n";
  os << "</request>\n";
  return os.str();
}

TestRequest decode_request(const std::string& xml_text) {
  xml::Node root;
  try {
    root = xml::parse(xml_text);
  } catch (const xml::ParseError& e) {
    malformed(Errc::MalformedRequest, e.what());
  }
  if (root.local_name() != "request")
    malformed(Errc::MalformedRequest, "root element is <" + root.name + ">, wanted <request>");
  if (root.children.size() != 4)
    malformed(Errc::MalformedRequest, "<request> wants exactly 4 children, found " +
                                          std::to_string(root.children.size()));

  const auto& id_el = expect_child(root, 0, "WS-ID", Errc::MalformedRequest);
  const auto& fn_el = expect_child(root, 1, "function-to-call", Errc::MalformedRequest);
  const auto& params_el = expect_child(root, 2, "parameters", Errc::MalformedRequest);
  const auto& ts_el = expect_child(root, 3, "timestamp", Errc::MalformedRequest);

  TestRequest r;
  r.service_id = parse_service_id(id_el.text, Errc::MalformedRequest);
  r.op_name = trimmed(fn_el.text);
  if (r.op_name.empty()) malformed(Errc::MalformedRequest, "<function-to-call> is empty");
  for (const auto& p : params_el.children) {
    if (p.local_name() != "param")
      malformed(Errc::MalformedRequest, "<parameters> may only contain <param>, found <" +
                                            p.name + ">");
    if (!p.children.empty())
      malformed(Errc::MalformedRequest, "<param> must be a text element");
    r.params.push_back(p.text);  // exact text: values round-trip byte for byte
  }
  r.timestamp = trimmed(ts_el.text);
  if (r.timestamp.empty()) malformed(Errc::MalformedRequest, "<timestamp> is empty");
  return r;
}

std::string encode_response(const TestResponse& r) {
  std::ostringstream os;
  os << "<response>\n";
  os << "  <WS-ID>" << r.service_id << "</WS-ID>\n";
  os << "  <status>" << (r.ok ? "ok" : "fault") << "</status>\n";
  if (r.ok)
    os << "  <value>" << xml::escape_text(r.value) << "</value>\n";
  else
    os << "  <fault>" << xml::escape_text(r.fault) << "</fault>\n";
  os << "  <timestamp>" << xml::escape_text(r.timestamp) << "</timestamp>\n";
  os << "</response>\n";
  return os.str();
}

TestResponse decode_response(const std::string& xml_text) {
  xml::Node root;
  try {
    root = xml::parse(xml_text);
  } catch (const xml::ParseError& e) {
    malformed(Errc::MalformedResponse, e.what());
  }
  if (root.local_name() != "response")
    malformed(Errc::MalformedResponse, "root element is <" + root.name + ">, wanted <response>");
  if (root.children.size() != 4)
    malformed(Errc::MalformedResponse, "<response> wants exactly 4 children, found " +
                                           std::to_string(root.children.size()));

  const auto& id_el = expect_child(root, 0, "WS-ID", Errc::MalformedResponse);
  const auto& status_el = expect_child(root, 1, "status", Errc::MalformedResponse);
  const auto& ts_el = expect_child(root, 3, "timestamp", Errc::MalformedResponse);

  TestResponse r;
  r.service_id = parse_service_id(id_el.text, Errc::MalformedResponse);
  const std::string status = trimmed(status_el.text);
  if (status == "ok") {
    r.ok = true;
    const auto& v = expect_child(root, 2, "value", Errc::MalformedResponse);
    r.value = v.text;
  } else if (status == "fault") {
    r.ok = false;
    const auto& f = expect_child(root, 2, "fault", Errc::MalformedResponse);
    r.fault = f.text;
  } else {
    malformed(Errc::MalformedResponse, "<status> must be 'ok' or 'fault', found '" + status + "'");
  }
  r.timestamp = trimmed(ts_el.text);
  if (r.timestamp.empty()) malformed(Errc::MalformedResponse, "<timestamp> is empty");
  return r;
}

std::string soap_request_body(const std::string& op_name, const std::string& soap_namespace,
                              const std::vector<std::string>& param_names,
                              const std::vector<std::string>& param_values) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n";
  os << "<soap:Envelope xmlns:soap=\"" << kSoapEnvelopeNs << "\" soap:encodingStyle=\""
     << kSoapEncodingNs << "\">\n";
  os << "  <soap:Body>\n";
  os << "    <m:" << op_name << " xmlns:m=\"" << xml::escape_text(soap_namespace) << "\">\n";
  for (std::size_t i = 0; i < param_names.size(); ++i)
    os << "      <m:" << param_names[i] << ">" << xml::escape_text(param_values[i]) << "</m:"
       << param_names[i] << ">\n";
  os << "    </m:" << op_name << ">\n";
  os << "  </soap:Body>\n";
  os << "</soap:Envelope>\n";
  return os.str();
}

std::string soap_response_body(const std::string& op_name, const std::string& soap_namespace,
                               const std::string& result_text) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n";
  os << "<soap:Envelope xmlns:soap=\"" << kSoapEnvelopeNs << "\" soap:encodingStyle=\""
     << kSoapEncodingNs << "\">\n";
  os << "  <soap:Body>\n";
  os << "    <m:" << op_name << "Response xmlns:m=\"" << xml::escape_text(soap_namespace)
     << "\">\n";
  os << "      <m:result>" << xml::escape_text(result_text) << "</m:result>\n";
  os << "    </m:" << op_name << "Response>\n";
  os << "  </soap:Body>\n";
  os << "</soap:Envelope>\n";
  return os.str();
}

std::string soap_fault_body(const std::string& fault_text) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n";
  os << "<soap:Envelope xmlns:soap=\"" << kSoapEnvelopeNs << "\" soap:encodingStyle=\""
     << kSoapEncodingNs << "\">\n";
  os << "  <soap:Body>\n";
  os << "    <soap:Fault>\n";
  os << "      <faultcode>soap:Server</faultcode>\n";
  os << "      <faultstring>" << xml::escape_text(fault_text) << "</faultstring>\n";
  os << "    </soap:Fault>\n";
  os << "  </soap:Body>\n";
  os << "</soap:Envelope>\n";
  return os.str();
}

WireMessage to_protocol(const TestRequest& r, const ServiceDescriptor& d) {
  const OperationSignature* op = d.find_operation(r.op_name);
  if (!op)
    throw Error(Errc::UnknownOperation, "service " + std::to_string(d.service_id) +
                                            " has no operation '" + r.op_name + "'");
  if (r.params.size() != op->params.size())
    throw Error(Errc::ArityMismatch, "request for '" + r.op_name + "' carries " +
                                         std::to_string(r.params.size()) + " params, signature " +
                                         "wants " + std::to_string(op->params.size()));

  const std::string base_path = d.endpoints.front().path;

  WireMessage w;
  w.protocol = d.protocol;
  switch (d.protocol) {
    case Protocol::Soap: {
      std::vector<std::string> names;
      names.reserve(op->params.size());
      for (const auto& p : op->params) names.push_back(p.name);
      w.path = base_path;
      w.content_type = "text/xml";
      w.body = soap_request_body(r.op_name, d.soap_namespace, names, r.params);
      break;
    }
    case Protocol::Rest: {
      std::string path = base_path;
      while (path.size() > 1 && path.back() == '/') path.pop_back();
      if (path == "/") path.clear();
      w.path = path + "/" + r.op_name;
      w.content_type = "application/json";
      nlohmann::ordered_json body = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < op->params.size(); ++i) body[op->params[i].name] = r.params[i];
      w.body = body.dump();
      break;
    }
    case Protocol::Loopback: {
      w.path = base_path;
      w.content_type = "application/xml";
      w.body = encode_request(r);
      break;
    }
  }
  return w;
}

TestResponse from_protocol(const ServiceDescriptor& d, const WireMessage& wire) {
  TestResponse r;
  r.service_id = d.service_id;
  r.timestamp = wall_clock_stamp();

  switch (d.protocol) {
    case Protocol::Soap: {
      xml::Node root;
      try {
        root = xml::parse(wire.body);
      } catch (const xml::ParseError& e) {
        malformed(Errc::MalformedResponse, std::string("envelope: ") + e.what());
      }
      if (root.local_name() != "Envelope")
        malformed(Errc::MalformedResponse,
                  "root element is <" + root.name + ">, wanted an envelope");
      const xml::Node* body = root.child("Body");
      if (!body) malformed(Errc::MalformedResponse, "envelope has no body");
      if (body->children.empty()) malformed(Errc::MalformedResponse, "envelope body is empty");
      const xml::Node& payload = body->children.front();
      if (payload.local_name() == "Fault") {
        r.ok = false;
        const xml::Node* fs = payload.child("faultstring");
        r.fault = fs ? trimmed(fs->text) : "unspecified fault";
        return r;
      }
      const xml::Node* result = payload.child("result");
      if (!result) {
        if (payload.children.size() == 1)
          result = &payload.children.front();
        else
          malformed(Errc::MalformedResponse,
                    "response element <" + payload.name + "> carries no result");
      }
      if (!result->children.empty())
        malformed(Errc::MalformedResponse, "result must be a text element");
      r.ok = true;
      r.value = result->text;
      return r;
    }
    case Protocol::Rest: {
      if (wire.http_status == 200) {
        nlohmann::json body = nlohmann::json::parse(wire.body, nullptr, false);
        if (body.is_discarded())
          malformed(Errc::MalformedResponse, "response body is not JSON");
        if (!body.is_object() || !body.contains("result") || !body["result"].is_string())
          malformed(Errc::MalformedResponse, "response JSON lacks a string 'result' field");
        r.ok = true;
        r.value = body["result"].get<std::string>();
        return r;
      }
      r.ok = false;
      nlohmann::json body = nlohmann::json::parse(wire.body, nullptr, false);
      if (!body.is_discarded() && body.is_object() && body.contains("error") &&
          body["error"].is_string())
        r.fault = body["error"].get<std::string>();
      else
        r.fault = "HTTP " + std::to_string(wire.http_status) +
                  (wire.body.empty() ? "" : ": " + wire.body);
      return r;
    }
    case Protocol::Loopback: {
      TestResponse inner = decode_response(wire.body);
      if (inner.service_id != d.service_id)
        malformed(Errc::MalformedResponse,
                  "response WS-ID " + std::to_string(inner.service_id) + " does not match " +
                      std::to_string(d.service_id));
      return inner;
    }
  }
  throw Error(Errc::UnsupportedProtocol, "corrupt protocol tag");
}

ServiceDescriptor route(const TestRequest& r, const Registry& registry) {
  return registry.lookup_service(r.service_id);
}

}  // namespace soatest
