#include "soatest/mockfleet.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "soatest/adapters.hpp"
#include "soatest/codegen.hpp"
#include "soatest/middleware.hpp"
#include "soatest/xml.hpp"

namespace soatest {

const char* fault_mode_name(FaultMode m) noexcept {
  switch (m) {
    case FaultMode::None: return "NONE";
    case FaultMode::OffByOne: return "OFF_BY_ONE";
    case FaultMode::SoapFault: return "SOAP_FAULT";
    case FaultMode::Delay: return "DELAY";
    case FaultMode::DropConnection: return "DROP_CONNECTION";
    case FaultMode::MalformedBody: return "MALFORMED_BODY";
  }
  return "?";
}

FaultMode fault_mode_from_name(std::string_view name) {
  if (name == "NONE") return FaultMode::None;
  if (name == "OFF_BY_ONE") return FaultMode::OffByOne;
  if (name == "SOAP_FAULT") return FaultMode::SoapFault;
  if (name == "DELAY") return FaultMode::Delay;
  if (name == "DROP_CONNECTION") return FaultMode::DropConnection;
  if (name == "MALFORMED_BODY") return FaultMode::MalformedBody;
  throw Error(Errc::BadValue, "unknown fault mode '" + std::string(name) + "'");
}

struct MockService::Listener {
  Endpoint endpoint;
  httplib::Server server;
  std::thread thread;
};

MockService::MockService(MockServiceConfig config)
    : config_(std::move(config)),
      fault_(config_.initial_fault),
      delay_ms_(config_.delay.count()) {}

MockService::~MockService() { stop(); }

namespace {

TypedValue off_by_one(const TypedValue& v) {
  switch (v.type()) {
    case ValueType::Int:
      return TypedValue::of(
          static_cast<std::int64_t>(static_cast<std::uint64_t>(v.as_int()) + 1));
    case ValueType::Float:
      return TypedValue::of(v.as_float() + 1.0);
    case ValueType::Str:
      return TypedValue::of(v.as_str() + "1");
    case ValueType::Bool:
      return TypedValue::of(!v.as_bool());
  }
  return v;
}

}  // namespace

std::string MockService::compute(const OperationSignature& op,
                                 const std::vector<std::string>& texts) {
  if (texts.size() != op.params.size())
    throw Error(Errc::ArityMismatch, "operation '" + op.op_name + "' takes " +
                                         std::to_string(op.params.size()) + " parameters, got " +
                                         std::to_string(texts.size()));
  std::vector<TypedValue> args;
  args.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i)
    args.push_back(value_from_text(op.params[i].type, texts[i]));

  const auto behavior = builtin_oracle_for(op.op_name);
  if (!behavior)
    throw Error(Errc::UnknownOperation, "no behavior for operation '" + op.op_name + "'");
  TypedValue result = (*behavior)(args);
  if (fault_.load() == FaultMode::OffByOne) result = off_by_one(result);
  return value_to_text(result);
}

MockService::Reply MockService::protocol_fault(const std::string& text) {
  Reply r;
  switch (config_.descriptor.protocol) {
    case Protocol::Soap:
      r.status = 500;
      r.content_type = "text/xml";
      r.body = soap_fault_body(text);
      break;
    case Protocol::Rest:
      r.status = 500;
      r.content_type = "application/json";
      r.body = nlohmann::json{{"error", text}}.dump();
      break;
    case Protocol::Loopback: {
      TestResponse resp;
      resp.service_id = config_.descriptor.service_id;
      resp.ok = false;
      resp.fault = text;
      resp.timestamp = wall_clock_stamp();
      r.content_type = "application/xml";
      r.body = encode_response(resp);
      break;
    }
  }
  return r;
}

MockService::Reply MockService::serve_soap(const std::string& body) {
  xml::Node root;
  try {
    root = xml::parse(body);
  } catch (const xml::ParseError& e) {
    return protocol_fault(std::string("unreadable envelope: ") + e.what());
  }
  if (root.local_name() != "Envelope") return protocol_fault("expected an envelope");
  const xml::Node* envelope_body = root.child("Body");
  if (!envelope_body || envelope_body->children.empty())
    return protocol_fault("envelope has no body");
  const xml::Node& call = envelope_body->children.front();
  const std::string op_name(call.local_name());

  const OperationSignature* op = config_.descriptor.find_operation(op_name);
  if (!op) return protocol_fault("unknown operation '" + op_name + "'");

  std::vector<std::string> texts;
  texts.reserve(call.children.size());
  for (const auto& child : call.children) texts.push_back(child.text);

  std::string result;
  try {
    result = compute(*op, texts);
  } catch (const Error& e) {
    return protocol_fault(e.what());
  }

  Reply r;
  r.content_type = "text/xml";
  r.body = soap_response_body(op_name, config_.descriptor.soap_namespace, result);
  return r;
}

MockService::Reply MockService::serve_rest(const std::string& path, const std::string& body) {
  const auto slash = path.find_last_of('/');
  const std::string op_name = slash == std::string::npos ? path : path.substr(slash + 1);
  const OperationSignature* op = config_.descriptor.find_operation(op_name);
  if (!op) {
    Reply r = protocol_fault("unknown operation '" + op_name + "'");
    r.status = 404;
    return r;
  }

  nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    return protocol_fault("request body is not a JSON object");

  std::vector<std::string> texts;
  for (const auto& p : op->params) {
    if (!parsed.contains(p.name) || !parsed[p.name].is_string())
      return protocol_fault("missing string parameter '" + p.name + "'");
    texts.push_back(parsed[p.name].get<std::string>());
  }

  std::string result;
  try {
    result = compute(*op, texts);
  } catch (const Error& e) {
    return protocol_fault(e.what());
  }

  Reply r;
  r.content_type = "application/json";
  r.body = nlohmann::json{{"result", result}}.dump();
  return r;
}

MockService::Reply MockService::serve_loopback(const std::string& body) {
  TestRequest req;
  try {
    req = decode_request(body);
  } catch (const Error& e) {
    return protocol_fault(std::string("unreadable request: ") + e.what());
  }
  const OperationSignature* op = config_.descriptor.find_operation(req.op_name);
  if (!op) return protocol_fault("unknown operation '" + req.op_name + "'");

  std::string result;
  try {
    result = compute(*op, req.params);
  } catch (const Error& e) {
    return protocol_fault(e.what());
  }

  TestResponse resp;
  resp.service_id = config_.descriptor.service_id;
  resp.ok = true;
  resp.value = result;
  resp.timestamp = wall_clock_stamp();

  Reply r;
  r.content_type = "application/xml";
  r.body = encode_response(resp);
  return r;
}

MockService::Reply MockService::serve(const std::string& path, const std::string& body) {
  hits_.fetch_add(1);

  const FaultMode mode = fault_.load();
  if (mode == FaultMode::Delay)
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
  if (mode == FaultMode::SoapFault)
    return protocol_fault("injected fault from service '" + config_.descriptor.name + "'");
  if (mode == FaultMode::DropConnection) {
    Reply r;
    r.drop = true;
    return r;
  }
  if (mode == FaultMode::MalformedBody) {
    Reply r;
    switch (config_.descriptor.protocol) {
      case Protocol::Soap:
        r.content_type = "text/xml";
        r.body = "<soap:Envelope><unterminated";
        break;
      case Protocol::Rest:
        r.content_type = "application/json";
        r.body = "{\"result\": dangling";
        break;
      case Protocol::Loopback:
        r.content_type = "application/xml";
        r.body = "<response><WS-ID>broken";
        break;
    }
    return r;
  }

  switch (config_.descriptor.protocol) {
    case Protocol::Soap: return serve_soap(body);
    case Protocol::Rest: return serve_rest(path, body);
    case Protocol::Loopback: return serve_loopback(body);
  }
  return protocol_fault("corrupt protocol tag");
}

void MockService::start() {
  if (running_) return;

  if (config_.descriptor.protocol == Protocol::Loopback) {
    // Loopback routes need no real socket; port 0 just needs a unique stand-in
    // so several mocks can share a host and path without colliding.
    static std::atomic<int> next_pseudo_port{20000};
    for (auto& ep : config_.descriptor.endpoints) {
      if (ep.port == 0) ep.port = next_pseudo_port.fetch_add(1);
      LoopbackRegistry::instance().bind(ep, [this](const std::string& body) {
        Reply reply = serve("", body);
        if (reply.drop) throw std::runtime_error("connection dropped by fault injection");
        return reply.body;
      });
    }
    running_ = true;
    return;
  }

  for (auto& ep : config_.descriptor.endpoints) {
    auto listener = std::make_unique<Listener>();
    listener->endpoint = ep;
    httplib::Server& svr = listener->server;

    // SO_REUSEADDR for fast restarts, but never SO_REUSEPORT: binding a fixed
    // port that is already taken must fail loudly, not silently share traffic
    // between two mocks.
    svr.set_socket_options([](auto sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                 sizeof(yes));
    });

    svr.Post(R"(.*)", [this](const httplib::Request& req, httplib::Response& res) {
      Reply reply = serve(req.path, req.body);
      if (reply.drop) {
        // Promise a chunked body, then renege: the client sees the
        // connection die mid-exchange.
        res.set_chunked_content_provider(
            "text/plain", [](std::size_t, httplib::DataSink&) { return false; });
        return;
      }
      res.status = reply.status;
      res.set_content(reply.body, reply.content_type);
    });

    int port = ep.port;
    if (port == 0) {
      port = svr.bind_to_any_port(ep.host);
      if (port <= 0) {
        stop();
        throw Error(Errc::BindFailure, "could not bind any port on " + ep.host);
      }
    } else if (!svr.bind_to_port(ep.host, port)) {
      stop();
      throw Error(Errc::BindFailure, "could not bind " + ep.authority());
    }
    ep.port = port;
    listener->endpoint.port = port;
    listener->thread = std::thread([&svr] { svr.listen_after_bind(); });

    for (int spin = 0; spin < 200 && !svr.is_running(); ++spin)
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    if (!svr.is_running()) {
      listeners_.push_back(std::move(listener));  // ensure cleanup joins the thread
      stop();
      throw Error(Errc::BindFailure, "listener on " + ep.authority() + " never came up");
    }
    listeners_.push_back(std::move(listener));
  }
  running_ = true;
}

void MockService::stop() {
  if (config_.descriptor.protocol == Protocol::Loopback) {
    if (running_)
      for (const auto& ep : config_.descriptor.endpoints)
        LoopbackRegistry::instance().unbind(ep);
    running_ = false;
    return;
  }
  for (auto& listener : listeners_) {
    listener->server.stop();
    if (listener->thread.joinable()) listener->thread.join();
  }
  listeners_.clear();
  running_ = false;
}

MockService& MockFleet::add(MockServiceConfig config) {
  services_.push_back(std::make_unique<MockService>(std::move(config)));
  return *services_.back();
}

void MockFleet::start_all() {
  for (auto& s : services_) s->start();
}

void MockFleet::stop_all() {
  for (auto& s : services_) s->stop();
}

std::vector<ServiceDescriptor> MockFleet::descriptors() const {
  std::vector<ServiceDescriptor> out;
  out.reserve(services_.size());
  for (const auto& s : services_) out.push_back(s->descriptor());
  return out;
}

ServiceDescriptor standard_mock_descriptor(std::int64_t service_id, const std::string& name,
                                           Protocol protocol, int port_count) {
  ServiceDescriptor d;
  d.service_id = service_id;
  d.name = name;
  d.protocol = protocol;
  for (int i = 0; i < port_count; ++i)
    d.endpoints.push_back(Endpoint{"127.0.0.1", 0, "/svc"});
  if (protocol == Protocol::Soap)
    d.soap_namespace = "urn:mock:ws" + std::to_string(service_id);

  OperationSignature add;
  add.op_name = "add";
  add.params = {Param{"x", ValueType::Int}, Param{"y", ValueType::Int}};
  add.return_type = ValueType::Int;

  OperationSignature concat;
  concat.op_name = "concat";
  concat.params = {Param{"a", ValueType::Str}, Param{"b", ValueType::Str}};
  concat.return_type = ValueType::Str;

  OperationSignature echo;
  echo.op_name = "echo";
  echo.params = {Param{"x", ValueType::Str}};
  echo.return_type = ValueType::Str;

  d.operations = {add, concat, echo};
  return d;
}

}  // namespace soatest
