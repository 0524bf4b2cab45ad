#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "soatest/middleware.hpp"
#include "soatest/types.hpp"

namespace soatest {

/// Result of pushing one wire message at one endpoint: either a reply (any
/// HTTP status counts as a reply) or a transport-level error, never both.
struct SendOutcome {
  std::optional<WireMessage> reply;
  std::optional<Errc> error;  // Timeout | ConnectionRefused | TransportError
  std::string error_detail;
  std::int64_t latency_ms = 0;

  bool ok() const { return reply.has_value(); }
};

class EndpointAdapter {
 public:
  virtual ~EndpointAdapter() = default;
  virtual SendOutcome send(const Endpoint& ep, const WireMessage& msg,
                           std::chrono::milliseconds timeout) = 0;
};

/// Real HTTP POST (SOAP and REST both ride on it). Transport failures map to:
///   connect refused / unreachable -> ConnectionRefused
///   connect timeout               -> Timeout
///   read/write failure            -> Timeout when the send deadline elapsed,
///                                    TransportError otherwise (peer hung up)
class HttpAdapter : public EndpointAdapter {
 public:
  SendOutcome send(const Endpoint& ep, const WireMessage& msg,
                   std::chrono::milliseconds timeout) override;
};

/// Process-wide table of in-process handlers standing in for remote hosts,
/// keyed by endpoint authority + path. Used for LOOPBACK descriptors and by
/// tests that need a service without opening a socket.
class LoopbackRegistry {
 public:
  /// Takes the request body, returns the response body. Throwing simulates a
  /// mid-flight transport failure.
  using Handler = std::function<std::string(const std::string& body)>;

  static LoopbackRegistry& instance();

  void bind(const Endpoint& ep, Handler handler);
  void unbind(const Endpoint& ep);
  void clear();
  std::optional<Handler> find(const Endpoint& ep) const;

 private:
  static std::string key(const Endpoint& ep);

  mutable std::mutex mu_;
  std::map<std::string, Handler> handlers_;
};

/// Synchronous in-process dispatch. An unbound endpoint is ConnectionRefused;
/// a handler that throws is TransportError; a handler that takes longer than
/// the deadline is Timeout (measured after the fact, as a socket would).
class LoopbackAdapter : public EndpointAdapter {
 public:
  SendOutcome send(const Endpoint& ep, const WireMessage& msg,
                   std::chrono::milliseconds timeout) override;
};

/// The two adapters behind one protocol switch.
class AdapterSet {
 public:
  EndpointAdapter& for_protocol(Protocol p) {
    return p == Protocol::Loopback ? static_cast<EndpointAdapter&>(loop_)
                                   : static_cast<EndpointAdapter&>(http_);
  }

 private:
  HttpAdapter http_;
  LoopbackAdapter loop_;
};

}  // namespace soatest
