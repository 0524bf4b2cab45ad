#include "soatest/adapters.hpp"

#include <httplib.h>

namespace soatest {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

}  // namespace

SendOutcome HttpAdapter::send(const Endpoint& ep, const WireMessage& msg,
                              std::chrono::milliseconds timeout) {
  httplib::Client client(ep.host, ep.port);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_keep_alive(false);

  const auto start = Clock::now();
  httplib::Result res = client.Post(msg.path, msg.body, msg.content_type);
  SendOutcome out;
  out.latency_ms = elapsed_ms(start);

  if (res) {
    WireMessage reply;
    reply.protocol = msg.protocol;
    reply.path = msg.path;
    reply.http_status = res->status;
    reply.content_type = res->get_header_value("Content-Type");
    reply.body = res->body;
    out.reply = std::move(reply);
    return out;
  }

  switch (res.error()) {
    case httplib::Error::Connection:
      out.error = Errc::ConnectionRefused;
      out.error_detail = "connection refused by " + ep.authority();
      break;
    case httplib::Error::ConnectionTimeout:
      out.error = Errc::Timeout;
      out.error_detail = "connect to " + ep.authority() + " timed out";
      break;
    case httplib::Error::Read:
    case httplib::Error::Write:
      if (out.latency_ms >= timeout.count()) {
        out.error = Errc::Timeout;
        out.error_detail = "no reply from " + ep.authority() + " within " +
                           std::to_string(timeout.count()) + "ms";
      } else {
        out.error = Errc::TransportError;
        out.error_detail = ep.authority() + " closed the connection mid-exchange";
      }
      break;
    default:
      out.error = Errc::TransportError;
      out.error_detail = "transport failure talking to " + ep.authority() + " (" +
                         httplib::to_string(res.error()) + ")";
      break;
  }
  return out;
}

LoopbackRegistry& LoopbackRegistry::instance() {
  static LoopbackRegistry reg;
  return reg;
}

std::string LoopbackRegistry::key(const Endpoint& ep) {
  return ep.authority() + " " + ep.path;
}

void LoopbackRegistry::bind(const Endpoint& ep, Handler handler) {
  std::lock_guard lock(mu_);
  handlers_[key(ep)] = std::move(handler);
}

void LoopbackRegistry::unbind(const Endpoint& ep) {
  std::lock_guard lock(mu_);
  handlers_.erase(key(ep));
}

void LoopbackRegistry::clear() {
  std::lock_guard lock(mu_);
  handlers_.clear();
}

std::optional<LoopbackRegistry::Handler> LoopbackRegistry::find(const Endpoint& ep) const {
  std::lock_guard lock(mu_);
  auto it = handlers_.find(key(ep));
  if (it == handlers_.end()) return std::nullopt;
  return it->second;
}

SendOutcome LoopbackAdapter::send(const Endpoint& ep, const WireMessage& msg,
                                  std::chrono::milliseconds timeout) {
  SendOutcome out;
  auto handler = LoopbackRegistry::instance().find(ep);
  if (!handler) {
    out.error = Errc::ConnectionRefused;
    out.error_detail = "nothing bound at " + ep.authority() + ep.path;
    return out;
  }

  const auto start = Clock::now();
  std::string body;
  try {
    body = (*handler)(msg.body);
  } catch (const std::exception& e) {
    out.latency_ms = elapsed_ms(start);
    out.error = Errc::TransportError;
    out.error_detail = std::string("handler dropped the exchange: ") + e.what();
    return out;
  }
  out.latency_ms = elapsed_ms(start);

  if (out.latency_ms >= timeout.count() && timeout.count() > 0) {
    out.error = Errc::Timeout;
    out.error_detail = "no reply within " + std::to_string(timeout.count()) + "ms";
    return out;
  }

  WireMessage reply;
  reply.protocol = msg.protocol;
  reply.path = msg.path;
  reply.http_status = 200;
  reply.content_type = "application/xml";
  reply.body = std::move(body);
  out.reply = std::move(reply);
  return out;
}

}  // namespace soatest
