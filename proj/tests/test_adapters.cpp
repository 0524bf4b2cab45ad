#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "helpers.hpp"
#include "soatest/adapters.hpp"

using namespace soatest;
using namespace std::chrono_literals;

namespace {

WireMessage plain_message(std::string body) {
  WireMessage m;
  m.protocol = Protocol::Loopback;
  m.path = "/svc";
  m.content_type = "text/plain";
  m.body = std::move(body);
  return m;
}

/// Minimal HTTP server on an ephemeral 127.0.0.1 port for exercising the
/// real adapter. The handler is swappable per test.
class LocalServer {
 public:
  LocalServer() {
    server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    for (int i = 0; i < 200 && !server_.is_running(); ++i)
      std::this_thread::sleep_for(5ms);
    REQUIRE(server_.is_running());
  }
  ~LocalServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  Endpoint endpoint() const { return Endpoint{"127.0.0.1", port_, "/svc"}; }

  std::function<void(const httplib::Request&, httplib::Response&)> on_post;

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    if (on_post) on_post(req, res);
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("loopback registry") {
  TEST_CASE("bound handlers are found, unbound ones are not") {
    auto& reg = LoopbackRegistry::instance();
    const Endpoint ep{"test-host", 9101, "/a"};
    reg.bind(ep, [](const std::string& b) { return b + "!"; });
    auto h = reg.find(ep);
    REQUIRE(h.has_value());
    CHECK((*h)("x") == "x!");
    reg.unbind(ep);
    CHECK_FALSE(reg.find(ep).has_value());
  }

  TEST_CASE("the key covers authority and path") {
    auto& reg = LoopbackRegistry::instance();
    const Endpoint a{"test-host", 9102, "/a"};
    const Endpoint b{"test-host", 9102, "/b"};
    const Endpoint c{"test-host", 9103, "/a"};
    reg.bind(a, [](const std::string&) { return "A"; });
    CHECK_FALSE(reg.find(b).has_value());
    CHECK_FALSE(reg.find(c).has_value());
    CHECK(reg.find(a).has_value());
    reg.unbind(a);
  }

  TEST_CASE("rebinding replaces the previous handler") {
    auto& reg = LoopbackRegistry::instance();
    const Endpoint ep{"test-host", 9104, "/a"};
    reg.bind(ep, [](const std::string&) { return "old"; });
    reg.bind(ep, [](const std::string&) { return "new"; });
    CHECK((*reg.find(ep))("") == "new");
    reg.unbind(ep);
  }
}

TEST_SUITE("loopback adapter") {
  TEST_CASE("a bound handler yields an HTTP-200 reply carrying its text") {
    const Endpoint ep{"test-host", 9110, "/svc"};
    LoopbackRegistry::instance().bind(ep, [](const std::string& b) { return "echo:" + b; });
    LoopbackAdapter adapter;
    const SendOutcome out = adapter.send(ep, plain_message("ping"), 1000ms);
    LoopbackRegistry::instance().unbind(ep);
    REQUIRE(out.ok());
    CHECK(out.reply->http_status == 200);
    CHECK(out.reply->body == "echo:ping");
    CHECK_FALSE(out.error.has_value());
  }

  TEST_CASE("nothing bound means the connection is refused") {
    LoopbackAdapter adapter;
    const SendOutcome out = adapter.send(Endpoint{"test-host", 9111, "/nowhere"},
                                         plain_message("ping"), 1000ms);
    CHECK_FALSE(out.ok());
    CHECK(out.error == Errc::ConnectionRefused);
  }

  TEST_CASE("a throwing handler is a transport failure, not a crash") {
    const Endpoint ep{"test-host", 9112, "/svc"};
    LoopbackRegistry::instance().bind(
        ep, [](const std::string&) -> std::string { throw std::runtime_error("cable cut"); });
    LoopbackAdapter adapter;
    const SendOutcome out = adapter.send(ep, plain_message("ping"), 1000ms);
    LoopbackRegistry::instance().unbind(ep);
    CHECK(out.error == Errc::TransportError);
    CHECK(out.error_detail.find("cable cut") != std::string::npos);
  }

  TEST_CASE("a handler slower than the deadline counts as a timeout") {
    const Endpoint ep{"test-host", 9113, "/svc"};
    LoopbackRegistry::instance().bind(ep, [](const std::string& b) {
      std::this_thread::sleep_for(60ms);
      return b;
    });
    LoopbackAdapter adapter;
    const SendOutcome out = adapter.send(ep, plain_message("ping"), 20ms);
    LoopbackRegistry::instance().unbind(ep);
    CHECK(out.error == Errc::Timeout);
    CHECK(out.latency_ms >= 20);
  }
}

TEST_SUITE("http adapter") {
  TEST_CASE("round-trips body, status, and content type") {
    LocalServer server;
    std::atomic<int> hits{0};
    server.on_post = [&](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      CHECK(req.path == "/svc");
      CHECK(req.get_header_value("Content-Type") == "text/xml");
      res.set_content("pong:" + req.body, "text/xml");
    };
    WireMessage msg = plain_message("ping");
    msg.protocol = Protocol::Soap;
    msg.content_type = "text/xml";

    HttpAdapter adapter;
    const SendOutcome out = adapter.send(server.endpoint(), msg, 2000ms);
    REQUIRE(out.ok());
    CHECK(out.reply->http_status == 200);
    CHECK(out.reply->body == "pong:ping");
    CHECK(out.reply->content_type == "text/xml");
    CHECK(hits == 1);
  }

  TEST_CASE("an HTTP error status is still a reply, not a transport error") {
    LocalServer server;
    server.on_post = [](const httplib::Request&, httplib::Response& res) {
      res.status = 503;
      res.set_content("outage", "text/plain");
    };
    HttpAdapter adapter;
    const SendOutcome out = adapter.send(server.endpoint(), plain_message("x"), 2000ms);
    REQUIRE(out.ok());
    CHECK(out.reply->http_status == 503);
    CHECK(out.reply->body == "outage");
  }

  TEST_CASE("a closed port is a refused connection") {
    int free_port = 0;
    {
      LocalServer server;  // grab a port the OS considers free, then release it
      free_port = server.port();
    }
    HttpAdapter adapter;
    const SendOutcome out =
        adapter.send(Endpoint{"127.0.0.1", free_port, "/svc"}, plain_message("x"), 2000ms);
    CHECK_FALSE(out.ok());
    CHECK(out.error == Errc::ConnectionRefused);
  }

  TEST_CASE("a server that answers too slowly is a timeout") {
    LocalServer server;
    server.on_post = [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(600ms);
      res.set_content("late", "text/plain");
    };
    HttpAdapter adapter;
    const SendOutcome out = adapter.send(server.endpoint(), plain_message("x"), 100ms);
    CHECK_FALSE(out.ok());
    CHECK(out.error == Errc::Timeout);
    CHECK(out.latency_ms >= 100);
  }

  TEST_CASE("a connection dropped mid-reply is a transport error") {
    LocalServer server;
    server.on_post = [](const httplib::Request&, httplib::Response& res) {
      res.set_chunked_content_provider("text/plain",
                                       [](std::size_t, httplib::DataSink&) { return false; });
    };
    HttpAdapter adapter;
    const SendOutcome out = adapter.send(server.endpoint(), plain_message("x"), 2000ms);
    CHECK_FALSE(out.ok());
    CHECK(out.error == Errc::TransportError);
  }
}

TEST_SUITE("adapter set") {
  TEST_CASE("the protocol switch picks loopback only for LOOPBACK") {
    AdapterSet set;
    CHECK(&set.for_protocol(Protocol::Soap) == &set.for_protocol(Protocol::Rest));
    CHECK(&set.for_protocol(Protocol::Loopback) != &set.for_protocol(Protocol::Soap));
  }
}
