#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "soatest/types.hpp"

namespace soatest {

/// Misbehaviors a mock service can be switched into at runtime:
///   NONE            -> faithful reference behavior
///   OFF_BY_ONE      -> correct shape, wrong value (ints +1, floats +1.0,
///                      bools flipped, strings with "1" appended)
///   SOAP_FAULT      -> protocol-level fault on every call
///   DELAY           -> answers correctly but only after a configured pause
///   DROP_CONNECTION -> accepts the request, then kills the exchange mid-reply
///   MALFORMED_BODY  -> answers 200 with an unparseable body
enum class FaultMode { None, OffByOne, SoapFault, Delay, DropConnection, MalformedBody };

const char* fault_mode_name(FaultMode m) noexcept;
FaultMode fault_mode_from_name(std::string_view name);

struct MockServiceConfig {
  /// Ports may be 0 to pick a free one; descriptor() reports resolved ports
  /// after start(). Operations are served by name: add, concat, echo.
  ServiceDescriptor descriptor;
  FaultMode initial_fault = FaultMode::None;
  std::chrono::milliseconds delay{1000};  // pause used by DELAY
};

/// One in-process stand-in for a web service. SOAP and REST descriptors get
/// a real HTTP listener per endpoint; LOOPBACK descriptors are served through
/// the in-process loopback table. An unfaulted mock computes exactly what the
/// same-named builtin oracle computes.
class MockService {
 public:
  explicit MockService(MockServiceConfig config);
  ~MockService();

  MockService(const MockService&) = delete;
  MockService& operator=(const MockService&) = delete;

  /// Binds every endpoint; throws BindFailure when a fixed port is taken.
  void start();
  /// Stops listeners and unbinds loopback routes; safe to call twice.
  void stop();
  bool running() const { return running_; }

  /// The descriptor with ports resolved (valid after start()).
  const ServiceDescriptor& descriptor() const { return config_.descriptor; }

  void inject_fault(FaultMode mode) { fault_.store(mode); }
  FaultMode fault() const { return fault_.load(); }
  void set_delay(std::chrono::milliseconds d) { delay_ms_.store(d.count()); }

  std::uint64_t hits() const { return hits_.load(); }

 private:
  struct Listener;

  struct Reply {
    int status = 200;
    std::string content_type;
    std::string body;
    bool drop = false;  // abandon the exchange instead of answering
  };

  Reply serve(const std::string& path, const std::string& body);
  Reply serve_soap(const std::string& body);
  Reply serve_rest(const std::string& path, const std::string& body);
  Reply serve_loopback(const std::string& body);
  Reply protocol_fault(const std::string& text);
  std::string compute(const OperationSignature& op, const std::vector<std::string>& texts);

  MockServiceConfig config_;
  std::atomic<FaultMode> fault_;
  std::atomic<std::int64_t> delay_ms_;
  std::atomic<std::uint64_t> hits_{0};
  std::vector<std::unique_ptr<Listener>> listeners_;
  bool running_ = false;
};

/// Convenience owner for several mocks started and stopped together.
class MockFleet {
 public:
  MockService& add(MockServiceConfig config);
  void start_all();
  void stop_all();
  std::vector<ServiceDescriptor> descriptors() const;
  std::vector<std::unique_ptr<MockService>>& services() { return services_; }

 private:
  std::vector<std::unique_ptr<MockService>> services_;
};

/// Ready-made descriptor for a mock exposing the three builtin operations
/// (add: INT x INT -> INT, concat: STRING x STRING -> STRING, echo:
/// STRING -> STRING) on `port_count` endpoints of the chosen protocol.
ServiceDescriptor standard_mock_descriptor(std::int64_t service_id, const std::string& name,
                                           Protocol protocol, int port_count = 1);

}  // namespace soatest
