#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "soatest/adapters.hpp"
#include "soatest/middleware.hpp"
#include "soatest/registry.hpp"

namespace soatest {

enum class AgentState { Free, Busy, Offline };

const char* agent_state_name(AgentState s) noexcept;

/// What one dispatch produced: a canonical response, or a transport/decoding
/// error, plus where and how long. Never both response and error.
struct DispatchResult {
  std::optional<TestResponse> response;
  std::optional<Errc> error;  // Timeout | ConnectionRefused | TransportError | MalformedResponse
  std::string error_detail;
  std::int64_t latency_ms = 0;
  int agent_id = -1;
  std::string server;  // authority of the endpoint that served (or failed) the call
};

class AgentPool;

/// Move-only claim on one agent. dispatch() consumes it; if it goes out of
/// scope still held (exception paths), the agent is released automatically.
class AgentHandle {
 public:
  AgentHandle() = default;
  AgentHandle(AgentHandle&& other) noexcept;
  AgentHandle& operator=(AgentHandle&& other) noexcept;
  AgentHandle(const AgentHandle&) = delete;
  AgentHandle& operator=(const AgentHandle&) = delete;
  ~AgentHandle();

  int id() const { return id_; }
  explicit operator bool() const { return pool_ != nullptr; }

 private:
  friend class AgentPool;
  AgentHandle(AgentPool* pool, int id) : pool_(pool), id_(id) {}

  AgentPool* pool_ = nullptr;
  int id_ = -1;
};

/// Fixed-size pool of test agents. acquire() hands out the lowest-numbered
/// FREE agent (blocking up to a deadline); dispatch() runs one request end to
/// end on the claimed agent and releases it no matter how the send went.
/// Endpoint choice is strict per-service round-robin in declaration order.
class AgentPool {
 public:
  AgentPool(const Registry& registry, AdapterSet& adapters, int agent_count,
            std::chrono::milliseconds send_timeout);

  /// Lowest-id FREE agent, BUSY on return. Throws AcquireTimeout when none
  /// frees up within the deadline.
  AgentHandle acquire(std::chrono::milliseconds wait_timeout);

  /// Converts, sends, converts back. The handle is spent afterwards (the
  /// agent is FREE again, or OFFLINE when a retirement was pending).
  /// Transport and decode failures land in the result; misuse (unknown
  /// service/operation, arity) throws.
  DispatchResult dispatch(AgentHandle& handle, const TestRequest& request);

  /// FREE <-> OFFLINE management. Retiring a BUSY agent is deferred until its
  /// dispatch finishes; any other path into or out of BUSY throws
  /// IllegalTransition. Unknown ids throw UnknownAgent.
  void set_agent_state(int agent_id, AgentState desired);

  AgentState agent_state(int agent_id) const;
  std::vector<AgentState> agent_states() const;
  int agent_count() const { return static_cast<int>(agents_.size()); }

  /// How many dispatches each endpoint authority of a service has absorbed.
  std::map<std::string, std::size_t> endpoint_counts(std::int64_t service_id) const;

 private:
  friend class AgentHandle;

  struct Agent {
    AgentState state = AgentState::Free;
    bool retire_when_done = false;
  };

  void release(int agent_id);
  Endpoint pick_endpoint(const ServiceDescriptor& descriptor);

  const Registry& registry_;
  AdapterSet& adapters_;
  std::chrono::milliseconds send_timeout_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Agent> agents_;
  std::map<std::int64_t, std::size_t> rr_;  // per-service round-robin cursor
  std::map<std::int64_t, std::map<std::string, std::size_t>> endpoint_counts_;
};

/// Id of the agent running a dispatch on this thread, -1 outside one. Lets
/// in-process service handlers observe which agent is calling them.
int current_dispatch_agent() noexcept;

}  // namespace soatest
