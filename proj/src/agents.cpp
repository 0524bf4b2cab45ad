#include "soatest/agents.hpp"

namespace soatest {

namespace {
thread_local int tls_dispatch_agent = -1;
}

int current_dispatch_agent() noexcept { return tls_dispatch_agent; }

const char* agent_state_name(AgentState s) noexcept {
  switch (s) {
    case AgentState::Free: return "FREE";
    case AgentState::Busy: return "BUSY";
    case AgentState::Offline: return "OFFLINE";
  }
  return "?";
}

AgentHandle::AgentHandle(AgentHandle&& other) noexcept : pool_(other.pool_), id_(other.id_) {
  other.pool_ = nullptr;
  other.id_ = -1;
}

AgentHandle& AgentHandle::operator=(AgentHandle&& other) noexcept {
  if (this != &other) {
    if (pool_) pool_->release(id_);
    pool_ = other.pool_;
    id_ = other.id_;
    other.pool_ = nullptr;
    other.id_ = -1;
  }
  return *this;
}

AgentHandle::~AgentHandle() {
  if (pool_) pool_->release(id_);
}

AgentPool::AgentPool(const Registry& registry, AdapterSet& adapters, int agent_count,
                     std::chrono::milliseconds send_timeout)
    : registry_(registry), adapters_(adapters), send_timeout_(send_timeout) {
  if (agent_count < 1) throw Error(Errc::BadValue, "agent pool needs at least one agent");
  agents_.resize(static_cast<std::size_t>(agent_count));
}

AgentHandle AgentPool::acquire(std::chrono::milliseconds wait_timeout) {
  std::unique_lock lock(mu_);
  const auto deadline = std::chrono::steady_clock::now() + wait_timeout;
  int picked = -1;
  auto find_free = [&] {
    for (std::size_t i = 0; i < agents_.size(); ++i)
      if (agents_[i].state == AgentState::Free) {
        picked = static_cast<int>(i);
        return true;
      }
    return false;
  };
  if (!cv_.wait_until(lock, deadline, find_free))
    throw Error(Errc::AcquireTimeout, "no agent freed up within " +
                                          std::to_string(wait_timeout.count()) + "ms");
  agents_[static_cast<std::size_t>(picked)].state = AgentState::Busy;
  return AgentHandle(this, picked);
}

void AgentPool::release(int agent_id) {
  {
    std::lock_guard lock(mu_);
    Agent& a = agents_[static_cast<std::size_t>(agent_id)];
    if (a.state != AgentState::Busy) return;  // already released
    if (a.retire_when_done) {
      a.state = AgentState::Offline;
      a.retire_when_done = false;
    } else {
      a.state = AgentState::Free;
    }
  }
  cv_.notify_all();
}

Endpoint AgentPool::pick_endpoint(const ServiceDescriptor& descriptor) {
  std::lock_guard lock(mu_);
  std::size_t& cursor = rr_[descriptor.service_id];
  const Endpoint& ep = descriptor.endpoints[cursor % descriptor.endpoints.size()];
  ++cursor;
  ++endpoint_counts_[descriptor.service_id][ep.authority()];
  return ep;
}

DispatchResult AgentPool::dispatch(AgentHandle& handle, const TestRequest& request) {
  if (!handle || handle.pool_ != this)
    throw Error(Errc::UnknownAgent, "dispatch needs an agent acquired from this pool");
  const int agent_id = handle.id();

  // Consume the handle now; the agent is released on every exit path below.
  handle.pool_ = nullptr;
  handle.id_ = -1;
  struct Releaser {
    AgentPool* pool;
    int id;
    ~Releaser() { pool->release(id); }
  } releaser{this, agent_id};

  DispatchResult out;
  out.agent_id = agent_id;

  const ServiceDescriptor descriptor = registry_.lookup_service(request.service_id);
  const WireMessage wire = to_protocol(request, descriptor);
  const Endpoint endpoint = pick_endpoint(descriptor);
  out.server = endpoint.authority();

  tls_dispatch_agent = agent_id;
  SendOutcome sent = adapters_.for_protocol(descriptor.protocol)
                         .send(endpoint, wire, send_timeout_);
  tls_dispatch_agent = -1;

  out.latency_ms = sent.latency_ms;
  if (!sent.ok()) {
    out.error = sent.error;
    out.error_detail = sent.error_detail;
    return out;
  }

  try {
    out.response = from_protocol(descriptor, *sent.reply);
  } catch (const Error& e) {
    if (e.code() != Errc::MalformedResponse) throw;
    out.error = Errc::MalformedResponse;
    out.error_detail = e.what();
  }
  return out;
}

void AgentPool::set_agent_state(int agent_id, AgentState desired) {
  bool freed = false;
  {
    std::lock_guard lock(mu_);
    if (agent_id < 0 || agent_id >= static_cast<int>(agents_.size()))
      throw Error(Errc::UnknownAgent, "no agent " + std::to_string(agent_id));
    Agent& a = agents_[static_cast<std::size_t>(agent_id)];
    if (desired == a.state) return;
    if (desired == AgentState::Busy)
      throw Error(Errc::IllegalTransition, "only acquire() may mark an agent BUSY");
    if (a.state == AgentState::Busy) {
      if (desired == AgentState::Free)
        throw Error(Errc::IllegalTransition,
                    "agent " + std::to_string(agent_id) + " is mid-dispatch");
      a.retire_when_done = true;  // OFFLINE once the dispatch finishes
      return;
    }
    a.state = desired;
    a.retire_when_done = false;
    freed = desired == AgentState::Free;
  }
  if (freed) cv_.notify_all();
}

AgentState AgentPool::agent_state(int agent_id) const {
  std::lock_guard lock(mu_);
  if (agent_id < 0 || agent_id >= static_cast<int>(agents_.size()))
    throw Error(Errc::UnknownAgent, "no agent " + std::to_string(agent_id));
  return agents_[static_cast<std::size_t>(agent_id)].state;
}

std::vector<AgentState> AgentPool::agent_states() const {
  std::lock_guard lock(mu_);
  std::vector<AgentState> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(a.state);
  return out;
}

std::map<std::string, std::size_t> AgentPool::endpoint_counts(std::int64_t service_id) const {
  std::lock_guard lock(mu_);
  auto it = endpoint_counts_.find(service_id);
  return it == endpoint_counts_.end() ? std::map<std::string, std::size_t>{} : it->second;
}

}  // namespace soatest
