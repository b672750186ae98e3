#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "aqpipe/messages.hpp"

namespace aqpipe {

class Bus;

/// Run-to-completion actor: the bus delivers one message at a time; handlers
/// may send through the bus but never block on replies.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual const std::string& id() const = 0;
  virtual void handle(const AgentMessage& msg, Bus& bus) = 0;
  /// Called between idle rounds once no messages are in flight. Returns true
  /// while the agent still holds deferred work (keeps idle rounds coming).
  virtual bool on_idle(Bus&) { return false; }
};

struct TraceEntry {
  Performative performative;
  std::string sender;
  std::string receiver;
  std::string predicate;
};

struct BusClosedError : std::runtime_error {
  BusClosedError() : std::runtime_error("bus is closed") {}
};

/// Delivery contract shared by both implementations: reliable, FIFO per
/// (sender, receiver) pair, unknown receiver bounces a FAILURE to the sender.
class Bus {
 public:
  virtual ~Bus() = default;

  virtual void register_agent(Agent& agent) = 0;
  virtual void send(AgentMessage msg) = 0;
  virtual bool closed() const = 0;
  virtual void close() = 0;

  std::uint64_t new_conversation() { return ++conversation_counter_; }

  std::uint64_t messages_sent() const { return messages_sent_; }
  std::uint64_t failures() const { return failures_; }
  std::uint64_t not_understood() const { return not_understood_; }
  std::uint64_t dropped() const { return dropped_; }

  void set_trace(std::vector<TraceEntry>* sink) { trace_ = sink; }
  void set_log(std::ostream* log) { log_ = log; }

 protected:
  void record(const AgentMessage& msg) {
    if (!message_well_formed(msg)) {
      throw std::logic_error(std::string("content type not legal for performative ") +
                             std::string(to_string(msg.performative)));
    }
    ++messages_sent_;
    if (msg.performative == Performative::FAILURE) ++failures_;
    if (msg.performative == Performative::NOT_UNDERSTOOD) ++not_understood_;
    if (trace_) {
      trace_->push_back({msg.performative, msg.sender, msg.receiver,
                         std::string(predicate_name(msg.content))});
    }
    if (log_) *log_ << serialize_message(msg) << '\n';
  }

  AgentMessage bounce(const AgentMessage& msg) {
    AgentMessage failure;
    failure.performative = Performative::FAILURE;
    failure.sender = "bus";
    failure.receiver = msg.sender;
    failure.conversation = msg.conversation;
    failure.content = FailureNotice{"unknown receiver: " + msg.receiver};
    return failure;
  }

  std::atomic<std::uint64_t> conversation_counter_{0};
  std::atomic<std::uint64_t> messages_sent_{0};
  std::atomic<std::uint64_t> failures_{0};
  std::atomic<std::uint64_t> not_understood_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::vector<TraceEntry>* trace_ = nullptr;
  std::ostream* log_ = nullptr;
};

/// Single-threaded scheduler: agents are polled in registration order and
/// each handler runs to completion before the next message is dispatched.
/// Two runs over the same input produce identical message logs.
class DeterministicBus : public Bus {
 public:
  void register_agent(Agent& agent) override {
    agents_.push_back(&agent);
    mailboxes_.emplace_back();
    index_by_id_[agent.id()] = agents_.size() - 1;
  }

  void send(AgentMessage msg) override {
    if (closed_) throw BusClosedError();
    record(msg);
    const auto it = index_by_id_.find(msg.receiver);
    if (it == index_by_id_.end()) {
      const auto back = index_by_id_.find(msg.sender);
      if (back == index_by_id_.end()) {
        ++dropped_;
        return;
      }
      auto failure = bounce(msg);
      record(failure);
      mailboxes_[back->second].push_back(std::move(failure));
      return;
    }
    mailboxes_[it->second].push_back(std::move(msg));
  }

  bool idle() const {
    for (const auto& mb : mailboxes_) {
      if (!mb.empty()) return false;
    }
    return true;
  }

  /// Dispatches until every mailbox is empty.
  void run_until_idle() {
    while (true) {
      bool dispatched = false;
      for (std::size_t i = 0; i < agents_.size(); ++i) {
        if (mailboxes_[i].empty()) continue;
        AgentMessage msg = std::move(mailboxes_[i].front());
        mailboxes_[i].pop_front();
        agents_[i]->handle(msg, *this);
        dispatched = true;
        break;  // re-scan from the first agent to keep the order deterministic
      }
      if (!dispatched) return;
    }
  }

  /// One idle round: notifies every agent, then drains any follow-up work.
  /// Returns true while the round produced messages or an agent reported
  /// deferred work.
  bool idle_round() {
    const auto before = messages_sent();
    bool deferred = false;
    for (auto* agent : agents_) deferred |= agent->on_idle(*this);
    run_until_idle();
    return deferred || messages_sent() != before;
  }

  /// Run until neither pending messages nor idle rounds produce work.
  void run_to_quiescence(int max_idle_rounds = 64) {
    run_until_idle();
    for (int i = 0; i < max_idle_rounds; ++i) {
      if (!idle_round()) return;
    }
  }

  bool closed() const override { return closed_; }
  void close() override { closed_ = true; }

 private:
  std::vector<Agent*> agents_;
  std::vector<std::deque<AgentMessage>> mailboxes_;
  std::unordered_map<std::string, std::size_t> index_by_id_;
  bool closed_ = false;
};

/// One worker thread per agent. Per-pair FIFO holds because a sender enqueues
/// into each receiver's mailbox in send order; run-to-completion holds because
/// each agent drains its own mailbox on its own thread.
class ConcurrentBus : public Bus {
 public:
  ~ConcurrentBus() override { close(); }

  void register_agent(Agent& agent) override {
    auto box = std::make_unique<Mailbox>();
    box->agent = &agent;
    index_by_id_[agent.id()] = mailboxes_.size();
    mailboxes_.push_back(std::move(box));
  }

  void start() {
    for (auto& box : mailboxes_) {
      box->worker = std::thread([this, b = box.get()] { worker_loop(*b); });
    }
    running_ = true;
  }

  void send(AgentMessage msg) override {
    if (closed_) throw BusClosedError();
    {
      std::lock_guard lock(record_mutex_);
      record(msg);
    }
    const auto it = index_by_id_.find(msg.receiver);
    if (it == index_by_id_.end()) {
      const auto back = index_by_id_.find(msg.sender);
      if (back == index_by_id_.end()) {
        ++dropped_;
        return;
      }
      auto failure = bounce(msg);
      {
        std::lock_guard lock(record_mutex_);
        record(failure);
      }
      enqueue(*mailboxes_[back->second], std::move(failure));
      return;
    }
    enqueue(*mailboxes_[it->second], std::move(msg));
  }

  /// Blocks until no message is queued or being handled.
  void quiesce() {
    std::unique_lock lock(inflight_mutex_);
    inflight_cv_.wait(lock, [&] { return inflight_ == 0; });
  }

  void run_to_quiescence(int max_idle_rounds = 64) {
    quiesce();
    for (int i = 0; i < max_idle_rounds; ++i) {
      const auto before = messages_sent();
      bool deferred = false;
      for (auto& box : mailboxes_) {
        std::lock_guard exec_lock(box->exec);
        deferred |= box->agent->on_idle(*this);
      }
      quiesce();
      if (!deferred && messages_sent() == before) return;
    }
  }

  bool closed() const override { return closed_; }

  void close() override {
    if (closed_.exchange(true)) return;
    if (!running_) return;
    for (auto& box : mailboxes_) {
      std::lock_guard lock(box->mutex);
      box->stop = true;
      box->cv.notify_all();
    }
    for (auto& box : mailboxes_) {
      if (box->worker.joinable()) box->worker.join();
    }
    running_ = false;
  }

 private:
  struct Mailbox {
    Agent* agent = nullptr;
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<AgentMessage> queue;
    bool stop = false;
    std::thread worker;
    std::mutex exec;  // serializes handle() with main-thread on_idle()
  };

  void enqueue(Mailbox& box, AgentMessage msg) {
    {
      std::lock_guard lock(inflight_mutex_);
      ++inflight_;
    }
    std::lock_guard lock(box.mutex);
    box.queue.push_back(std::move(msg));
    box.cv.notify_one();
  }

  void worker_loop(Mailbox& box) {
    while (true) {
      AgentMessage msg;
      {
        std::unique_lock lock(box.mutex);
        box.cv.wait(lock, [&] { return box.stop || !box.queue.empty(); });
        if (box.queue.empty()) return;
        msg = std::move(box.queue.front());
        box.queue.pop_front();
      }
      {
        std::lock_guard exec_lock(box.exec);
        box.agent->handle(msg, *this);
      }
      {
        std::lock_guard lock(inflight_mutex_);
        --inflight_;
        if (inflight_ == 0) inflight_cv_.notify_all();
      }
    }
  }

  std::vector<std::unique_ptr<Mailbox>> mailboxes_;
  std::unordered_map<std::string, std::size_t> index_by_id_;
  std::mutex record_mutex_;
  std::mutex inflight_mutex_;
  std::condition_variable inflight_cv_;
  std::uint64_t inflight_ = 0;
  std::atomic<bool> closed_{false};
  bool running_ = false;
};

}  // namespace aqpipe
