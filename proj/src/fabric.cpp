#include "swe/fabric.hpp"

#include <algorithm>

#include "swe/error.hpp"

namespace swe {

Fabric::Fabric(int ranks, std::chrono::milliseconds timeout)
    : ranks_(ranks), timeout_(timeout), slots_(static_cast<std::size_t>(std::max(ranks, 0)), 0.0) {
  if (ranks < 1) throw ConfigError("fabric needs at least one rank");
  mailboxes_.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) mailboxes_.push_back(std::make_unique<Mailbox>());
}

void Fabric::checkRank(int rank) const {
  if (rank < 0 || rank >= ranks_) {
    throw ConfigError("rank " + std::to_string(rank) + " outside fabric of size " + std::to_string(ranks_));
  }
}

void Fabric::throwAborted() const {
  std::lock_guard lock(barrier_mutex_);
  throw CommunicationError("fabric aborted: " + abort_reason_);
}

void Fabric::send(int src, int dst, int tag, std::vector<double> payload) {
  checkRank(src);
  checkRank(dst);
  messages_.fetch_add(1, std::memory_order_relaxed);
  bytes_.fetch_add(payload.size() * sizeof(double), std::memory_order_relaxed);
  Mailbox& box = *mailboxes_[static_cast<std::size_t>(dst)];
  {
    std::lock_guard lock(box.mutex);
    box.queues[{src, tag}].push_back(std::move(payload));
  }
  box.ready.notify_all();
}

std::vector<double> Fabric::recv(int dst, int src, int tag) {
  checkRank(src);
  checkRank(dst);
  Mailbox& box = *mailboxes_[static_cast<std::size_t>(dst)];
  std::unique_lock lock(box.mutex);
  auto& queue = box.queues[{src, tag}];
  const bool got = box.ready.wait_for(lock, timeout_, [&] { return !queue.empty() || aborted_.load(); });
  if (!queue.empty()) {
    std::vector<double> payload = std::move(queue.front());
    queue.pop_front();
    return payload;
  }
  lock.unlock();
  if (aborted_.load()) throwAborted();
  (void)got;
  throw CommunicationError("no message from rank " + std::to_string(src) + " to rank " + std::to_string(dst) +
                           " (tag " + std::to_string(tag) + ") within " + std::to_string(timeout_.count()) +
                           " ms");
}

void Fabric::barrier() {
  if (ranks_ == 1) {
    if (aborted_.load()) throwAborted();
    return;
  }
  std::unique_lock lock(barrier_mutex_);
  if (aborted_.load()) throw CommunicationError("fabric aborted: " + abort_reason_);
  const std::uint64_t generation = barrier_generation_;
  if (++barrier_waiting_ == ranks_) {
    barrier_waiting_ = 0;
    ++barrier_generation_;
    barrier_cv_.notify_all();
    return;
  }
  const bool released = barrier_cv_.wait_for(
      lock, timeout_, [&] { return barrier_generation_ != generation || aborted_.load(); });
  if (barrier_generation_ != generation) return;
  if (aborted_.load()) throw CommunicationError("fabric aborted: " + abort_reason_);
  (void)released;
  throw CommunicationError("barrier timed out after " + std::to_string(timeout_.count()) + " ms with " +
                           std::to_string(barrier_waiting_) + " of " + std::to_string(ranks_) + " ranks arrived");
}

std::vector<double> Fabric::allgather(int rank, double value) {
  checkRank(rank);
  collectives_.fetch_add(rank == 0 ? 1 : 0, std::memory_order_relaxed);
  if (ranks_ == 1) return {value};
  {
    std::lock_guard lock(barrier_mutex_);
    slots_[static_cast<std::size_t>(rank)] = value;
  }
  barrier();
  std::vector<double> all;
  {
    std::lock_guard lock(barrier_mutex_);
    all = slots_;
  }
  // Nobody may overwrite a slot before every rank has copied it.
  barrier();
  return all;
}

double Fabric::allreduceMin(int rank, double value) {
  const auto all = allgather(rank, value);
  return *std::min_element(all.begin(), all.end());
}

double Fabric::allreduceSum(int rank, double value) {
  const auto all = allgather(rank, value);
  double total = 0.0;
  for (double v : all) total += v;
  return total;
}

void Fabric::abort(const std::string& reason) {
  {
    std::lock_guard lock(barrier_mutex_);
    if (!aborted_.load()) abort_reason_ = reason;
    aborted_.store(true);
  }
  barrier_cv_.notify_all();
  for (auto& box : mailboxes_) {
    std::lock_guard lock(box->mutex);
    box->ready.notify_all();
  }
}

FabricStats Fabric::stats() const {
  return {messages_.load(), bytes_.load(), collectives_.load()};
}

}  // namespace swe
