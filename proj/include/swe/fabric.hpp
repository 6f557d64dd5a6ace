#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace swe {

struct FabricStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t collectives = 0;
};

/// In-process message passing between rank workers. Point-to-point channels
/// are FIFO per (source, destination, tag); sends never block. Collectives
/// require every rank to participate. Any blocking call throws
/// CommunicationError after the timeout or once the fabric is aborted.
class Fabric {
 public:
  explicit Fabric(int ranks, std::chrono::milliseconds timeout = std::chrono::seconds(120));
  Fabric(const Fabric&) = delete;
  Fabric& operator=(const Fabric&) = delete;

  int size() const { return ranks_; }

  void send(int src, int dst, int tag, std::vector<double> payload);
  std::vector<double> recv(int dst, int src, int tag);

  void barrier();
  /// Every rank's value, indexed by rank.
  std::vector<double> allgather(int rank, double value);
  double allreduceMin(int rank, double value);
  /// Sum accumulated in rank order, so the result does not depend on timing.
  double allreduceSum(int rank, double value);

  /// Wakes every blocked rank with a CommunicationError carrying `reason`.
  void abort(const std::string& reason);
  bool aborted() const { return aborted_.load(); }

  FabricStats stats() const;

 private:
  struct Mailbox {
    std::mutex mutex;
    std::condition_variable ready;
    std::map<std::pair<int, int>, std::deque<std::vector<double>>> queues;  // (src, tag)
  };

  void checkRank(int rank) const;
  [[noreturn]] void throwAborted() const;

  int ranks_;
  std::chrono::milliseconds timeout_;
  std::vector<std::unique_ptr<Mailbox>> mailboxes_;

  mutable std::mutex barrier_mutex_;
  std::condition_variable barrier_cv_;
  int barrier_waiting_ = 0;
  std::uint64_t barrier_generation_ = 0;

  std::vector<double> slots_;

  std::atomic<bool> aborted_{false};
  std::string abort_reason_;

  std::atomic<std::uint64_t> messages_{0};
  std::atomic<std::uint64_t> bytes_{0};
  std::atomic<std::uint64_t> collectives_{0};
};

}  // namespace swe
