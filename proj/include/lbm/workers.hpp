#pragma once

#include <barrier>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace lbm {

struct AffinityRecord {
  int worker = -1;
  int core = -1;
  bool applied = false;
};

// Best-effort thread-to-core binding; failure is recorded, never fatal.
bool set_affinity(std::thread& t, int core);

// Fixed pool of worker threads with static partitioning. Lattice
// initialization and compute sweeps run on the same threads with the same
// ranges, which is what makes first-touch placement line up with the compute
// partitioning.
class WorkerPool {
 public:
  explicit WorkerPool(int workers, const std::vector<int>& pin = {});
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()); }

  // Runs fn(worker_id) on every worker; returns when all are done. fn may
  // call sync() to barrier between sub-steps.
  void run(const std::function<void(int)>& fn);

  // Barrier across all workers; call only from inside a task.
  void sync() { barrier_->arrive_and_wait(); }

  const std::vector<AffinityRecord>& affinity() const { return affinity_; }

  // Contiguous range [first, last) of `total` items owned by worker w.
  static std::pair<std::size_t, std::size_t> partition(std::size_t total,
                                                       int workers, int w);

 private:
  void worker_loop(int id);

  std::vector<std::thread> threads_;
  std::vector<AffinityRecord> affinity_;
  std::unique_ptr<std::barrier<>> barrier_;

  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  const std::function<void(int)>* task_ = nullptr;
  std::size_t epoch_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::exception_ptr first_error_;
};

}  // namespace lbm
