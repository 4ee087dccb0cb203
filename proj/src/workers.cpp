#include "lbm/workers.hpp"

#include <stdexcept>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace lbm {

bool set_affinity(std::thread& t, int core) {
#if defined(__linux__)
  if (core < 0) return false;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  return pthread_setaffinity_np(t.native_handle(), sizeof(set), &set) == 0;
#else
  (void)t;
  (void)core;
  return false;
#endif
}

WorkerPool::WorkerPool(int workers, const std::vector<int>& pin) {
  if (workers < 1) throw std::invalid_argument("WorkerPool: workers >= 1");
  barrier_ = std::make_unique<std::barrier<>>(workers);
  threads_.reserve(workers);
  affinity_.resize(workers);
  for (int w = 0; w < workers; ++w) {
    threads_.emplace_back([this, w] { worker_loop(w); });
    affinity_[w].worker = w;
    if (w < static_cast<int>(pin.size())) {
      affinity_[w].core = pin[w];
      affinity_[w].applied = set_affinity(threads_[w], pin[w]);
    }
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_work_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(int)>& fn) {
  std::unique_lock lock(mu_);
  task_ = &fn;
  pending_ = size();
  first_error_ = nullptr;
  ++epoch_;
  cv_work_.notify_all();
  cv_done_.wait(lock, [this] { return pending_ == 0; });
  task_ = nullptr;
  if (first_error_) std::rethrow_exception(first_error_);
}

void WorkerPool::worker_loop(int id) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(int)>* task;
    {
      std::unique_lock lock(mu_);
      cv_work_.wait(lock, [&] { return stop_ || epoch_ != seen; });
      if (stop_) return;
      seen = epoch_;
      task = task_;
    }
    try {
      (*task)(id);
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!first_error_) first_error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      if (--pending_ == 0) cv_done_.notify_one();
    }
  }
}

std::pair<std::size_t, std::size_t> WorkerPool::partition(std::size_t total,
                                                          int workers, int w) {
  const std::size_t base = total / workers;
  const std::size_t rem = total % workers;
  const std::size_t first =
      w * base + std::min<std::size_t>(w, rem);
  const std::size_t count = base + (static_cast<std::size_t>(w) < rem ? 1 : 0);
  return {first, first + count};
}

}  // namespace lbm
