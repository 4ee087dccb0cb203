#pragma once

#include <cstdlib>
#include <memory>
#include <new>

#if defined(__linux__)
#include <sys/mman.h>
#endif

namespace lbm {

inline constexpr std::size_t kHugePageBytes = 2u << 20;

// 2 MiB-aligned allocation with transparent-huge-page advice. Memory is left
// untouched so that first-touch placement happens in the owning worker's
// initialization sweep. The advice is a recorded no-op where unsupported.
template <class T>
class NumaBuffer {
 public:
  NumaBuffer() = default;

  explicit NumaBuffer(std::size_t count) : count_(count) {
    if (count == 0) return;
    std::size_t bytes = count * sizeof(T);
    bytes = (bytes + kHugePageBytes - 1) / kHugePageBytes * kHugePageBytes;
    void* p = std::aligned_alloc(kHugePageBytes, bytes);
    if (!p) throw std::bad_alloc();
    data_ = static_cast<T*>(p);
#if defined(__linux__) && defined(MADV_HUGEPAGE)
    huge_advised_ = madvise(p, bytes, MADV_HUGEPAGE) == 0;
#endif
  }

  NumaBuffer(NumaBuffer&& other) noexcept { swap(other); }
  NumaBuffer& operator=(NumaBuffer&& other) noexcept {
    if (this != &other) {
      release();
      swap(other);
    }
    return *this;
  }
  NumaBuffer(const NumaBuffer&) = delete;
  NumaBuffer& operator=(const NumaBuffer&) = delete;
  ~NumaBuffer() { release(); }

  T* data() { return data_; }
  const T* data() const { return data_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return count_; }
  bool huge_advised() const { return huge_advised_; }

 private:
  void release() {
    std::free(data_);
    data_ = nullptr;
    count_ = 0;
    huge_advised_ = false;
  }
  void swap(NumaBuffer& o) {
    std::swap(data_, o.data_);
    std::swap(count_, o.count_);
    std::swap(huge_advised_, o.huge_advised_);
  }

  T* data_ = nullptr;
  std::size_t count_ = 0;
  bool huge_advised_ = false;
};

}  // namespace lbm
