#include "lbm/microbench.hpp"

#include <algorithm>
#include <chrono>
#include <unistd.h>
#include <vector>

#include "lbm/alloc.hpp"

#if defined(__SSE2__)
#include <immintrin.h>
#define LBM_HAVE_NT_STORES 1
#else
#define LBM_HAVE_NT_STORES 0
#endif

namespace lbm {
namespace {

constexpr int kStreams = 19;
constexpr std::size_t kStripElems = 512;  // 4 KiB staging per stream

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void nt_copy_strip(double* dst, const double* src, std::size_t n) {
#if LBM_HAVE_NT_STORES
  std::size_t i = 0;
  if (n && (reinterpret_cast<std::uintptr_t>(dst) & 0xF)) {
    dst[0] = src[0];
    i = 1;
  }
  for (; i + 2 <= n; i += 2) _mm_stream_pd(dst + i, _mm_loadu_pd(src + i));
  if (i < n) dst[i] = src[i];
#else
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
#endif
}

}  // namespace

std::size_t detect_llc_bytes() {
#if defined(_SC_LEVEL3_CACHE_SIZE)
  long l3 = sysconf(_SC_LEVEL3_CACHE_SIZE);
  if (l3 > 0) return static_cast<std::size_t>(l3);
#endif
#if defined(_SC_LEVEL2_CACHE_SIZE)
  long l2 = sysconf(_SC_LEVEL2_CACHE_SIZE);
  if (l2 > 0) return static_cast<std::size_t>(l2);
#endif
  return 32u << 20;  // conservative fallback
}

BandwidthMeasurement run_microbench(MicroKind which,
                                    std::size_t working_set_bytes, int workers,
                                    const MicrobenchProtocol& proto) {
  if (workers < 1) throw ConfigError("microbench: workers must be >= 1");
  const std::size_t min_ws = 4 * detect_llc_bytes();
  if (working_set_bytes < min_ws)
    throw ConfigError(
        "microbench: working set " + std::to_string(working_set_bytes) +
        " B is below 4x the last-level cache (" + std::to_string(min_ws) +
        " B); pass a larger --size");

  // number of arrays making up the working set
  int arrays = 2;
  switch (which) {
    case MicroKind::Copy: arrays = 2; break;
    case MicroKind::Copy19: arrays = 2 * kStreams; break;
    case MicroKind::Copy19NtSl: arrays = 2 * kStreams; break;
    case MicroKind::Update19: arrays = kStreams; break;
  }
  const std::size_t elems = working_set_bytes / (arrays * sizeof(double));
  if (elems == 0) throw ConfigError("microbench: working set too small");

  std::vector<NumaBuffer<double>> bufs;
  bufs.reserve(arrays);
  for (int a = 0; a < arrays; ++a) bufs.emplace_back(elems);

  WorkerPool pool(workers);
  pool.run([&](int w) {
    auto [first, last] = WorkerPool::partition(elems, workers, w);
    for (int a = 0; a < arrays; ++a) {
      double* p = bufs[a].data();
      for (std::size_t i = first; i < last; ++i) p[i] = 1.0 + a;
    }
  });

  // accounted traffic of one pass over the working set
  std::uint64_t pass_bytes = 0;
  switch (which) {
    case MicroKind::Copy: pass_bytes = 24ull * elems; break;
    case MicroKind::Copy19: pass_bytes = 24ull * kStreams * elems; break;
    case MicroKind::Copy19NtSl: pass_bytes = 16ull * kStreams * elems; break;
    case MicroKind::Update19: pass_bytes = 16ull * kStreams * elems; break;
  }

  auto one_pass = [&](int w) {
    auto [first, last] = WorkerPool::partition(elems, workers, w);
    switch (which) {
      case MicroKind::Copy: {
        const double* a = bufs[0].data();
        double* c = bufs[1].data();
        for (std::size_t i = first; i < last; ++i) c[i] = a[i];
        break;
      }
      case MicroKind::Copy19: {
        const double* src[kStreams];
        double* dst[kStreams];
        for (int k = 0; k < kStreams; ++k) {
          src[k] = bufs[k].data();
          dst[k] = bufs[kStreams + k].data();
        }
        for (std::size_t i = first; i < last; ++i)
          for (int k = 0; k < kStreams; ++k) dst[k][i] = src[k][i];
        break;
      }
      case MicroKind::Copy19NtSl: {
        double stage[kStripElems];
        for (std::size_t s = first; s < last; s += kStripElems) {
          const std::size_t m = std::min(kStripElems, last - s);
          for (int k = 0; k < kStreams; ++k) {
            const double* src = bufs[k].data() + s;
            double* dst = bufs[kStreams + k].data() + s;
            for (std::size_t i = 0; i < m; ++i) stage[i] = src[i];
            nt_copy_strip(dst, stage, m);
          }
        }
#if LBM_HAVE_NT_STORES
        _mm_sfence();
#endif
        break;
      }
      case MicroKind::Update19: {
        double* a[kStreams];
        for (int k = 0; k < kStreams; ++k) a[k] = bufs[k].data();
        const double scale = 0.999999999;
        for (std::size_t i = first; i < last; ++i)
          for (int k = 0; k < kStreams; ++k) a[k][i] = scale * a[k][i];
        break;
      }
    }
  };

  std::vector<BandwidthMeasurement> reps;
  for (int r = 0; r < proto.repetitions; ++r) {
    int passes = 0;
    const double t0 = now_seconds();
    double elapsed = 0.0;
    do {
      pool.run(one_pass);
      ++passes;
      elapsed = now_seconds() - t0;
    } while (elapsed < proto.min_seconds);

    BandwidthMeasurement m;
    m.which = which;
    m.bytes_accounted = pass_bytes * passes;
    m.seconds = elapsed;
    m.gbps = static_cast<double>(m.bytes_accounted) / elapsed / 1e9;
    m.nt_stores_used =
        which == MicroKind::Copy19NtSl && LBM_HAVE_NT_STORES;
    m.working_set_bytes = working_set_bytes;
    m.workers = workers;
    m.passes = passes;
    reps.push_back(m);
  }

  std::sort(reps.begin(), reps.end(),
            [](const auto& a, const auto& b) { return a.gbps < b.gbps; });
  return reps[reps.size() / 2];
}

}  // namespace lbm
