#pragma once

#include <cstdint>

#include "lbm/perfmodel.hpp"
#include "lbm/workers.hpp"

namespace lbm {

// copy:          c[i] = a[i], one pair of arrays. 24 B/element (write
//                allocate included).
// copy-19:       19 concurrent array copies (19 read + 19 write streams),
//                24 B/element per stream.
// copy-19-nt-sl: strip-mined copy of 19 arrays, staged and written back with
//                one non-temporal store stream. 16 B/element.
// update-19:     in-place update of 19 concurrent arrays. 16 B/element.
struct BandwidthMeasurement {
  MicroKind which = MicroKind::Copy;
  std::uint64_t bytes_accounted = 0;  // of the reported repetition
  double seconds = 0.0;
  double gbps = 0.0;  // decimal giga: bytes_accounted / seconds / 1e9
  bool nt_stores_used = false;
  std::size_t working_set_bytes = 0;
  int workers = 1;
  int passes = 0;  // passes of the reported repetition
};

struct MicrobenchProtocol {
  double min_seconds = 0.5;  // per repetition
  int repetitions = 5;       // median is reported
};

std::size_t detect_llc_bytes();

// Working set must be at least 4x the last-level cache. Arrays are
// first-touch initialized with the same partitioning as the timed loops.
BandwidthMeasurement run_microbench(MicroKind which,
                                    std::size_t working_set_bytes, int workers,
                                    const MicrobenchProtocol& proto = {});

}  // namespace lbm
