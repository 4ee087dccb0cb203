#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbm/kernels.hpp"

namespace lbm {

// Bytes transferred between processor and memory per fluid node update.
// Doubles for PDFs, 4 B integers for adjacency entries; one-step kernels pay
// the write allocate, the AA pattern and non-temporal stores avoid it. RIA
// kernels are priced per run (4 B length + 72 B pattern, amortized over the
// even/odd pair) and collapse to a point value once geometry stats are known.
struct LoopBalance {
  double min_bflup = 0.0;
  double max_bflup = 0.0;
  bool is_range() const { return min_bflup != max_bflup; }

  // per-FLUP breakdown
  double pdf_read_bytes = 0.0;
  double pdf_write_bytes = 0.0;
  double write_allocate_bytes = 0.0;
  double index_bytes_min = 0.0;
  double index_bytes_max = 0.0;
};

LoopBalance loop_balance(const KernelDescriptor& k,
                         std::optional<RiaStats> geom_stats = std::nullopt);

enum class MicroKind { Copy, Copy19, Copy19NtSl, Update19 };

const char* to_string(MicroKind m);
MicroKind micro_kind_from_string(const std::string& s);

// Which micro-benchmark models which kernel: one-step -> copy-19,
// nt split -> copy-19-nt-sl, AA -> update-19.
MicroKind micro_for(const KernelDescriptor& k);

struct RooflinePrediction {
  double gbps = 0.0;
  double min_bflup = 0.0;
  double max_bflup = 0.0;
  double pmax_min_mflups = 0.0;  // from max_bflup
  double pmax_max_mflups = 0.0;  // from min_bflup
  bool is_range() const { return pmax_min_mflups != pmax_max_mflups; }
};

// P_max [MFLUP/s] = B [GB/s] * 1000 / B_l [B/FLUP]
RooflinePrediction roofline(double gbps, const LoopBalance& bl);

// Measured bandwidths keyed by micro-benchmark name; a small line-oriented
// text file ("<name> <GB/s>") for import/export.
struct BandwidthSet {
  std::map<std::string, double> gbps;

  std::optional<double> get(MicroKind m) const;
  void set(MicroKind m, double value);

  void save(const std::string& path) const;
  static BandwidthSet load(const std::string& path);
};

struct ModelRow {
  std::string kernel;
  LoopBalance bl;
  MicroKind micro;
  std::optional<RooflinePrediction> prediction;  // empty if bandwidth missing
};

// One row per kernel descriptor, kernel -> micro-benchmark mapping fixed.
std::vector<ModelRow> model_report(const BandwidthSet& bandwidths,
                                   const std::vector<KernelDescriptor>& ks,
                                   std::optional<RiaStats> geom_stats);

std::string format_model_report(const std::vector<ModelRow>& rows);

}  // namespace lbm
