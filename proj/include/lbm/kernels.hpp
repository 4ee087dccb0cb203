#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbm/d3q19.hpp"
#include "lbm/geometry.hpp"
#include "lbm/layout.hpp"
#include "lbm/list_lattice.hpp"
#include "lbm/workers.hpp"

namespace lbm {

enum class Propagation { OsPush, OsPull, Aa };
enum class Addressing { Direct, Indirect };

const char* to_string(Propagation p);
const char* to_string(Addressing a);

// One row of the kernel matrix: propagation scheme, data layout, addressing
// and the variant-specific options.
struct KernelDescriptor {
  std::string name;
  Propagation prop = Propagation::OsPush;
  Layout layout = Layout::SoA;
  Addressing addr = Addressing::Direct;
  int blk = 0;         // loop blocking factor, 0 = off
  int nt_streams = 0;  // 1|2 non-temporal store streams (list pull split)
  bool ria = false;    // run-length coded odd step
  bool pv = false;     // partially vectorized odd step (implies ria)
  bool vec = false;    // vector-friendly full-array AA
  int vector_width = 4;
};

// The 17 kernel names, in the canonical reporting order.
const std::vector<std::string>& kernel_names();
bool is_kernel_name(const std::string& name);

// Builds and validates a descriptor. Throws ConfigError listing the valid
// names for unknown kernels or invalid option combinations.
KernelDescriptor make_descriptor(const std::string& name, int blk = 0,
                                 int vector_width = 4);

struct KernelCaps {
  bool nt_stores_available = false;
  int nt_streams_effective = 0;
  bool huge_pages_advised = false;
};

struct RiaStats {
  std::size_t total_runs = 0;
  std::size_t n_fluid = 0;
};

class Kernel {
 public:
  virtual ~Kernel() = default;

  const KernelDescriptor& descriptor() const { return desc_; }

  // Advances `steps` time steps. The lattice is in standard storage
  // convention before and after; AA kernels therefore require an even count.
  void advance(const TrtParams& p, const BodyForce& g, long steps);

  virtual std::size_t n_fluid() const = 0;
  virtual KernelCaps capabilities() const = 0;

  // Canonical per-fluid-node PDFs in x,y,z node order.
  virtual std::vector<double> snapshot() const = 0;
  virtual void load_state(std::span<const double> state) = 0;

  // Sum over every population the kernel owns: fluid and solid nodes for the
  // full-array representation, the fluid list otherwise.
  virtual double total_mass() const = 0;

  virtual std::optional<RiaStats> ria_stats() const { return std::nullopt; }
  // Vectorizable fraction v of the run coding at the configured width
  // (ria and pv kernels).
  virtual std::optional<double> vector_fraction() const {
    return std::nullopt;
  }
  // Fraction of fluid nodes the pv odd step processes in full vector chunks.
  virtual std::optional<double> pv_chunk_fraction() const {
    return std::nullopt;
  }

 protected:
  explicit Kernel(KernelDescriptor d) : desc_(std::move(d)) {}
  virtual void do_advance(const TrtParams& p, const BodyForce& g,
                          long steps) = 0;

  KernelDescriptor desc_;
};

// Builds the kernel together with its lattice; all large allocations are
// initialized inside `pool` with the kernel's own compute partitioning
// (first-touch contract). `row_pad` is the manual full-array padding knob
// and is ignored by list kernels; `padding` applies to list SoA storage only.
std::unique_ptr<Kernel> make_kernel(const KernelDescriptor& desc,
                                    const FlagField& ff,
                                    const PaddingPolicy& padding,
                                    WorkerPool& pool, int row_pad = 0);

}  // namespace lbm
