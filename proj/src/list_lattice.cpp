#include "lbm/list_lattice.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

namespace lbm {

PaddingPolicy PaddingPolicy::parse(const std::string& s) {
  if (s == "none") return none();
  if (s == "auto") return automatic();
  if (s == "thrash") return thrash();
  PaddingPolicy p{Mode::Explicit, {}};
  std::stringstream ss(s);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n >= kQ) break;
    try {
      p.pads[n] = std::stoll(item);
    } catch (...) {
      throw ConfigError("padding: cannot parse pad count '" + item +
                        "' (example: --padding auto)");
    }
    if (p.pads[n] < 0) throw ConfigError("padding: pad counts must be >= 0");
    ++n;
  }
  if (n != kQ)
    throw ConfigError(
        "padding: expected 'none', 'auto', 'thrash' or 19 comma-separated pad "
        "counts (example: --padding auto)");
  return p;
}

std::string PaddingPolicy::to_string() const {
  switch (mode) {
    case Mode::None: return "none";
    case Mode::Auto: return "auto";
    case Mode::Thrash: return "thrash";
    case Mode::Explicit: {
      std::string out;
      for (int i = 0; i < kQ; ++i) {
        if (i) out += ',';
        out += std::to_string(pads[i]);
      }
      return out;
    }
  }
  return "?";
}

std::size_t cache_set_of(std::size_t element_offset) {
  return element_offset * sizeof(double) / kPadCacheLineBytes % kPadCacheSets;
}

std::size_t tlb_set_of(std::size_t element_offset) {
  return element_offset * sizeof(double) / kPadPageBytes % kPadTlbSets;
}

namespace {

// Elements per cache-set period and per page, in doubles.
constexpr std::size_t kSetPeriod =
    kPadCacheLineBytes * kPadCacheSets / sizeof(double);  // 4096
constexpr std::size_t kPageElems = kPadPageBytes / sizeof(double);  // 262144

// Smallest offset >= floor with the requested cache-set and TLB-set residues.
std::size_t place(std::size_t floor, std::size_t want_set,
                  std::size_t want_tlb) {
  const std::size_t line_elems = kPadCacheLineBytes / sizeof(double);
  std::size_t cand = floor;
  // align up to the cache-set residue
  const std::size_t res = want_set * line_elems;
  cand = (cand <= res) ? res : (cand - res + kSetPeriod - 1) / kSetPeriod *
                                       kSetPeriod +
                                   res;
  while (cand / kPageElems % kPadTlbSets != want_tlb) cand += kSetPeriod;
  return cand;
}

}  // namespace

std::array<std::size_t, kQ> padding_offsets(std::size_t n_fluid,
                                            const PaddingPolicy& policy,
                                            std::size_t* total_slots) {
  std::array<std::size_t, kQ> starts{};
  switch (policy.mode) {
    case PaddingPolicy::Mode::None:
      for (int d = 0; d < kQ; ++d) starts[d] = d * n_fluid;
      break;
    case PaddingPolicy::Mode::Explicit: {
      std::size_t off = 0;
      for (int d = 0; d < kQ; ++d) {
        off += static_cast<std::size_t>(policy.pads[d]);
        starts[d] = off;
        off += n_fluid;
      }
      break;
    }
    case PaddingPolicy::Mode::Auto: {
      const std::size_t step = kPadCacheSets / kQ;  // 26
      std::size_t floor = 0;
      for (int d = 0; d < kQ; ++d) {
        starts[d] = place(floor, d * step % kPadCacheSets, d % kPadTlbSets);
        floor = starts[d] + n_fluid;
      }
      break;
    }
    case PaddingPolicy::Mode::Thrash: {
      std::size_t floor = 0;
      for (int d = 0; d < kQ; ++d) {
        starts[d] = place(floor, 0, 0);
        floor = starts[d] + n_fluid;
      }
      break;
    }
  }
  if (total_slots) *total_slots = starts[kQ - 1] + n_fluid;
  return starts;
}

std::vector<Coord> order_nodes(const FlagField& ff, int blk) {
  if (blk < 0) throw ConfigError("blocking factor must be >= 0");
  std::vector<Coord> nodes;
  nodes.reserve(static_cast<std::size_t>(fluid_count(ff)));
  if (blk == 0) {
    for (int x = 0; x < ff.nx; ++x)
      for (int y = 0; y < ff.ny; ++y)
        for (int z = 0; z < ff.nz; ++z)
          if (ff.fluid(x, y, z)) nodes.push_back({x, y, z});
    return nodes;
  }
  for (int ty = 0; ty < ff.ny; ty += blk)
    for (int tz = 0; tz < ff.nz; tz += blk)
      for (int x = 0; x < ff.nx; ++x)
        for (int y = ty; y < std::min(ty + blk, ff.ny); ++y)
          for (int z = tz; z < std::min(tz + blk, ff.nz); ++z)
            if (ff.fluid(x, y, z)) nodes.push_back({x, y, z});
  return nodes;
}

std::size_t layer_condition_max_nodes(std::size_t cache_bytes, int workers,
                                      int layers, std::size_t bytes_per_node) {
  return cache_bytes / (static_cast<std::size_t>(workers) * layers *
                        bytes_per_node);
}

ListStructure build_structure(const FlagField& ff, Layout layout, int blk,
                              const PaddingPolicy& padding,
                              Orientation orientation, WorkerPool* pool) {
  ListStructure ls;
  ls.ff = &ff;
  ls.blk = blk;
  ls.orientation = orientation;
  ls.nodes = order_nodes(ff, blk);
  ls.n_fluid = ls.nodes.size();
  if (ls.n_fluid == 0) throw ConfigError("list lattice needs >= 1 fluid node");

  ls.rank.assign(ff.volume(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t n = 0; n < ls.nodes.size(); ++n) {
    const Coord& c = ls.nodes[n];
    ls.rank[ff.index(c.x, c.y, c.z)] = static_cast<std::uint32_t>(n);
  }

  ls.slots.layout = layout;
  if (layout == Layout::SoA) {
    ls.slots.starts = padding_offsets(ls.n_fluid, padding,
                                      &ls.slots.total_slots);
  } else {
    for (int d = 0; d < kQ; ++d) ls.slots.starts[d] = 0;
    ls.slots.total_slots = ls.n_fluid * kQ;
  }

  ls.adj = NumaBuffer<std::uint32_t>(ls.n_fluid * 18);

  auto build_range = [&](std::size_t first, std::size_t last) {
    for (std::size_t n = first; n < last; ++n) {
      const Coord& c = ls.nodes[n];
      for (int d = 1; d < kQ; ++d) {
        const int look = orientation == Orientation::Gather ? kOpp[d] : d;
        const NeighborResult nb = neighbor(ff, c, look);
        std::size_t slot;
        if (nb.kind == NeighborResult::Kind::Coordinate) {
          const std::uint32_t m = ls.rank[ff.index(nb.c.x, nb.c.y, nb.c.z)];
          slot = ls.slots.slot(m, d);
        } else {
          slot = ls.slots.slot(n, kOpp[d]);  // bounce-back closure
        }
        ls.adj[n * 18 + (d - 1)] = static_cast<std::uint32_t>(slot);
      }
    }
  };

  if (pool) {
    pool->run([&](int w) {
      auto [first, last] = WorkerPool::partition(ls.n_fluid, pool->size(), w);
      build_range(first, last);
    });
  } else {
    build_range(0, ls.n_fluid);
  }
  return ls;
}

RiaCoding build_ria(const ListStructure& ls) {
  RiaCoding ria;
  ria.n_fluid = ls.n_fluid;
  std::array<std::int32_t, 18> pattern{};
  for (std::size_t n = 0; n < ls.n_fluid; ++n) {
    std::array<std::int32_t, 18> pat;
    for (int d = 1; d < kQ; ++d)
      pat[d - 1] = static_cast<std::int32_t>(
          static_cast<std::int64_t>(ls.entry(n, d)) -
          static_cast<std::int64_t>(ls.slots.slot(n, d)));
    if (!ria.runs.empty() && pat == pattern &&
        ria.runs.back().length <
            std::numeric_limits<std::uint32_t>::max()) {
      ++ria.runs.back().length;
    } else {
      pattern = pat;
      ria.runs.push_back({static_cast<std::uint32_t>(n), 1, pat});
    }
  }
  return ria;
}

double vectorizable_fraction(const RiaCoding& ria, int vector_width) {
  if (vector_width < 1) throw ConfigError("vector width must be >= 1");
  if (ria.n_fluid == 0) return 0.0;
  std::size_t covered = 0;
  for (const RiaRun& r : ria.runs)
    covered += static_cast<std::size_t>(r.length) / vector_width *
               vector_width;
  return static_cast<double>(covered) / static_cast<double>(ria.n_fluid);
}

ListLattice::ListLattice(const FlagField& ff, Layout layout, int blk,
                         const PaddingPolicy& padding, Orientation orientation,
                         int buffers, WorkerPool* pool, bool defer_pdf_init)
    : structure_(build_structure(ff, layout, blk, padding, orientation, pool)),
      buffers_(buffers) {
  if (buffers != 1 && buffers != 2)
    throw ConfigError("ListLattice: buffers must be 1 or 2");
  for (int b = 0; b < buffers; ++b)
    pdf_[b] = NumaBuffer<double>(structure_.slots.total_slots);
  if (defer_pdf_init) return;
  if (pool) {
    pool->run([&](int w) {
      auto [first, last] =
          WorkerPool::partition(structure_.n_fluid, pool->size(), w);
      for (int b = 0; b < buffers_; ++b) init_range(b, first, last);
    });
  } else {
    for (int b = 0; b < buffers_; ++b) init_range(b, 0, structure_.n_fluid);
  }
}

void ListLattice::init_range(int buffer, std::size_t first, std::size_t last) {
  double* f = pdf_[buffer].data();
  const SlotMap& sm = structure_.slots;
  for (std::size_t n = first; n < last; ++n)
    for (int d = 0; d < kQ; ++d) f[sm.slot(n, d)] = kW[d];
}

std::vector<double> ListLattice::snapshot() const {
  const FlagField& ff = *structure_.ff;
  const SlotMap& sm = structure_.slots;
  const double* f = src();
  std::vector<double> out;
  out.reserve(structure_.n_fluid * kQ);
  for (int x = 0; x < ff.nx; ++x)
    for (int y = 0; y < ff.ny; ++y)
      for (int z = 0; z < ff.nz; ++z) {
        const std::uint32_t n = structure_.rank[ff.index(x, y, z)];
        if (n == std::numeric_limits<std::uint32_t>::max()) continue;
        for (int d = 0; d < kQ; ++d) out.push_back(f[sm.slot(n, d)]);
      }
  return out;
}

double ListLattice::total_mass() const {
  const SlotMap& sm = structure_.slots;
  const double* f = src();
  double sum = 0.0, carry = 0.0;
  for (std::size_t n = 0; n < structure_.n_fluid; ++n)
    for (int d = 0; d < kQ; ++d) {
      const double v = f[sm.slot(n, d)] - carry;
      const double t = sum + v;
      carry = (t - sum) - v;
      sum = t;
    }
  return sum;
}

void ListLattice::load_state(std::span<const double> state) {
  const FlagField& ff = *structure_.ff;
  const SlotMap& sm = structure_.slots;
  double* f = pdf_[src_].data();
  std::size_t k = 0;
  for (int x = 0; x < ff.nx; ++x)
    for (int y = 0; y < ff.ny; ++y)
      for (int z = 0; z < ff.nz; ++z) {
        const std::uint32_t n = structure_.rank[ff.index(x, y, z)];
        if (n == std::numeric_limits<std::uint32_t>::max()) continue;
        for (int d = 0; d < kQ; ++d) f[sm.slot(n, d)] = state[k++];
      }
  if (k != state.size())
    throw ConfigError("load_state: state size does not match fluid count");
}

}  // namespace lbm
