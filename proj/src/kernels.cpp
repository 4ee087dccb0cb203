#include "lbm/kernels.hpp"

#include <algorithm>

#include "kernels_impl.hpp"

namespace lbm {

const char* to_string(Propagation p) {
  switch (p) {
    case Propagation::OsPush: return "os-push";
    case Propagation::OsPull: return "os-pull";
    case Propagation::Aa: return "aa";
  }
  return "?";
}

const char* to_string(Addressing a) {
  return a == Addressing::Direct ? "direct" : "indirect";
}

const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names = {
      "blk-push-aos",
      "blk-push-soa",
      "blk-pull-aos",
      "blk-pull-soa",
      "aa-aos",
      "aa-soa",
      "aa-vec-soa",
      "list-push-aos",
      "list-push-soa",
      "list-pull-aos",
      "list-pull-soa",
      "list-pull-split-nt-1s-soa",
      "list-pull-split-nt-2s-soa",
      "list-aa-aos",
      "list-aa-soa",
      "list-aa-ria-soa",
      "list-aa-pv-soa",
  };
  return names;
}

bool is_kernel_name(const std::string& name) {
  const auto& names = kernel_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

KernelDescriptor make_descriptor(const std::string& name, int blk,
                                 int vector_width) {
  if (!is_kernel_name(name)) {
    std::string msg = "unknown kernel '" + name + "'; valid kernels:";
    for (const auto& n : kernel_names()) msg += "\n  " + n;
    throw ConfigError(msg);
  }
  if (blk < 0) throw ConfigError("--blk must be >= 0, e.g. --blk 8");
  if (vector_width < 1 || vector_width > 8)
    throw ConfigError("vector width must be in [1, 8]");

  KernelDescriptor d;
  d.name = name;
  d.blk = blk;
  d.vector_width = vector_width;
  d.layout = name.ends_with("aos") ? Layout::AoS : Layout::SoA;
  d.addr = name.starts_with("list-") ? Addressing::Indirect
                                     : Addressing::Direct;

  if (name.find("push") != std::string::npos) {
    d.prop = Propagation::OsPush;
  } else if (name.find("pull") != std::string::npos) {
    d.prop = Propagation::OsPull;
  } else {
    d.prop = Propagation::Aa;
  }
  if (name.find("nt-1s") != std::string::npos) d.nt_streams = 1;
  if (name.find("nt-2s") != std::string::npos) d.nt_streams = 2;
  d.vec = name == "aa-vec-soa";
  d.ria = name == "list-aa-ria-soa" || name == "list-aa-pv-soa";
  d.pv = name == "list-aa-pv-soa";
  return d;
}

void Kernel::advance(const TrtParams& p, const BodyForce& g, long steps) {
  if (steps < 0) throw ConfigError("advance: steps must be >= 0");
  p.validate();
  if (desc_.prop == Propagation::Aa && steps % 2 != 0)
    throw ConfigError("kernel '" + desc_.name +
                      "' uses the AA pattern and requires an even step count, "
                      "got " + std::to_string(steps));
  if (steps == 0) return;
  do_advance(p, g, steps);
}

std::unique_ptr<Kernel> make_kernel(const KernelDescriptor& desc,
                                    const FlagField& ff,
                                    const PaddingPolicy& padding,
                                    WorkerPool& pool, int row_pad) {
  if (desc.addr == Addressing::Direct) {
    if (desc.prop == Propagation::Aa)
      return detail::make_full_aa(desc, ff, pool, row_pad);
    return detail::make_full_os(desc, ff, pool, row_pad);
  }
  if (desc.nt_streams > 0)
    return detail::make_list_nt(desc, ff, padding, pool);
  if (desc.prop == Propagation::Aa)
    return detail::make_list_aa(desc, ff, padding, pool);
  return detail::make_list_os(desc, ff, padding, pool);
}

}  // namespace lbm
