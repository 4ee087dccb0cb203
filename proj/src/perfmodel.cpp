#include "lbm/perfmodel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lbm {

LoopBalance loop_balance(const KernelDescriptor& k,
                         std::optional<RiaStats> geom_stats) {
  LoopBalance bl;
  bl.pdf_read_bytes = 8.0 * kQ;
  bl.pdf_write_bytes = 8.0 * kQ;

  const bool os = k.prop != Propagation::Aa;
  const bool nt = k.nt_streams > 0;
  if (os && !nt) bl.write_allocate_bytes = 8.0 * kQ;

  if (k.addr == Addressing::Indirect) {
    if (k.ria) {
      // 76 B of run metadata, amortized over the run and the even/odd pair
      if (geom_stats && geom_stats->n_fluid > 0) {
        const double per_flup = 76.0 * static_cast<double>(
                                           geom_stats->total_runs) /
                                (2.0 * static_cast<double>(
                                           geom_stats->n_fluid));
        bl.index_bytes_min = bl.index_bytes_max =
            std::clamp(per_flup, 0.0, 38.0);
      } else {
        bl.index_bytes_min = 0.0;
        bl.index_bytes_max = 38.0;
      }
    } else if (os) {
      bl.index_bytes_min = bl.index_bytes_max = 18.0 * 4.0;
    } else {
      // adjacency read only in the odd step of the pair
      bl.index_bytes_min = bl.index_bytes_max = 18.0 * 4.0 / 2.0;
    }
  }

  const double base =
      bl.pdf_read_bytes + bl.pdf_write_bytes + bl.write_allocate_bytes;
  bl.min_bflup = base + bl.index_bytes_min;
  bl.max_bflup = base + bl.index_bytes_max;
  return bl;
}

const char* to_string(MicroKind m) {
  switch (m) {
    case MicroKind::Copy: return "copy";
    case MicroKind::Copy19: return "copy-19";
    case MicroKind::Copy19NtSl: return "copy-19-nt-sl";
    case MicroKind::Update19: return "update-19";
  }
  return "?";
}

MicroKind micro_kind_from_string(const std::string& s) {
  if (s == "copy") return MicroKind::Copy;
  if (s == "copy-19") return MicroKind::Copy19;
  if (s == "copy-19-nt-sl") return MicroKind::Copy19NtSl;
  if (s == "update-19") return MicroKind::Update19;
  throw ConfigError("unknown micro-benchmark '" + s +
                    "' (valid: copy, copy-19, copy-19-nt-sl, update-19)");
}

MicroKind micro_for(const KernelDescriptor& k) {
  if (k.nt_streams > 0) return MicroKind::Copy19NtSl;
  if (k.prop == Propagation::Aa) return MicroKind::Update19;
  return MicroKind::Copy19;
}

RooflinePrediction roofline(double gbps, const LoopBalance& bl) {
  if (!(gbps > 0.0))
    throw ConfigError("roofline: bandwidth must be positive, got " +
                      std::to_string(gbps));
  if (!(bl.min_bflup > 0.0) || !(bl.max_bflup > 0.0))
    throw ConfigError("roofline: loop balance must be positive");
  RooflinePrediction r;
  r.gbps = gbps;
  r.min_bflup = bl.min_bflup;
  r.max_bflup = bl.max_bflup;
  r.pmax_min_mflups = gbps * 1000.0 / bl.max_bflup;
  r.pmax_max_mflups = gbps * 1000.0 / bl.min_bflup;
  return r;
}

std::optional<double> BandwidthSet::get(MicroKind m) const {
  auto it = gbps.find(to_string(m));
  if (it == gbps.end()) return std::nullopt;
  return it->second;
}

void BandwidthSet::set(MicroKind m, double value) {
  gbps[to_string(m)] = value;
}

void BandwidthSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write bandwidth file '" + path + "'");
  out << "# micro-benchmark bandwidths [GB/s]\n";
  for (const auto& [name, value] : gbps) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    out << name << ' ' << buf << '\n';
  }
}

BandwidthSet BandwidthSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read bandwidth file '" + path + "'");
  BandwidthSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name;
    double value;
    if (!(ss >> name >> value))
      throw ConfigError("bandwidth file '" + path + "': bad line '" + line +
                        "'");
    set.gbps[name] = value;
  }
  return set;
}

std::vector<ModelRow> model_report(const BandwidthSet& bandwidths,
                                   const std::vector<KernelDescriptor>& ks,
                                   std::optional<RiaStats> geom_stats) {
  std::vector<ModelRow> rows;
  rows.reserve(ks.size());
  for (const KernelDescriptor& k : ks) {
    ModelRow row;
    row.kernel = k.name;
    row.bl = loop_balance(k, geom_stats);
    row.micro = micro_for(k);
    if (auto b = bandwidths.get(row.micro))
      row.prediction = roofline(*b, row.bl);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_model_report(const std::vector<ModelRow>& rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-26s %12s %15s %16s\n", "kernel",
                "B_l [B/FLUP]", "micro-benchmark", "P_max [MFLUP/s]");
  out += line;
  for (const ModelRow& r : rows) {
    char bl[32], pm[32];
    if (r.bl.is_range())
      std::snprintf(bl, sizeof(bl), "%.1f-%.1f", r.bl.min_bflup,
                    r.bl.max_bflup);
    else
      std::snprintf(bl, sizeof(bl), "%.1f", r.bl.min_bflup);
    if (!r.prediction) {
      std::snprintf(pm, sizeof(pm), "%s", "n/a");
    } else if (r.prediction->is_range()) {
      std::snprintf(pm, sizeof(pm), "%.1f-%.1f",
                    r.prediction->pmax_min_mflups,
                    r.prediction->pmax_max_mflups);
    } else {
      std::snprintf(pm, sizeof(pm), "%.1f", r.prediction->pmax_min_mflups);
    }
    std::snprintf(line, sizeof(line), "%-26s %12s %15s %16s\n",
                  r.kernel.c_str(), bl, to_string(r.micro), pm);
    out += line;
  }
  return out;
}

}  // namespace lbm
