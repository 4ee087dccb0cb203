#include "lbm/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbm/microbench.hpp"
#include "lbm/verification.hpp"

#if defined(__linux__)
#include <sys/utsname.h>
#endif

namespace lbm::cli {
namespace {

using nlohmann::json;

std::string iso_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string host_descriptor() {
#if defined(__linux__)
  utsname u{};
  if (uname(&u) == 0)
    return std::string(u.nodename) + " " + u.sysname + " " + u.release + " " +
           u.machine;
#endif
  return "unknown";
}

void parse_dims(const std::string& s, GeometrySpec& spec) {
  int nx, ny, nz;
  if (std::sscanf(s.c_str(), "%dx%dx%d", &nx, &ny, &nz) != 3)
    throw ConfigError("--dims expects NXxNYxNZ, e.g. --dims 500x100x100");
  spec.nx = nx;
  spec.ny = ny;
  spec.nz = nz;
}

std::vector<int> parse_pin(const std::string& s) {
  std::vector<int> cores;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      cores.push_back(std::stoi(item));
    } catch (...) {
      throw ConfigError("--pin expects a comma list of core ids, e.g. "
                        "--pin 0,1,2");
    }
  }
  return cores;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string padding_mode_of(const BenchConfig& cfg) {
  if (cfg.kernel.addr == Addressing::Direct)
    return cfg.row_pad > 0 ? "rowpad:" + std::to_string(cfg.row_pad) : "none";
  return cfg.padding.to_string();
}

json record_fields(const RunRecord& rec) {
  const BenchResult& r = rec.result;
  const BenchConfig& c = r.config;
  json j;
  j["schema_version"] = rec.schema_version;
  j["timestamp"] = rec.timestamp;
  j["kernel"] = c.kernel.name;
  j["geometry"] = to_string(c.geometry.kind);
  j["nx"] = c.geometry.nx;
  j["ny"] = c.geometry.ny;
  j["nz"] = c.geometry.nz;
  j["blk"] = c.kernel.blk;
  j["padding_mode"] = padding_mode_of(c);
  j["threads"] = c.workers;
  j["iterations"] = c.iterations;
  j["n_fluid"] = r.n_fluid;
  j["seconds"] = r.seconds;
  j["mflups"] = r.mflups;
  j["bl_theoretical"] = r.bl_min;
  j["pmax_mflups"] =
      r.pmax_min_mflups ? json(*r.pmax_min_mflups) : json(nullptr);
  j["v_fraction"] = r.v_fraction ? json(*r.v_fraction) : json(nullptr);
  j["nt_streams_effective"] = r.caps.nt_streams_effective;
  j["affinity_applied"] = r.affinity_applied ? 1 : 0;
  return j;
}

}  // namespace

RunRecord make_run_record(const BenchResult& result) {
  RunRecord rec;
  rec.timestamp = iso_timestamp();
  rec.host = host_descriptor();
  rec.result = result;
  return rec;
}

std::string csv_header() {
  return "schema_version,timestamp,kernel,geometry,nx,ny,nz,blk,padding_mode,"
         "threads,iterations,n_fluid,seconds,mflups,bl_theoretical,"
         "pmax_mflups,v_fraction,nt_streams_effective,affinity_applied";
}

std::string csv_row(const RunRecord& rec) {
  const BenchResult& r = rec.result;
  const BenchConfig& c = r.config;
  std::ostringstream out;
  out << rec.schema_version << ',' << rec.timestamp << ','
      << c.kernel.name << ',' << to_string(c.geometry.kind) << ','
      << c.geometry.nx << ',' << c.geometry.ny << ',' << c.geometry.nz << ','
      << c.kernel.blk << ',' << padding_mode_of(c) << ',' << c.workers << ','
      << c.iterations << ',' << r.n_fluid << ',' << fmt_double(r.seconds)
      << ',' << fmt_double(r.mflups) << ',' << fmt_double(r.bl_min) << ','
      << fmt_double(r.pmax_min_mflups ? *r.pmax_min_mflups
                                      : std::nan(""))
      << ','
      << fmt_double(r.v_fraction ? *r.v_fraction : std::nan("")) << ','
      << r.caps.nt_streams_effective << ',' << (r.affinity_applied ? 1 : 0);
  return out.str();
}

std::string record_json(const RunRecord& rec) {
  return record_fields(rec).dump();
}

std::string bench_result_to_json(const BenchResult& r) {
  const BenchConfig& c = r.config;
  json j;
  j["config"] = {
      {"kernel", c.kernel.name},
      {"blk", c.kernel.blk},
      {"vector_width", c.kernel.vector_width},
      {"geometry", to_string(c.geometry.kind)},
      {"nx", c.geometry.nx},
      {"ny", c.geometry.ny},
      {"nz", c.geometry.nz},
      {"block", c.geometry.block},
      {"spacing", c.geometry.spacing},
      {"iterations", c.iterations},
      {"warmup", c.warmup},
      {"workers", c.workers},
      {"pin", c.pin},
      {"padding", c.padding.to_string()},
      {"row_pad", c.row_pad},
      {"omega_plus", c.params.omega_plus},
      {"magic_lambda", c.params.magic_lambda},
      {"force", c.force.g},
      {"seed", c.seed ? json(*c.seed) : json(nullptr)},
  };
  j["n_fluid"] = r.n_fluid;
  j["seconds"] = r.seconds;
  j["mflups"] = r.mflups;
  j["bl_min"] = r.bl_min;
  j["bl_max"] = r.bl_max;
  j["pmax_min_mflups"] =
      r.pmax_min_mflups ? json(*r.pmax_min_mflups) : json(nullptr);
  j["pmax_max_mflups"] =
      r.pmax_max_mflups ? json(*r.pmax_max_mflups) : json(nullptr);
  j["v_fraction"] = r.v_fraction ? json(*r.v_fraction) : json(nullptr);
  j["caps"] = {{"nt_stores_available", r.caps.nt_stores_available},
               {"nt_streams_effective", r.caps.nt_streams_effective},
               {"huge_pages_advised", r.caps.huge_pages_advised}};
  j["affinity_applied"] = r.affinity_applied;
  json aff = json::array();
  for (const AffinityRecord& a : r.affinity)
    aff.push_back({{"worker", a.worker}, {"core", a.core},
                   {"applied", a.applied}});
  j["affinity"] = aff;
  j["state_hash"] = r.state_hash;
  return j.dump();
}

BenchResult bench_result_from_json(const std::string& text) {
  const json j = json::parse(text);
  const json& c = j.at("config");
  BenchResult r;
  r.config.kernel = make_descriptor(c.at("kernel").get<std::string>(),
                                    c.at("blk").get<int>(),
                                    c.at("vector_width").get<int>());
  r.config.geometry.kind =
      geometry_kind_from_string(c.at("geometry").get<std::string>());
  r.config.geometry.nx = c.at("nx").get<int>();
  r.config.geometry.ny = c.at("ny").get<int>();
  r.config.geometry.nz = c.at("nz").get<int>();
  r.config.geometry.block = c.at("block").get<int>();
  r.config.geometry.spacing = c.at("spacing").get<int>();
  r.config.iterations = c.at("iterations").get<long>();
  r.config.warmup = c.at("warmup").get<long>();
  r.config.workers = c.at("workers").get<int>();
  r.config.pin = c.at("pin").get<std::vector<int>>();
  r.config.padding = PaddingPolicy::parse(c.at("padding").get<std::string>());
  r.config.row_pad = c.at("row_pad").get<int>();
  r.config.params.omega_plus = c.at("omega_plus").get<double>();
  r.config.params.magic_lambda = c.at("magic_lambda").get<double>();
  r.config.force.g = c.at("force").get<std::array<double, 3>>();
  if (!c.at("seed").is_null())
    r.config.seed = c.at("seed").get<std::uint64_t>();
  r.n_fluid = j.at("n_fluid").get<std::size_t>();
  r.seconds = j.at("seconds").get<double>();
  r.mflups = j.at("mflups").get<double>();
  r.bl_min = j.at("bl_min").get<double>();
  r.bl_max = j.at("bl_max").get<double>();
  if (!j.at("pmax_min_mflups").is_null())
    r.pmax_min_mflups = j.at("pmax_min_mflups").get<double>();
  if (!j.at("pmax_max_mflups").is_null())
    r.pmax_max_mflups = j.at("pmax_max_mflups").get<double>();
  if (!j.at("v_fraction").is_null())
    r.v_fraction = j.at("v_fraction").get<double>();
  r.caps.nt_stores_available = j.at("caps").at("nt_stores_available");
  r.caps.nt_streams_effective = j.at("caps").at("nt_streams_effective");
  r.caps.huge_pages_advised = j.at("caps").at("huge_pages_advised");
  r.affinity_applied = j.at("affinity_applied").get<bool>();
  for (const json& a : j.at("affinity"))
    r.affinity.push_back({a.at("worker").get<int>(), a.at("core").get<int>(),
                          a.at("applied").get<bool>()});
  r.state_hash = j.at("state_hash").get<std::uint64_t>();
  return r;
}

namespace {

int cmd_list_kernels() {
  for (const std::string& name : kernel_names()) std::cout << name << '\n';
  return 0;
}

int cmd_geometry(const GeometrySpec& spec) {
  const FlagField ff = build_geometry(spec);
  const std::int64_t fluid = fluid_count(ff);
  json j;
  j["kind"] = to_string(spec.kind);
  j["dims"] = {spec.nx, spec.ny, spec.nz};
  j["periodic"] = ff.periodic;
  j["fluid_count"] = fluid;
  j["fluid_fraction"] =
      static_cast<double>(fluid) / static_cast<double>(ff.volume());
  if (spec.kind == GeometryKind::Blocks) {
    j["block"] = spec.block;
    j["spacing"] = spec.spacing;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& bandwidths_path,
              const std::string& out_path, const std::string& format) {
  std::optional<BandwidthSet> bw;
  if (!bandwidths_path.empty()) bw = BandwidthSet::load(bandwidths_path);

  const BenchResult result = run_benchmark(cfg, bw ? &*bw : nullptr);
  const RunRecord rec = make_run_record(result);

  std::cerr << "# host: " << rec.host << '\n';
  std::cerr << "# " << result.config.kernel.name << " "
            << to_string(result.config.geometry.kind) << " "
            << result.config.geometry.nx << "x" << result.config.geometry.ny
            << "x" << result.config.geometry.nz << ": " << result.mflups
            << " MFLUP/s";
  if (result.pmax_min_mflups)
    std::cerr << " (" << 100.0 * result.mflups / *result.pmax_min_mflups
              << "% of roofline P_max " << *result.pmax_min_mflups << ")";
  std::cerr << '\n';

  std::string text;
  if (format == "csv")
    text = csv_row(rec) + "\n";
  else if (format == "json")
    text = record_json(rec) + "\n";
  else
    throw ConfigError("--format must be csv or json, e.g. --format csv");

  if (out_path.empty()) {
    if (format == "csv") std::cout << csv_header() << '\n';
    std::cout << text;
    return 0;
  }
  const bool add_header =
      format == "csv" && (!std::filesystem::exists(out_path) ||
                          std::filesystem::file_size(out_path) == 0);
  std::ofstream out(out_path, std::ios::app);
  if (!out) throw ConfigError("cannot open --out file '" + out_path + "'");
  if (add_header) out << csv_header() << '\n';
  out << text;
  return 0;
}

int cmd_verify(const KernelDescriptor& k, const PoiseuilleCase& c, int threads,
               long interval, double tol, long max_steps) {
  const VerificationReport rep =
      verify_kernel(k, c, threads, interval, tol, max_steps);
  json j;
  j["kernel"] = rep.kernel;
  j["dims"] = {rep.setup.nx, rep.setup.ny, rep.setup.nz};
  j["g"] = rep.setup.g;
  j["omega_plus"] = rep.setup.params.omega_plus;
  j["magic_lambda"] = rep.setup.params.magic_lambda;
  j["viscosity"] = rep.setup.params.viscosity();
  j["half_force_shift"] = rep.half_force_shift;
  j["steps"] = rep.steps;
  j["converged"] = rep.converged;
  j["simulated_ux"] = rep.simulated;
  j["analytic_ux"] = rep.analytic;
  j["linf_rel"] = rep.linf_rel;
  j["l2_rel"] = rep.l2_rel;
  j["tolerance"] = kVerifyLinfTolerance;
  j["passed"] = rep.passed;
  std::cout << j.dump(2) << '\n';
  return rep.passed ? 0 : 3;
}

int cmd_microbench(const std::string& which, std::size_t size, int threads,
                   const MicrobenchProtocol& proto,
                   const std::string& out_path) {
  std::vector<MicroKind> kinds;
  if (which == "all")
    kinds = {MicroKind::Copy, MicroKind::Copy19, MicroKind::Copy19NtSl,
             MicroKind::Update19};
  else
    kinds = {micro_kind_from_string(which)};

  BandwidthSet set;
  if (!out_path.empty() && std::filesystem::exists(out_path))
    set = BandwidthSet::load(out_path);

  for (MicroKind kind : kinds) {
    const BandwidthMeasurement m =
        run_microbench(kind, size, effective_workers(threads), proto);
    std::printf("%-14s %8.2f GB/s  (%d passes x %" PRIu64
                " B, %.3f s, %d workers%s)\n",
                to_string(m.which), m.gbps, m.passes,
                m.bytes_accounted / m.passes, m.seconds, m.workers,
                m.nt_stores_used ? ", nt stores" : "");
    set.set(kind, m.gbps);
  }
  if (!out_path.empty()) set.save(out_path);
  return 0;
}

int cmd_model(const std::string& bandwidths_path, bool have_geometry,
              const GeometrySpec& spec, int blk, bool as_json) {
  BandwidthSet bw;
  if (!bandwidths_path.empty()) bw = BandwidthSet::load(bandwidths_path);

  std::optional<RiaStats> stats;
  if (have_geometry) {
    const FlagField ff = build_geometry(spec);
    const ListStructure ls = build_structure(
        ff, Layout::SoA, blk, PaddingPolicy::none(), Orientation::Scatter);
    const RiaCoding ria = build_ria(ls);
    stats = RiaStats{ria.total_runs(), ria.n_fluid};
  }

  std::vector<KernelDescriptor> ks;
  for (const std::string& name : kernel_names())
    ks.push_back(make_descriptor(name, blk));
  const std::vector<ModelRow> rows = model_report(bw, ks, stats);

  if (as_json) {
    json j = json::array();
    for (const ModelRow& r : rows) {
      json row;
      row["kernel"] = r.kernel;
      row["bl_min"] = r.bl.min_bflup;
      row["bl_max"] = r.bl.max_bflup;
      row["micro"] = to_string(r.micro);
      if (r.prediction) {
        row["pmax_min_mflups"] = r.prediction->pmax_min_mflups;
        row["pmax_max_mflups"] = r.prediction->pmax_max_mflups;
      } else {
        row["pmax_min_mflups"] = nullptr;
        row["pmax_max_mflups"] = nullptr;
      }
      j.push_back(row);
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << format_model_report(rows);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"lattice Boltzmann benchmark kernels (D3Q19, TRT)"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list-kernels", "list kernel names");

  // geometry
  auto* geo_cmd = app.add_subcommand("geometry", "geometry statistics");
  std::string geo_kind = "channel", geo_dims = "500x100x100";
  GeometrySpec geo_spec;
  bool geo_stats = false;
  geo_cmd->add_option("--kind", geo_kind, "channel|slit|pipe|blocks");
  geo_cmd->add_option("--dims", geo_dims, "NXxNYxNZ, e.g. 500x100x100");
  geo_cmd->add_option("--block", geo_spec.block, "blocks: obstacle edge");
  geo_cmd->add_option("--spacing", geo_spec.spacing, "blocks: fluid spacing");
  geo_cmd->add_flag("--stats", geo_stats, "print statistics (default)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a kernel benchmark");
  std::string b_kernel, b_geometry = "channel", b_dims = "500x100x100";
  std::string b_padding = "auto", b_pin, b_out, b_format = "csv";
  std::string b_bandwidths;
  BenchConfig bcfg;
  double b_tau = 0.9, b_lambda = 3.0 / 16.0, b_gx = 0.0;
  int b_blk = 0, b_vw = 4;
  std::int64_t b_seed = -1;
  bench_cmd->add_option("--kernel", b_kernel, "kernel name (see list-kernels)")
      ->required();
  bench_cmd->add_option("--geometry", b_geometry, "channel|slit|pipe|blocks");
  bench_cmd->add_option("--dims", b_dims, "NXxNYxNZ, e.g. 500x100x100");
  bench_cmd->add_option("--block", bcfg.geometry.block,
                        "blocks: obstacle edge");
  bench_cmd->add_option("--spacing", bcfg.geometry.spacing,
                        "blocks: fluid spacing");
  bench_cmd->add_option("--iterations", bcfg.iterations, "timed iterations");
  bench_cmd->add_option("--warmup", bcfg.warmup, "warmup iterations");
  bench_cmd->add_option("--threads", bcfg.workers, "worker threads");
  bench_cmd->add_option("--blk", b_blk, "loop blocking factor (0 = off)");
  bench_cmd->add_option("--padding", b_padding,
                        "none|auto|thrash|o0,o1,...,o18");
  bench_cmd->add_option("--row-pad", bcfg.row_pad,
                        "full-array elements of padding per z row");
  bench_cmd->add_option("--pin", b_pin, "core ids, e.g. 0,1,2");
  bench_cmd->add_option("--tau", b_tau, "TRT relaxation time 1/omega+");
  bench_cmd->add_option("--lambda", b_lambda, "TRT magic parameter");
  bench_cmd->add_option("--gx", b_gx, "body force along x");
  bench_cmd->add_option("--seed", b_seed,
                        "randomized initial perturbation seed");
  bench_cmd->add_option("--vector-width", b_vw, "pv/vec chunk width");
  bench_cmd->add_option("--bandwidths", b_bandwidths,
                        "bandwidth file for P_max (see microbench)");
  bench_cmd->add_option("--out", b_out, "append results to this file");
  bench_cmd->add_option("--format", b_format, "csv|json");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Poiseuille validation");
  std::string v_kernel, v_dims = "8x8x34";
  PoiseuilleCase vcase;
  double v_tau = 0.9, v_lambda = 3.0 / 16.0;
  int v_threads = 1;
  long v_interval = 200, v_max_steps = 200000;
  double v_tol = 1e-12;
  verify_cmd->add_option("--kernel", v_kernel, "kernel name")->required();
  verify_cmd->add_option("--dims", v_dims, "NXxNYxNZ, e.g. 8x8x34");
  verify_cmd->add_option("--g", vcase.g, "body force along x");
  verify_cmd->add_option("--tau", v_tau, "TRT relaxation time 1/omega+");
  verify_cmd->add_option("--lambda", v_lambda, "TRT magic parameter");
  verify_cmd->add_option("--threads", v_threads, "worker threads");
  verify_cmd->add_option("--interval", v_interval, "convergence check steps");
  verify_cmd->add_option("--tol", v_tol, "steady-state tolerance");
  verify_cmd->add_option("--max-steps", v_max_steps, "step limit");

  // microbench
  auto* micro_cmd = app.add_subcommand("microbench", "bandwidth benchmarks");
  std::string m_which = "all", m_out;
  std::size_t m_size = 1ull << 30;
  int m_threads = 1;
  MicrobenchProtocol proto;
  micro_cmd->add_option("--which", m_which,
                        "copy|copy-19|copy-19-nt-sl|update-19|all");
  micro_cmd->add_option("--size", m_size, "working set bytes (>= 4x LLC)");
  micro_cmd->add_option("--threads", m_threads, "worker threads");
  micro_cmd->add_option("--min-seconds", proto.min_seconds,
                        "minimum time per repetition");
  micro_cmd->add_option("--reps", proto.repetitions, "repetitions (median)");
  micro_cmd->add_option("--out", m_out, "write bandwidth file");

  // model
  auto* model_cmd = app.add_subcommand("model", "Roofline predictions");
  std::string mo_bandwidths, mo_geometry, mo_dims = "500x100x100";
  int mo_blk = 0, mo_block = 4, mo_spacing = 4;
  bool mo_json = false;
  model_cmd->add_option("--bandwidths", mo_bandwidths, "bandwidth file");
  model_cmd->add_option("--geometry", mo_geometry,
                        "geometry for RIA stats: channel|slit|pipe|blocks");
  model_cmd->add_option("--dims", mo_dims, "NXxNYxNZ");
  model_cmd->add_option("--blk", mo_blk, "blocking factor for RIA stats");
  model_cmd->add_option("--block", mo_block, "blocks: obstacle edge");
  model_cmd->add_option("--spacing", mo_spacing, "blocks: fluid spacing");
  model_cmd->add_flag("--json", mo_json, "JSON output");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (list_cmd->parsed()) return cmd_list_kernels();

    if (geo_cmd->parsed()) {
      geo_spec.kind = geometry_kind_from_string(geo_kind);
      parse_dims(geo_dims, geo_spec);
      (void)geo_stats;
      return cmd_geometry(geo_spec);
    }

    if (bench_cmd->parsed()) {
      bcfg.kernel = make_descriptor(b_kernel, b_blk, b_vw);
      bcfg.geometry.kind = geometry_kind_from_string(b_geometry);
      parse_dims(b_dims, bcfg.geometry);
      bcfg.padding = PaddingPolicy::parse(b_padding);
      if (!b_pin.empty()) bcfg.pin = parse_pin(b_pin);
      bcfg.params = TrtParams::from_tau(b_tau, b_lambda);
      bcfg.force.g = {b_gx, 0.0, 0.0};
      if (b_seed >= 0) bcfg.seed = static_cast<std::uint64_t>(b_seed);
      return cmd_bench(bcfg, b_bandwidths, b_out, b_format);
    }

    if (verify_cmd->parsed()) {
      const KernelDescriptor k = make_descriptor(v_kernel);
      GeometrySpec s;
      parse_dims(v_dims, s);
      vcase.nx = s.nx;
      vcase.ny = s.ny;
      vcase.nz = s.nz;
      vcase.params = TrtParams::from_tau(v_tau, v_lambda);
      return cmd_verify(k, vcase, v_threads, v_interval, v_tol, v_max_steps);
    }

    if (micro_cmd->parsed())
      return cmd_microbench(m_which, m_size, m_threads, proto, m_out);

    if (model_cmd->parsed()) {
      GeometrySpec spec;
      spec.block = mo_block;
      spec.spacing = mo_spacing;
      const bool have_geo = !mo_geometry.empty();
      if (have_geo) {
        spec.kind = geometry_kind_from_string(mo_geometry);
        parse_dims(mo_dims, spec);
      }
      return cmd_model(mo_bandwidths, have_geo, spec, mo_blk, mo_json);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace lbm::cli
