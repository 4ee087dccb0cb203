#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lbm/cli.hpp"

using namespace lbm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("csv header is stable and complete") {
  const std::string header = cli::csv_header();
  CHECK(header ==
        "schema_version,timestamp,kernel,geometry,nx,ny,nz,blk,padding_mode,"
        "threads,iterations,n_fluid,seconds,mflups,bl_theoretical,"
        "pmax_mflups,v_fraction,nt_streams_effective,affinity_applied");
  CHECK(header == cli::csv_header());
}

TEST_CASE("csv row and json carry the same information") {
  BenchConfig cfg;
  cfg.kernel = make_descriptor("list-aa-soa");
  cfg.geometry = {GeometryKind::Blocks, 12, 10, 10, 4, 4};
  cfg.iterations = 10;
  cfg.warmup = 2;
  cfg.workers = 1;
  cfg.seed = 9;
  const BenchResult result = run_benchmark(cfg);
  cli::RunRecord rec = cli::make_run_record(result);
  rec.timestamp = "2000-01-01T00:00:00Z";  // fixed for comparison

  const std::string row = cli::csv_row(rec);
  const std::string json = cli::record_json(rec);

  // same number of fields as header columns
  const std::string header = cli::csv_header();
  const auto count = [](const std::string& s, char c) {
    return std::count(s.begin(), s.end(), c);
  };
  CHECK(count(row, ',') == count(header, ','));
  for (const char* token :
       {"list-aa-soa", "blocks", "340", "2000-01-01T00:00:00Z"}) {
    CAPTURE(token);
    CHECK(row.find(token) != std::string::npos);
    CHECK(json.find(token) != std::string::npos);
  }
}

TEST_CASE("bench result JSON round-trips losslessly") {
  BenchConfig cfg;
  cfg.kernel = make_descriptor("list-aa-pv-soa", 8);
  cfg.geometry = {GeometryKind::Blocks, 12, 10, 10, 4, 4};
  cfg.iterations = 10;
  cfg.warmup = 2;
  cfg.workers = 2;
  cfg.pin = {0};
  cfg.seed = 4;
  BandwidthSet bw;
  bw.set(MicroKind::Update19, 51.1);
  const BenchResult a = run_benchmark(cfg, &bw);

  const std::string text = cli::bench_result_to_json(a);
  const BenchResult b = cli::bench_result_from_json(text);
  CHECK(b.config.kernel.name == a.config.kernel.name);
  CHECK(b.config.kernel.blk == a.config.kernel.blk);
  CHECK(b.config.geometry.nx == a.config.geometry.nx);
  CHECK(b.config.pin == a.config.pin);
  CHECK(b.config.seed == a.config.seed);
  CHECK(b.n_fluid == a.n_fluid);
  CHECK(b.seconds == a.seconds);
  CHECK(b.mflups == a.mflups);
  CHECK(b.bl_min == a.bl_min);
  CHECK(b.bl_max == a.bl_max);
  CHECK(b.pmax_min_mflups == a.pmax_min_mflups);
  CHECK(b.v_fraction == a.v_fraction);
  CHECK(b.state_hash == a.state_hash);
  CHECK(b.affinity_applied == a.affinity_applied);
  CHECK(cli::bench_result_to_json(b) == text);
}

TEST_CASE("list-kernels prints exactly the 17 names") {
  CHECK(cli::run({"list-kernels"}) == 0);
  CHECK(kernel_names().size() == 17);
}

TEST_CASE("unknown kernel exits 1") {
  CHECK(cli::run({"bench", "--kernel", "bogus-kernel"}) == 1);
  CHECK(cli::run({"verify", "--kernel", "bogus-kernel"}) == 1);
}

TEST_CASE("configuration errors exit 1") {
  // odd iterations with an AA kernel
  CHECK(cli::run({"bench", "--kernel", "aa-soa", "--geometry", "blocks",
                  "--dims", "12x10x10", "--iterations", "5"}) == 1);
  // bad dims syntax
  CHECK(cli::run({"geometry", "--kind", "channel", "--dims", "chunky"}) == 1);
  // bad geometry kind
  CHECK(cli::run({"geometry", "--kind", "torus", "--dims", "4x4x4"}) == 1);
  // bad padding
  CHECK(cli::run({"bench", "--kernel", "list-aa-soa", "--geometry", "blocks",
                  "--dims", "12x10x10", "--iterations", "2", "--padding",
                  "1,2,3"}) == 1);
}

TEST_CASE("geometry subcommand emits fluid statistics") {
  CHECK(cli::run({"geometry", "--kind", "blocks", "--dims", "16x16x16",
                  "--block", "4", "--spacing", "4", "--stats"}) == 0);
}

TEST_CASE("bench appends CSV rows with one header") {
  const std::string path = "/tmp/lbm_cli_test.csv";
  std::filesystem::remove(path);
  for (int i = 0; i < 2; ++i)
    CHECK(cli::run({"bench", "--kernel", "list-aa-soa", "--geometry",
                    "blocks", "--dims", "12x10x10", "--iterations", "4",
                    "--warmup", "0", "--threads", "1", "--out", path}) == 0);
  const std::string text = slurp(path);
  std::size_t headers = 0, lines = 0;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    ++lines;
    if (line.rfind("schema_version", 0) == 0) ++headers;
  }
  CHECK(headers == 1);
  CHECK(lines == 3);
  std::filesystem::remove(path);
}

TEST_CASE("model subcommand works with and without bandwidths") {
  const std::string path = "/tmp/lbm_cli_bw.txt";
  {
    BandwidthSet bw;
    bw.set(MicroKind::Copy19, 48.0);
    bw.set(MicroKind::Copy19NtSl, 48.2);
    bw.set(MicroKind::Update19, 51.1);
    bw.save(path);
  }
  CHECK(cli::run({"model", "--bandwidths", path}) == 0);
  CHECK(cli::run({"model", "--bandwidths", path, "--geometry", "blocks",
                  "--dims", "12x10x10", "--json"}) == 0);
  CHECK(cli::run({"model"}) == 0);  // all rows n/a
  CHECK(cli::run({"model", "--bandwidths", "/nonexistent"}) == 1);
  std::filesystem::remove(path);
}

TEST_CASE("verify subcommand exit codes") {
  // quick passing case
  CHECK(cli::run({"verify", "--kernel", "list-aa-soa", "--dims", "4x4x14",
                  "--interval", "400", "--tol", "1e-11"}) == 0);
  // not converged within the step budget: verification failure
  CHECK(cli::run({"verify", "--kernel", "list-aa-soa", "--dims", "4x4x14",
                  "--interval", "100", "--tol", "1e-14", "--max-steps",
                  "200"}) == 3);
}
