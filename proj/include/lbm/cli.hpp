#pragma once

#include <string>
#include <vector>

#include "lbm/harness.hpp"

namespace lbm::cli {

// Flattened benchmark record with the fixed CSV column order:
// schema_version, timestamp, kernel, geometry, nx, ny, nz, blk,
// padding_mode, threads, iterations, n_fluid, seconds, mflups,
// bl_theoretical, pmax_mflups, v_fraction, nt_streams_effective,
// affinity_applied
struct RunRecord {
  int schema_version = 1;
  std::string timestamp;  // ISO-8601 UTC
  std::string host;       // free text, printed in the banner only
  BenchResult result;
};

RunRecord make_run_record(const BenchResult& result);

std::string csv_header();
std::string csv_row(const RunRecord& rec);
std::string record_json(const RunRecord& rec);  // same fields as the CSV row

// Lossless BenchResult serialization (config echo included).
std::string bench_result_to_json(const BenchResult& r);
BenchResult bench_result_from_json(const std::string& text);

// Entry point behind main(): 0 success, 1 configuration error, 2 numerical
// failure, 3 verification failure.
int run(const std::vector<std::string>& args);

}  // namespace lbm::cli
