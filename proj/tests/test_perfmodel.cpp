#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "lbm/microbench.hpp"
#include "lbm/perfmodel.hpp"

using namespace lbm;

TEST_CASE("loop balance reproduces every table entry") {
  const std::vector<std::pair<std::string, double>> expect = {
      {"blk-push-aos", 456}, {"blk-push-soa", 456}, {"blk-pull-aos", 456},
      {"blk-pull-soa", 456}, {"aa-aos", 304},       {"aa-soa", 304},
      {"aa-vec-soa", 304},   {"list-push-aos", 528}, {"list-push-soa", 528},
      {"list-pull-aos", 528}, {"list-pull-soa", 528},
      {"list-pull-split-nt-1s-soa", 376}, {"list-pull-split-nt-2s-soa", 376},
      {"list-aa-aos", 340},  {"list-aa-soa", 340}};
  for (const auto& [name, value] : expect) {
    const LoopBalance bl = loop_balance(make_descriptor(name));
    CAPTURE(name);
    CHECK(!bl.is_range());
    CHECK(bl.min_bflup == value);
  }
  for (const char* name : {"list-aa-ria-soa", "list-aa-pv-soa"}) {
    const LoopBalance bl = loop_balance(make_descriptor(name));
    CAPTURE(name);
    CHECK(bl.is_range());
    CHECK(bl.min_bflup == 304);
    CHECK(bl.max_bflup == 342);
  }
}

TEST_CASE("RIA loop balance hits both endpoints and the channel point") {
  const KernelDescriptor ria = make_descriptor("list-aa-ria-soa");
  // R -> 0: every node in one run
  CHECK(loop_balance(ria, RiaStats{0, 1000}).min_bflup ==
        doctest::Approx(304.0).epsilon(1e-12));
  // R = n_fluid: one run per node
  CHECK(loop_balance(ria, RiaStats{1000, 1000}).min_bflup ==
        doctest::Approx(342.0).epsilon(1e-12));
  // channel: R/n = 3/98
  const LoopBalance chan = loop_balance(ria, RiaStats{3, 98});
  CHECK(!chan.is_range());
  CHECK(std::abs(chan.min_bflup - 305.2) < 0.05);
}

TEST_CASE("loop balance breakdown adds up") {
  for (const std::string& name : kernel_names()) {
    const LoopBalance bl = loop_balance(make_descriptor(name));
    CHECK(bl.min_bflup == bl.pdf_read_bytes + bl.pdf_write_bytes +
                              bl.write_allocate_bytes + bl.index_bytes_min);
    CHECK(bl.max_bflup == bl.pdf_read_bytes + bl.pdf_write_bytes +
                              bl.write_allocate_bytes + bl.index_bytes_max);
  }
}

TEST_CASE("roofline arithmetic") {
  // copy-19 at 48.0 GB/s over 528 B/FLUP
  const RooflinePrediction a =
      roofline(48.0, loop_balance(make_descriptor("list-pull-aos")));
  CHECK(a.pmax_min_mflups == doctest::Approx(90.909).epsilon(1e-3));
  // update-19 at 51.1 GB/s over 304 B/FLUP
  const RooflinePrediction b =
      roofline(51.1, loop_balance(make_descriptor("aa-soa")));
  CHECK(b.pmax_min_mflups == doctest::Approx(168.1).epsilon(1e-3));

  CHECK_THROWS_AS(roofline(0.0, loop_balance(make_descriptor("aa-soa"))),
                  ConfigError);
  CHECK_THROWS_AS(roofline(-1.0, loop_balance(make_descriptor("aa-soa"))),
                  ConfigError);
}

TEST_CASE("roofline is monotone in B and B_l") {
  const LoopBalance lo = loop_balance(make_descriptor("aa-soa"));         // 304
  const LoopBalance hi = loop_balance(make_descriptor("list-pull-soa"));  // 528
  CHECK(roofline(50.0, lo).pmax_min_mflups >
        roofline(40.0, lo).pmax_min_mflups);
  CHECK(roofline(50.0, lo).pmax_min_mflups >
        roofline(50.0, hi).pmax_min_mflups);

  // range input -> range output, decreasing in B_l
  const RooflinePrediction r =
      roofline(50.0, loop_balance(make_descriptor("list-aa-ria-soa")));
  CHECK(r.is_range());
  CHECK(r.pmax_min_mflups == doctest::Approx(50.0 * 1000 / 342));
  CHECK(r.pmax_max_mflups == doctest::Approx(50.0 * 1000 / 304));
}

TEST_CASE("kernel to micro-benchmark mapping follows the table") {
  CHECK(micro_for(make_descriptor("blk-push-aos")) == MicroKind::Copy19);
  CHECK(micro_for(make_descriptor("list-pull-soa")) == MicroKind::Copy19);
  CHECK(micro_for(make_descriptor("list-pull-split-nt-1s-soa")) ==
        MicroKind::Copy19NtSl);
  CHECK(micro_for(make_descriptor("list-pull-split-nt-2s-soa")) ==
        MicroKind::Copy19NtSl);
  CHECK(micro_for(make_descriptor("aa-aos")) == MicroKind::Update19);
  CHECK(micro_for(make_descriptor("aa-vec-soa")) == MicroKind::Update19);
  CHECK(micro_for(make_descriptor("list-aa-pv-soa")) == MicroKind::Update19);
}

TEST_CASE("model report rows and stability") {
  BandwidthSet bw;
  bw.set(MicroKind::Copy19, 48.0);
  bw.set(MicroKind::Update19, 51.1);
  // no copy-19-nt-sl entry: nt rows must be marked unavailable

  std::vector<KernelDescriptor> ks;
  for (const std::string& name : kernel_names())
    ks.push_back(make_descriptor(name));
  const auto rows = model_report(bw, ks, RiaStats{3, 98});
  REQUIRE(rows.size() == 17);
  for (const ModelRow& r : rows) {
    CAPTURE(r.kernel);
    if (r.micro == MicroKind::Copy19NtSl)
      CHECK(!r.prediction.has_value());
    else
      CHECK(r.prediction.has_value());
  }
  // with geometry stats the ria rows collapse to the channel point
  CHECK(rows[15].kernel == "list-aa-ria-soa");
  CHECK(!rows[15].bl.is_range());
  CHECK(rows[15].bl.min_bflup == doctest::Approx(305.163).epsilon(1e-5));
  CHECK(rows[16].prediction->pmax_min_mflups ==
        doctest::Approx(51.1 * 1000 / 305.163).epsilon(1e-4));

  const std::string text1 = format_model_report(rows);
  const std::string text2 =
      format_model_report(model_report(bw, ks, RiaStats{3, 98}));
  CHECK(text1 == text2);
  CHECK(text1.find("copy-19-nt-sl") != std::string::npos);
  CHECK(text1.find("n/a") != std::string::npos);
}

TEST_CASE("bandwidth set save/load round-trip") {
  BandwidthSet bw;
  bw.set(MicroKind::Copy, 53.9);
  bw.set(MicroKind::Copy19, 48.0);
  bw.set(MicroKind::Copy19NtSl, 48.2);
  bw.set(MicroKind::Update19, 51.1);
  const std::string path = "/tmp/lbm_test_bandwidths.txt";
  bw.save(path);
  const BandwidthSet loaded = BandwidthSet::load(path);
  CHECK(loaded.gbps == bw.gbps);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(BandwidthSet::load("/nonexistent/bw.txt"), ConfigError);
  CHECK_THROWS_AS(micro_kind_from_string("copy-20"), ConfigError);
}

TEST_CASE("microbench accounting identities and protocol") {
  // tiny protocol keeps the test fast; the working-set minimum still applies
  const std::size_t ws = 4 * detect_llc_bytes() + (64u << 10);
  MicrobenchProtocol proto;
  proto.min_seconds = 0.02;
  proto.repetitions = 3;

  for (MicroKind kind : {MicroKind::Copy, MicroKind::Update19}) {
    const BandwidthMeasurement m = run_microbench(kind, ws, 1, proto);
    CAPTURE(to_string(kind));
    CHECK(m.gbps > 0.0);
    CHECK(m.passes >= 1);
    // reported GB/s x seconds = accounted bytes
    CHECK(m.gbps * m.seconds * 1e9 ==
          doctest::Approx(static_cast<double>(m.bytes_accounted))
              .epsilon(1e-12));
    // per-pass accounting: copy moves 24 B/element, update-19 16 B/element
    const std::size_t arrays = kind == MicroKind::Copy ? 2 : 19;
    const std::size_t elems = ws / (arrays * sizeof(double));
    const std::uint64_t per_pass =
        (kind == MicroKind::Copy ? 24ull * elems : 16ull * 19 * elems);
    CHECK(m.bytes_accounted == per_pass * m.passes);
  }

  CHECK_THROWS_AS(run_microbench(MicroKind::Copy, 1024, 1, proto),
                  ConfigError);
}
