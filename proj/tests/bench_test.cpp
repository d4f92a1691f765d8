#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "otp/bench.hpp"
#include "test_util.hpp"

using namespace otp;
using namespace otp::bench;
using otp_test::TempDir;

namespace {

BenchOptions base_options(const std::filesystem::path& dir) {
    BenchOptions o;
    o.work_dir = dir;
    o.seed = 7;
    return o;
}

} // namespace

TEST_CASE("txt vendor sweep scales seal count by exactly 10x") {
    TempDir tmp("bench");
    BenchOptions o = base_options(tmp.path());
    o.variant = Variant::TxtOnly;
    o.axis = Axis::Vendor;
    o.sizes = {880, 8800, 88000};       // 22 / 220 / 2200 records
    o.fixed_client_bits = 224000;
    o.latency_ms = 500;
    auto rows = bench_sweep(o);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].seal_ops == 22);
    CHECK(rows[1].seal_ops == 220);
    CHECK(rows[2].seal_ops == 2200);
    CHECK(rows[0].unseal_ops == 22);
    CHECK(rows[2].unseal_ops == 2200);
    for (size_t i = 1; i < rows.size(); ++i) {
        double ratio = static_cast<double>(rows[i].prov_wall_ms) /
                       static_cast<double>(rows[i - 1].prov_wall_ms);
        CHECK(ratio == doctest::Approx(10.0).epsilon(0.1));
    }
}

TEST_CASE("txt client sweep keeps provisioning constant") {
    TempDir tmp("bench");
    BenchOptions o = base_options(tmp.path());
    o.variant = Variant::TxtOnly;
    o.axis = Axis::Client;
    o.sizes = {224, 2240, 22400, 224000};
    o.fixed_vendor_bits = 880;
    auto rows = bench_sweep(o);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.seal_ops == 22);
        CHECK(r.unseal_ops == 22);
    }
}

TEST_CASE("gc vendor sweep is flat: master key plus flag only") {
    TempDir tmp("bench");
    BenchOptions o = base_options(tmp.path());
    o.variant = Variant::GcBased;
    o.axis = Axis::Vendor;
    o.sizes = {880, 8800, 88000};
    o.fixed_client_bits = 224000;
    auto rows = bench_sweep(o);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.seal_ops == 2);
        CHECK(r.pair_count == 224000);
    }
    // Gate count varies with vendor records only.
    CHECK(rows[0].gate_count < rows[1].gate_count);
    CHECK(rows[1].gate_count < rows[2].gate_count);
    CHECK(rows[0].gate_count == geno::genomic_gate_count(22, 7000));
}

TEST_CASE("gc client sweep: one pair per client bit, growing circuit") {
    TempDir tmp("bench");
    BenchOptions o = base_options(tmp.path());
    o.variant = Variant::GcBased;
    o.axis = Axis::Client;
    o.sizes = {224, 2240, 22400, 224000};
    o.fixed_vendor_bits = 880;
    auto rows = bench_sweep(o);
    REQUIRE(rows.size() == 4);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].pair_count == o.sizes[i]);
        CHECK(rows[i].seal_ops == 2);
        if (i > 0) CHECK(rows[i].gate_count > rows[i - 1].gate_count);
    }
    // Linear growth in client bits: the ratio tracks the size ratio.
    double ratio = static_cast<double>(rows[3].gate_count) /
                   static_cast<double>(rows[1].gate_count);
    CHECK(ratio == doctest::Approx(100.0).epsilon(0.01));
}

TEST_CASE("desk-scale cap requires --big for the paper-scale client input") {
    TempDir tmp("bench");
    BenchOptions o = base_options(tmp.path());
    o.variant = Variant::GcBased;
    o.axis = Axis::Client;
    o.sizes = {22447296};
    try {
        bench_sweep(o);
        FAIL("paper-scale sweep ran without --big");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ResourceLimit);
    }
    CHECK_THROWS_AS(bench_sweep(BenchOptions{}), Error); // empty sizes
}

TEST_CASE("identical sweeps produce identical rows") {
    auto run = [] {
        TempDir tmp("bench");
        BenchOptions o = base_options(tmp.path());
        o.variant = Variant::GcBased;
        o.axis = Axis::Client;
        o.sizes = {224, 2240};
        o.fixed_vendor_bits = 880;
        o.latency_ms = 500;
        return bench_sweep(o);
    };
    auto a = run();
    auto b = run();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seal_ops == b[i].seal_ops);
        CHECK(a[i].unseal_ops == b[i].unseal_ops);
        CHECK(a[i].pair_count == b[i].pair_count);
        CHECK(a[i].gate_count == b[i].gate_count);
        CHECK(a[i].prov_wall_ms == b[i].prov_wall_ms);
    }
}

TEST_CASE("seal-all mode is counted per pair") {
    TempDir tmp("bench");
    BenchOptions o = base_options(tmp.path());
    o.variant = Variant::GcBased;
    o.axis = Axis::Client;
    o.sizes = {224};
    o.fixed_vendor_bits = 880;
    o.mode = otm::Mode::SealAll;
    auto rows = bench_sweep(o);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seal_ops == 225); // 224 pair blobs + flag init
    CHECK(rows[0].unseal_ops == 224);
}

TEST_CASE("render formats are stable and machine-parseable") {
    std::vector<BenchRow> rows(2);
    rows[0] = BenchRow{"txt", 880, 224, 22, 22, 0, 0, 11000, 11000};
    rows[1] = BenchRow{"gc", 880, 224, 2, 8, 224, 24640, 1000, 4000};

    std::string csv = render(rows, Format::Csv);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "variant,vendor_bits,client_bits,seal_ops,unseal_ops,pair_count,"
          "gate_count,prov_wall_ms,exec_wall_ms");
    CHECK(csv.find("txt,880,224,22,22,0,0,11000,11000") != std::string::npos);

    std::string json = render(rows, Format::Json);
    CHECK(json.front() == '[');
    CHECK(json.find("\"variant\": \"gc\"") != std::string::npos);
    CHECK(json.find("\"gate_count\": 24640") != std::string::npos);

    std::string table = render(rows, Format::Table);
    CHECK(table.find("seal_ops") != std::string::npos);
    CHECK(table.find("gc") != std::string::npos);
}

TEST_CASE("recommendation fixtures") {
    CHECK(recommend(880, 22447296) == "TXT-only");
    CHECK(recommend(88000, 224) == "GC-based");
    CHECK(recommend(880, 224) == "TXT-only");
    CHECK(recommend(8800, 224000) == "GC-based");
    CHECK(recommend(8800, 22447296) == "TXT-only");
}

TEST_CASE("synthetic input generators validate widths") {
    CHECK(synthetic_vendor(880).size() == 22);
    CHECK(synthetic_client(224).size() == 7);
    CHECK_THROWS_AS(synthetic_vendor(881), Error);
    CHECK_THROWS_AS(synthetic_client(0), Error);
    // Synthetic ids never collide across the two sides.
    auto v = synthetic_vendor(880);
    auto c = synthetic_client(224);
    CHECK(geno::risk_plain(v, c) == 0);
}

TEST_CASE("name lookups") {
    CHECK(variant_from_name("txt") == Variant::TxtOnly);
    CHECK(variant_from_name("gc") == Variant::GcBased);
    CHECK_THROWS_AS(variant_from_name("bogus"), Error);
    CHECK(axis_from_name("vendor") == Axis::Vendor);
    CHECK(axis_from_name("client") == Axis::Client);
    CHECK_THROWS_AS(axis_from_name(""), Error);
    CHECK(format_from_name("csv") == Format::Csv);
    CHECK(format_from_name("json") == Format::Json);
    CHECK(format_from_name("table") == Format::Table);
    CHECK_THROWS_AS(format_from_name("xml"), Error);
}
