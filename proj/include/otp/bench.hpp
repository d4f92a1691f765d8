#ifndef OTP_BENCH_HPP
#define OTP_BENCH_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "otp/otm.hpp"
#include "otp/otp.hpp"

namespace otp::bench {

enum class Variant { TxtOnly, GcBased };
enum class Axis { Vendor, Client };
enum class Format { Table, Csv, Json };

Variant variant_from_name(const std::string& name);
Axis axis_from_name(const std::string& name);
Format format_from_name(const std::string& name);

struct BenchRow {
    std::string variant;
    uint64_t vendor_bits = 0;
    uint64_t client_bits = 0;
    uint64_t seal_ops = 0;   // provisioning-side sealing operations
    uint64_t unseal_ops = 0; // execution-side unsealing operations
    uint64_t pair_count = 0; // OTM label pairs (GC only)
    uint64_t gate_count = 0; // circuit size (GC only)
    // Modeled wall clock under the latency profile: ops x latency_ms.
    // Zero when the latency model is off.
    uint64_t prov_wall_ms = 0;
    uint64_t exec_wall_ms = 0;
};

struct BenchOptions {
    Variant variant = Variant::TxtOnly;
    Axis axis = Axis::Vendor;
    std::vector<uint64_t> sizes; // bit widths to sweep
    uint64_t fixed_vendor_bits = 880;
    uint64_t fixed_client_bits = 224000;
    otm::Mode mode = otm::Mode::MasterKey;
    unsigned latency_ms = 0;
    bool big = false; // lifts the desk-scale cap
    uint64_t cap_bits = 2240000;
    uint64_t seed = 1;
    std::filesystem::path work_dir;
    // Above this many gates the GC pipeline is driven with synthetic
    // label pairs and the (verified) closed-form gate count; garbling a
    // multi-gigabyte circuit is not desk-reproducible.
    uint64_t garble_gate_cap = 2000000;
};

std::vector<geno::SnpRecord> synthetic_vendor(uint64_t bits);
std::vector<geno::SnpRecord> synthetic_client(uint64_t bits);

// Runs the requested pipeline per size on a fresh box and reports exact
// instrumented counts.
std::vector<BenchRow> bench_sweep(const BenchOptions& options);

std::string render(const std::vector<BenchRow>& rows, Format format);

// Table-5 quadrant policy: GC-based iff the vendor input is large
// (>= 8,800 bits) and the client input small (<= 224,000 bits).
std::string recommend(uint64_t vendor_bits, uint64_t client_bits);

} // namespace otp::bench

#endif
