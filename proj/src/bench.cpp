#include "otp/bench.hpp"

#include <sstream>

namespace otp::bench {

namespace fs = std::filesystem;

Variant variant_from_name(const std::string& name) {
    if (name == "txt") return Variant::TxtOnly;
    if (name == "gc") return Variant::GcBased;
    throw Error(ErrorCode::ParseError, "unknown variant '" + name + "'");
}

Axis axis_from_name(const std::string& name) {
    if (name == "vendor") return Axis::Vendor;
    if (name == "client") return Axis::Client;
    throw Error(ErrorCode::ParseError, "unknown sweep axis '" + name + "'");
}

Format format_from_name(const std::string& name) {
    if (name == "table") return Format::Table;
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw Error(ErrorCode::ParseError, "unknown format '" + name + "'");
}

std::vector<geno::SnpRecord> synthetic_vendor(uint64_t bits) {
    if (bits == 0 || bits % 40 != 0)
        throw Error(ErrorCode::ParseError,
                    "vendor bit width must be a positive multiple of 40");
    std::vector<geno::SnpRecord> records(bits / 40);
    for (size_t i = 0; i < records.size(); ++i) {
        records[i].snp_id = static_cast<uint32_t>(i + 1);
        records[i].allele_code = static_cast<uint8_t>(i % 10);
        records[i].risk_deci = 10;
        records[i].has_risk = true;
    }
    return records;
}

std::vector<geno::SnpRecord> synthetic_client(uint64_t bits) {
    if (bits == 0 || bits % 32 != 0)
        throw Error(ErrorCode::ParseError,
                    "client bit width must be a positive multiple of 32");
    std::vector<geno::SnpRecord> records(bits / 32);
    for (size_t i = 0; i < records.size(); ++i) {
        records[i].snp_id = static_cast<uint32_t>(50000000 + i);
        records[i].allele_code = static_cast<uint8_t>(i % 10);
    }
    return records;
}

namespace {

BenchRow run_txt(const BenchOptions& options, uint64_t vendor_bits,
                 uint64_t client_bits, const fs::path& box_dir) {
    crypto::Rng rng(options.seed ^ vendor_bits ^ (client_bits << 1));
    flow::Box box = flow::Box::create(box_dir, rng);

    std::vector<geno::SnpRecord> vendor = synthetic_vendor(vendor_bits);
    std::vector<geno::SnpRecord> client = synthetic_client(client_bits);

    BenchRow row;
    row.variant = "txt";
    row.vendor_bits = vendor_bits;
    row.client_bits = client_bits;

    {
        tee::TeeSession session = flow::launch(box, flow::kTxtProvisionImage);
        box.tpm->counters().reset();
        flow::txt_provision(session, vendor, box.hd());
        row.seal_ops = box.tpm->counters().seal_ops;
    }
    {
        tee::TeeSession session = flow::launch(box, flow::kTxtExecuteImage);
        box.tpm->counters().reset();
        flow::TxtOnlyImage image =
            flow::TxtOnlyImage::load(box.hd() / "txt" / "image.bin");
        flow::txt_execute(session, image, client);
        row.unseal_ops = box.tpm->counters().unseal_ops;
    }
    if (options.latency_ms > 0) {
        row.prov_wall_ms = row.seal_ops * options.latency_ms;
        row.exec_wall_ms = row.unseal_ops * options.latency_ms;
    }
    return row;
}

BenchRow run_gc(const BenchOptions& options, uint64_t vendor_bits,
                uint64_t client_bits, const fs::path& box_dir) {
    crypto::Rng rng(options.seed ^ vendor_bits ^ (client_bits << 1));
    flow::Box box = flow::Box::create(box_dir, rng);

    uint64_t vendor_records = vendor_bits / 40;
    uint64_t client_records = client_bits / 32;
    if (vendor_bits % 40 != 0 || client_bits % 32 != 0 || vendor_records == 0 ||
        client_records == 0)
        throw Error(ErrorCode::ParseError, "bit widths must be record multiples");

    BenchRow row;
    row.variant = "gc";
    row.vendor_bits = vendor_bits;
    row.client_bits = client_bits;
    row.pair_count = client_bits;
    row.gate_count = geno::genomic_gate_count(vendor_records, client_records);

    Bits client_bits_vec = geno::client_bits(synthetic_client(client_bits));

    if (row.gate_count <= options.garble_gate_cap) {
        // Full pipeline: compile, garble, provision, select, evaluate.
        geno::GenomicCircuit compiled =
            geno::compile_genomic(synthetic_vendor(vendor_bits), client_records);
        flow::GcArtifacts artifacts;
        {
            tee::TeeSession session = flow::launch(box, flow::kGcProvisionImage);
            box.tpm->counters().reset();
            artifacts = flow::gc_provision(session, compiled.circuit,
                                           compiled.vendor_bits, options.mode,
                                           box.hd(), rng);
            row.seal_ops = box.tpm->counters().seal_ops + 1; // + flag NVRAM init
        }
        box.tpm->counters().reset();
        flow::gc_run(box, artifacts, client_bits_vec);
        row.unseal_ops = box.tpm->counters().unseal_ops;
    } else {
        // Garbling at this scale is not desk-reproducible (the quadratic
        // circuit is why the paper needed a 128 GB machine); drive the OTM
        // pipeline with synthetic pairs and report the closed-form count.
        std::vector<garble::WireLabelPair> pairs(client_bits);
        for (auto& p : pairs) {
            rng.fill(p.label0.key.data(), 16);
            rng.fill(p.label1.key.data(), 16);
            p.label0.perm = static_cast<uint8_t>(rng.next_u64() & 1);
            p.label1.perm = p.label0.perm ^ 1;
        }
        otm::OtmImage image;
        {
            tee::TeeSession session = flow::launch(box, flow::kGcProvisionImage);
            box.tpm->counters().reset();
            otm::ProvisionSpec spec;
            spec.mode = options.mode;
            spec.dir = box.hd() / "gc" / "otm";
            spec.flag_nv_index = flow::kFlagNvIndex;
            spec.mk_nv_index = flow::kMkNvIndex;
            spec.nv_policies = {
                {{static_cast<uint8_t>(tee::kLaunchPcr),
                  tee::launch_pcr_value(flow::kGcProvisionImage)}},
                {{static_cast<uint8_t>(tee::kLaunchPcr),
                  tee::launch_pcr_value(flow::kGcExecuteImage)}}};
            spec.seal_policy = {{static_cast<uint8_t>(tee::kLaunchPcr),
                                 tee::launch_pcr_value(flow::kGcExecuteImage)}};
            image = otm::provision(session, pairs, spec, rng);
            row.seal_ops = box.tpm->counters().seal_ops + 1; // + flag NVRAM init
        }
        {
            tee::TeeSession session = flow::launch(box, flow::kGcExecuteImage);
            box.tpm->counters().reset();
            otm::select(session, image, client_bits_vec);
            row.unseal_ops = box.tpm->counters().unseal_ops;
        }
    }
    if (options.latency_ms > 0) {
        row.prov_wall_ms = row.seal_ops * options.latency_ms;
        row.exec_wall_ms = row.unseal_ops * options.latency_ms;
    }
    return row;
}

} // namespace

std::vector<BenchRow> bench_sweep(const BenchOptions& options) {
    if (options.sizes.empty())
        throw Error(ErrorCode::ParseError, "no sweep sizes given");
    for (uint64_t size : options.sizes) {
        if (size == 0)
            throw Error(ErrorCode::ParseError, "sweep sizes must be positive");
        if (size > options.cap_bits && !options.big)
            throw Error(ErrorCode::ResourceLimit,
                        std::to_string(size) +
                            " bits exceeds the desk-scale cap; pass --big to allow");
    }
    fs::create_directories(options.work_dir);
    std::vector<BenchRow> rows;
    size_t n = 0;
    for (uint64_t size : options.sizes) {
        uint64_t vendor_bits =
            options.axis == Axis::Vendor ? size : options.fixed_vendor_bits;
        uint64_t client_bits =
            options.axis == Axis::Client ? size : options.fixed_client_bits;
        fs::path box_dir = options.work_dir / ("box_" + std::to_string(n++));
        fs::remove_all(box_dir);
        rows.push_back(options.variant == Variant::TxtOnly
                           ? run_txt(options, vendor_bits, client_bits, box_dir)
                           : run_gc(options, vendor_bits, client_bits, box_dir));
    }
    return rows;
}

std::string render(const std::vector<BenchRow>& rows, Format format) {
    static const char* cols[] = {"variant",    "vendor_bits", "client_bits",
                                 "seal_ops",   "unseal_ops",  "pair_count",
                                 "gate_count", "prov_wall_ms", "exec_wall_ms"};
    auto fields = [](const BenchRow& r) {
        return std::vector<std::string>{
            r.variant,
            std::to_string(r.vendor_bits),
            std::to_string(r.client_bits),
            std::to_string(r.seal_ops),
            std::to_string(r.unseal_ops),
            std::to_string(r.pair_count),
            std::to_string(r.gate_count),
            std::to_string(r.prov_wall_ms),
            std::to_string(r.exec_wall_ms)};
    };
    std::ostringstream out;
    if (format == Format::Csv) {
        for (size_t i = 0; i < std::size(cols); ++i)
            out << cols[i] << (i + 1 < std::size(cols) ? "," : "\n");
        for (const auto& r : rows) {
            auto f = fields(r);
            for (size_t i = 0; i < f.size(); ++i)
                out << f[i] << (i + 1 < f.size() ? "," : "\n");
        }
    } else if (format == Format::Json) {
        out << "[\n";
        for (size_t ri = 0; ri < rows.size(); ++ri) {
            auto f = fields(rows[ri]);
            out << "  {";
            for (size_t i = 0; i < f.size(); ++i) {
                out << "\"" << cols[i] << "\": ";
                if (i == 0) out << "\"" << f[i] << "\"";
                else out << f[i];
                if (i + 1 < f.size()) out << ", ";
            }
            out << "}" << (ri + 1 < rows.size() ? "," : "") << "\n";
        }
        out << "]\n";
    } else {
        std::vector<size_t> widths(std::size(cols));
        for (size_t i = 0; i < std::size(cols); ++i)
            widths[i] = std::string(cols[i]).size();
        for (const auto& r : rows) {
            auto f = fields(r);
            for (size_t i = 0; i < f.size(); ++i)
                widths[i] = std::max(widths[i], f[i].size());
        }
        for (size_t i = 0; i < std::size(cols); ++i) {
            out << cols[i]
                << std::string(widths[i] - std::string(cols[i]).size() + 2, ' ');
        }
        out << "\n";
        for (const auto& r : rows) {
            auto f = fields(r);
            for (size_t i = 0; i < f.size(); ++i)
                out << f[i] << std::string(widths[i] - f[i].size() + 2, ' ');
            out << "\n";
        }
    }
    return out.str();
}

std::string recommend(uint64_t vendor_bits, uint64_t client_bits) {
    constexpr uint64_t kLargeVendorBits = 8800;
    constexpr uint64_t kSmallClientBits = 224000;
    if (vendor_bits >= kLargeVendorBits && client_bits <= kSmallClientBits)
        return "GC-based";
    return "TXT-only";
}

} // namespace otp::bench
