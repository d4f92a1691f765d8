// Operator CLI for the one-time-program box.
//
// Exit codes:
//   0  success
//   2  usage or input error (bad flags, malformed files, bad records)
//   3  one-time violation (the program was already consumed)
//   4  policy mismatch (wrong measured environment)
//   5  decryption/authentication failure (tampered or stale artifacts)
//   6  resource limit (desk-scale cap; re-run with --big)

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "otp/bench.hpp"
#include "otp/otp.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(const otp::Error& e) {
    switch (e.code()) {
        case otp::ErrorCode::OneTimeViolation: return 3;
        case otp::ErrorCode::PolicyMismatch: return 4;
        case otp::ErrorCode::DecryptionFailure:
        case otp::ErrorCode::AuthFailure: return 5;
        case otp::ErrorCode::ResourceLimit: return 6;
        default: return 2;
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw otp::Error(otp::ErrorCode::IoError, "cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw otp::Error(otp::ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

std::vector<otp::geno::SnpRecord> load_vendor(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw otp::Error(otp::ErrorCode::IoError, "cannot open " + path.string());
    return otp::geno::load_vendor_tsv(in);
}

std::string strip_ws(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

otp::flow::Box open_or_create_box(const fs::path& root, uint64_t seed) {
    if (fs::exists(root / "tpm.state")) return otp::flow::Box::open(root);
    if (seed != 0) {
        otp::crypto::Rng rng(seed);
        return otp::flow::Box::create(root, rng);
    }
    otp::crypto::Rng rng; // OS entropy
    return otp::flow::Box::create(root, rng);
}

otp::flow::Box open_box(const fs::path& root) {
    if (!fs::exists(root / "tpm.state"))
        throw otp::Error(otp::ErrorCode::IoError,
                         "no box at " + root.string() + "; provision first");
    return otp::flow::Box::open(root);
}

std::string format_risk(int16_t deci) {
    std::ostringstream out;
    int32_t v = deci;
    if (v < 0) {
        out << '-';
        v = -v;
    }
    out << v / 10 << '.' << v % 10;
    return out.str();
}

void print_result(const otp::flow::OtpResult& r, const fs::path& result_file) {
    std::ostringstream out;
    out << "total risk (deci-units): " << r.decoded << "\n"
        << "risk score: " << format_risk(r.decoded) << "\n";
    std::cout << out.str();
    if (!result_file.empty()) write_text_file(result_file, out.str());
}

std::vector<uint64_t> parse_sizes(const std::string& csv) {
    std::vector<uint64_t> sizes;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = strip_ws(tok);
        if (tok.empty()) continue;
        try {
            sizes.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            throw otp::Error(otp::ErrorCode::ParseError, "bad sweep size '" + tok + "'");
        }
    }
    return sizes;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-time-program box: TXT-only and GC-based variants"};
    app.require_subcommand(1);

    std::string box_opt;
    if (const char* env = std::getenv("OTP_BOX_ROOT")) box_opt = env;
    auto add_box_flag = [&](CLI::App* cmd) {
        cmd->add_option("--box", box_opt,
                        "box directory (default: $OTP_BOX_ROOT)")
            ->envname("OTP_BOX_ROOT");
    };

    uint64_t seed = 0;
    unsigned latency_ms = 0;
    std::string mode_name = "master-key";
    bool reprovision = false;

    // provision-txt
    std::string vendor_path;
    auto* provision_txt = app.add_subcommand(
        "provision-txt", "phase 1: seal the vendor table into a fresh box");
    add_box_flag(provision_txt);
    provision_txt->add_option("--vendor", vendor_path, "vendor TSV file")->required();
    provision_txt->add_option("--seed", seed, "deterministic RNG seed");
    provision_txt->add_option("--latency-ms", latency_ms, "per-seal delay");
    provision_txt->add_flag("--reprovision", reprovision,
                            "allow overwriting a provisioned box");

    // run-txt
    std::string client_path, out_path;
    auto* run_txt = app.add_subcommand(
        "run-txt", "phase 2: run the one-time risk test on a client input");
    add_box_flag(run_txt);
    run_txt->add_option("--client", client_path, "compact client input file")
        ->required();
    run_txt->add_option("--out", out_path, "also write the result here");
    run_txt->add_option("--latency-ms", latency_ms, "per-unseal delay");

    // gc-gen
    std::string circuit_out;
    uint64_t client_records = 0;
    auto* gc_gen = app.add_subcommand(
        "gc-gen", "compile the risk-test circuit for a given client size");
    gc_gen->add_option("--vendor", vendor_path, "vendor TSV file")->required();
    gc_gen->add_option("--client-records", client_records, "client record count")
        ->required();
    gc_gen->add_option("--out", circuit_out, "circuit text output file")->required();

    // gc-provision
    auto* gc_provision = app.add_subcommand(
        "gc-provision", "garble the circuit and provision the one-time memory");
    add_box_flag(gc_provision);
    gc_provision->add_option("--vendor", vendor_path, "vendor TSV file")->required();
    gc_provision
        ->add_option("--client-records", client_records, "client record count")
        ->required();
    gc_provision->add_option("--mode", mode_name, "master-key | seal-all")
        ->check(CLI::IsMember({"master-key", "seal-all"}));
    gc_provision->add_option("--seed", seed, "deterministic RNG seed");
    gc_provision->add_option("--latency-ms", latency_ms, "per-seal delay");
    gc_provision->add_flag("--reprovision", reprovision,
                           "allow overwriting a provisioned box");

    // gc-select
    uint64_t chunk = 1;
    auto* gc_select = app.add_subcommand(
        "gc-select", "one-time key selection for a client input (in-TEE)");
    add_box_flag(gc_select);
    gc_select->add_option("--client", client_path, "compact client input file")
        ->required();
    gc_select->add_option("--chunk", chunk, "seal-all unseal chunk size");
    gc_select->add_option("--latency-ms", latency_ms, "per-unseal delay");

    // gc-evl
    std::string keys_path;
    auto* gc_evl = app.add_subcommand(
        "gc-evl", "offline garbled-circuit evaluation (no TEE)");
    add_box_flag(gc_evl);
    gc_evl->add_option("--keys", keys_path,
                       "key file (default: <box>/hd/gc/keys.txt)");
    gc_evl->add_option("--out", out_path, "also write the result here");

    // preprocess
    std::string in_path;
    auto* preprocess = app.add_subcommand(
        "preprocess", "AncestryDNA raw download -> compact client input");
    preprocess->add_option("--in", in_path, "raw genotype file")->required();
    preprocess->add_option("--out", out_path, "compact output file (default: stdout)");

    // bench
    std::string variant_name = "txt", axis_name = "vendor", sizes_csv,
                format_name = "table", work_dir;
    bool big = false;
    auto* bench = app.add_subcommand(
        "bench", "operation-count benchmark sweeps on fresh boxes");
    bench->add_option("--variant", variant_name, "txt | gc")
        ->check(CLI::IsMember({"txt", "gc"}));
    bench->add_option("--sweep", axis_name, "vendor | client")
        ->check(CLI::IsMember({"vendor", "client"}));
    bench->add_option("--sizes", sizes_csv, "comma-separated bit widths")->required();
    bench->add_option("--mode", mode_name, "master-key | seal-all")
        ->check(CLI::IsMember({"master-key", "seal-all"}));
    bench->add_option("--latency-ms", latency_ms, "latency model per TPM op");
    bench->add_option("--seed", seed, "deterministic RNG seed");
    bench->add_option("--format", format_name, "table | csv | json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    bench->add_option("--work-dir", work_dir, "scratch directory for bench boxes");
    bench->add_flag("--big", big, "lift the desk-scale size cap");

    // recommend
    uint64_t vendor_bits = 0, client_bits = 0;
    auto* recommend = app.add_subcommand(
        "recommend", "pick the favorable variant for an input-size pair");
    recommend->add_option("--vendor-bits", vendor_bits, "vendor input bits")
        ->required();
    recommend->add_option("--client-bits", client_bits, "client input bits")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (provision_txt->parsed()) {
            if (box_opt.empty())
                throw otp::Error(otp::ErrorCode::ParseError,
                                 "--box or OTP_BOX_ROOT required");
            otp::flow::Box box = open_or_create_box(box_opt, seed);
            box.tpm->set_latency_ms(latency_ms);
            auto vendor = load_vendor(vendor_path);
            auto session = otp::flow::launch(box, otp::flow::kTxtProvisionImage);
            box.tpm->counters().reset();
            otp::flow::txt_provision(session, vendor, box.hd(), reprovision);
            std::cout << "provisioned " << vendor.size() << " records, "
                      << box.tpm->counters().seal_ops << " seal ops\n";
        } else if (run_txt->parsed()) {
            otp::flow::Box box = open_box(box_opt);
            box.tpm->set_latency_ms(latency_ms);
            auto client = otp::geno::parse_client(strip_ws(read_text_file(client_path)));
            auto session = otp::flow::launch(box, otp::flow::kTxtExecuteImage);
            auto image = otp::flow::TxtOnlyImage::load(box.hd() / "txt" / "image.bin");
            otp::flow::OtpResult r = otp::flow::txt_execute(session, image, client);
            fs::path result_file =
                out_path.empty() ? box.hd() / "txt" / "result.txt" : fs::path(out_path);
            print_result(r, result_file);
        } else if (gc_gen->parsed()) {
            auto vendor = load_vendor(vendor_path);
            auto compiled = otp::geno::compile_genomic(vendor, client_records);
            write_text_file(circuit_out, otp::circ::serialize_circuit(compiled.circuit));
            std::cout << "wrote " << compiled.circuit.gates.size() << " gates, "
                      << compiled.circuit.evaluator_inputs.size()
                      << " evaluator input bits\n";
        } else if (gc_provision->parsed()) {
            if (box_opt.empty())
                throw otp::Error(otp::ErrorCode::ParseError,
                                 "--box or OTP_BOX_ROOT required");
            otp::flow::Box box = open_or_create_box(box_opt, seed);
            box.tpm->set_latency_ms(latency_ms);
            auto vendor = load_vendor(vendor_path);
            auto compiled = otp::geno::compile_genomic(vendor, client_records);
            otp::crypto::Rng rng = seed ? otp::crypto::Rng(seed ^ 0x6763)
                                        : otp::crypto::Rng();
            auto session = otp::flow::launch(box, otp::flow::kGcProvisionImage);
            box.tpm->counters().reset();
            otp::flow::gc_provision(session, compiled.circuit, compiled.vendor_bits,
                                    otp::otm::mode_from_name(mode_name), box.hd(), rng,
                                    reprovision);
            std::cout << "garbled " << compiled.circuit.gates.size() << " gates, "
                      << compiled.circuit.evaluator_inputs.size() << " label pairs, "
                      << box.tpm->counters().seal_ops << " seal ops\n";
        } else if (gc_select->parsed()) {
            otp::flow::Box box = open_box(box_opt);
            box.tpm->set_latency_ms(latency_ms);
            otp::Bits bits =
                otp::hex_to_bits(strip_ws(read_text_file(client_path)));
            auto image = otp::otm::OtmImage::load(box.hd() / "gc" / "otm");
            auto session = otp::flow::launch(box, otp::flow::kGcExecuteImage);
            fs::path keyfile = otp::flow::gc_select(session, image, bits,
                                                    static_cast<size_t>(chunk));
            std::cout << "key file: " << keyfile.string() << "\n";
        } else if (gc_evl->parsed()) {
            otp::flow::Box box = open_box(box_opt);
            fs::path keys = keys_path.empty() ? box.hd() / "gc" / "keys.txt"
                                              : fs::path(keys_path);
            auto selected = otp::garble::keyfile_parse(read_text_file(keys));
            otp::flow::OtpResult r =
                otp::flow::gc_evl(box.hd() / "gc" / "circuit.gc", selected);
            fs::path result_file =
                out_path.empty() ? box.hd() / "gc" / "result.txt" : fs::path(out_path);
            print_result(r, result_file);
        } else if (preprocess->parsed()) {
            std::ifstream in(in_path);
            if (!in)
                throw otp::Error(otp::ErrorCode::IoError, "cannot open " + in_path);
            std::string compact = otp::geno::preprocess_ancestry(in);
            if (out_path.empty())
                std::cout << compact << "\n";
            else
                write_text_file(out_path, compact + "\n");
        } else if (bench->parsed()) {
            otp::bench::BenchOptions o;
            o.variant = otp::bench::variant_from_name(variant_name);
            o.axis = otp::bench::axis_from_name(axis_name);
            o.sizes = parse_sizes(sizes_csv);
            o.mode = otp::otm::mode_from_name(mode_name);
            o.latency_ms = latency_ms;
            o.big = big;
            if (seed) o.seed = seed;
            o.work_dir = work_dir.empty()
                             ? fs::temp_directory_path() / "otp_bench"
                             : fs::path(work_dir);
            auto rows = otp::bench::bench_sweep(o);
            std::cout << otp::bench::render(
                rows, otp::bench::format_from_name(format_name));
        } else if (recommend->parsed()) {
            std::cout << otp::bench::recommend(vendor_bits, client_bits) << "\n";
        }
    } catch (const otp::Error& e) {
        std::cerr << "error (" << otp::error_code_name(e.code()) << "): " << e.what()
                  << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
