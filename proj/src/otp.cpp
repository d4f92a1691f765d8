#include "otp/otp.hpp"

#include <fstream>

namespace otp::flow {

namespace fs = std::filesystem;

const Bytes kTxtProvisionImage = to_bytes("otp-txt-payload v1 mode=provision");
const Bytes kTxtExecuteImage = to_bytes("otp-txt-payload v1 mode=execute");
const Bytes kGcProvisionImage = to_bytes("otp-gc-selector v1 mode=provision");
const Bytes kGcExecuteImage = to_bytes("otp-gc-selector v1 mode=execute");

namespace {

constexpr char kTxtMagic[9] = "OTPTXT01";

Bytes read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

tee::PcrPolicy policy_for(const Bytes& image) {
    return {{static_cast<uint8_t>(tee::kLaunchPcr), tee::launch_pcr_value(image)}};
}

std::vector<tee::PcrPolicy> flag_policies(const Bytes& prov_image,
                                          const Bytes& exec_image) {
    return {policy_for(prov_image), policy_for(exec_image)};
}

} // namespace

Box Box::create(const fs::path& root, crypto::Rng& rng) {
    fs::create_directories(root / "hd");
    Box box;
    box.root = root;
    box.tpm = tee::TpmState::create(root / "tpm.state", rng);
    return box;
}

Box Box::open(const fs::path& root) {
    Box box;
    box.root = root;
    box.tpm = tee::TpmState::open(root / "tpm.state");
    return box;
}

tee::TeeSession launch(Box& box, const Bytes& image) {
    return tee::measured_launch(box.tpm, image);
}

void TxtOnlyImage::save(const fs::path& path) const {
    Bytes out;
    append(out, kTxtMagic, 8);
    put_u32(out, flag_nv_index);
    append(out, payload_digest.data(), payload_digest.size());
    put_u32(out, static_cast<uint32_t>(sealed_vendor_records.size()));
    for (const auto& blob : sealed_vendor_records) {
        Bytes b = blob.serialize();
        put_u32(out, static_cast<uint32_t>(b.size()));
        append(out, b);
    }
    write_file(path, out);
}

TxtOnlyImage TxtOnlyImage::load(const fs::path& path) {
    Bytes raw = read_file(path);
    ByteReader r(raw);
    Bytes magic = r.take(8);
    if (std::memcmp(magic.data(), kTxtMagic, 8) != 0)
        throw Error(ErrorCode::ParseError, "bad TXT image magic");
    TxtOnlyImage img;
    img.flag_nv_index = r.u32();
    Bytes d = r.take(32);
    std::memcpy(img.payload_digest.data(), d.data(), 32);
    uint32_t count = r.u32();
    img.sealed_vendor_records.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t len = r.u32();
        img.sealed_vendor_records.push_back(tee::SealedBlob::deserialize(r.take(len)));
    }
    return img;
}

TxtOnlyImage txt_provision(tee::TeeSession& session,
                           const std::vector<geno::SnpRecord>& vendor_records,
                           const fs::path& hd_dir, bool allow_reprovision) {
    if (vendor_records.empty())
        throw Error(ErrorCode::EmptyVendorInput, "no vendor records");
    tee::TpmState& tpm = session.tpm();

    TxtOnlyImage img;
    img.payload_digest = crypto::sha256(kTxtExecuteImage);

    bool defined = tpm.nv_defined(kFlagNvIndex);
    if (defined && !allow_reprovision)
        throw Error(ErrorCode::FlagAlreadyDefined, "box already provisioned");
    if (!defined)
        tpm.nv_define(kFlagNvIndex, 1,
                      flag_policies(kTxtProvisionImage, kTxtExecuteImage));
    tpm.nv_write(kFlagNvIndex, Bytes{0x00});

    tee::PcrPolicy exec_policy = policy_for(kTxtExecuteImage);
    for (const auto& rec : vendor_records) {
        // 10 ASCII hex characters per record.
        std::string hex = geno::encode_vendor({rec});
        img.sealed_vendor_records.push_back(tpm.seal(to_bytes(hex), exec_policy));
    }

    fs::create_directories(hd_dir / "txt");
    img.save(hd_dir / "txt" / "image.bin");
    return img;
}

OtpResult txt_execute(tee::TeeSession& session, const TxtOnlyImage& image,
                      const std::vector<geno::SnpRecord>& client_records,
                      const ExecHooks& hooks, uint64_t* exposure_watermark) {
    tee::TpmState& tpm = session.tpm();

    Bytes flag = tpm.nv_read(image.flag_nv_index);
    if (flag.empty() || flag[0] != 0)
        throw Error(ErrorCode::OneTimeViolation, "program already ran");
    tpm.nv_write(image.flag_nv_index, Bytes{0x01});
    if (hooks.after_flag_write) hooks.after_flag_write();

    uint16_t total = 0;
    uint64_t watermark = 0;
    for (size_t i = 0; i < image.sealed_vendor_records.size(); ++i) {
        Bytes pt = tpm.unseal(image.sealed_vendor_records[i]);
        watermark = std::max<uint64_t>(watermark, 1);
        std::vector<geno::SnpRecord> v = geno::parse_vendor(to_string(pt));
        for (const auto& c : client_records) {
            uint16_t term = 0;
            if (c.snp_id == v[0].snp_id && c.allele_code == v[0].allele_code)
                term = static_cast<uint16_t>(static_cast<int16_t>(v[0].risk_deci));
            total = static_cast<uint16_t>(total + term);
        }
        std::fill(pt.begin(), pt.end(), 0); // wipe before the next record
        if (hooks.after_record) hooks.after_record(i);
    }
    if (exposure_watermark) *exposure_watermark = watermark;

    OtpResult result;
    result.decoded = static_cast<int16_t>(total);
    result.output_bits = circ::int_to_bits(result.decoded, 16);
    return result;
}

GcArtifacts gc_provision(tee::TeeSession& session, const circ::Circuit& circuit,
                         const Bits& vendor_bits, otm::Mode mode,
                         const fs::path& hd_dir, crypto::Rng& rng,
                         bool allow_reprovision) {
    garble::GenResult generated = garble::gen(circuit, vendor_bits, rng);

    otm::ProvisionSpec spec;
    spec.mode = mode;
    spec.dir = hd_dir / "gc" / "otm";
    spec.flag_nv_index = kFlagNvIndex;
    spec.mk_nv_index = kMkNvIndex;
    spec.nv_policies = flag_policies(kGcProvisionImage, kGcExecuteImage);
    spec.seal_policy = policy_for(kGcExecuteImage);
    spec.allow_reprovision = allow_reprovision;

    GcArtifacts artifacts;
    artifacts.otm_image = otm::provision(session, generated.evaluator_pairs, spec, rng);
    generated.evaluator_pairs.clear();

    fs::create_directories(hd_dir / "gc");
    artifacts.gc_file = hd_dir / "gc" / "circuit.gc";
    write_file(artifacts.gc_file, generated.gc.serialize());
    return artifacts;
}

fs::path gc_select(tee::TeeSession& session, const otm::OtmImage& image,
                   const Bits& client_bits, size_t chunk_size,
                   const otm::SelectHooks& hooks) {
    otm::SelectResult selected =
        otm::select(session, image, client_bits, chunk_size, hooks);
    std::string keyfile = garble::keyfile_serialize(selected.labels);
    fs::path path = image.dir.parent_path() / "keys.txt";
    write_file(path, Bytes(keyfile.begin(), keyfile.end()));
    return path;
}

OtpResult gc_evl(const fs::path& gc_file,
                 const std::vector<garble::WireLabel>& selected) {
    garble::GarbledCircuit gc = garble::GarbledCircuit::deserialize(read_file(gc_file));
    return decode_result(garble::evl(gc, selected));
}

OtpResult gc_run(Box& box, const GcArtifacts& artifacts, const Bits& client_bits,
                 size_t chunk_size) {
    fs::path keyfile_path;
    {
        tee::TeeSession session = launch(box, kGcExecuteImage);
        keyfile_path = gc_select(session, artifacts.otm_image, client_bits, chunk_size);
    }
    // Selection done; evaluation is offline, no TEE required.
    Bytes raw = read_file(keyfile_path);
    std::vector<garble::WireLabel> selected =
        garble::keyfile_parse(std::string(raw.begin(), raw.end()));
    return gc_evl(artifacts.gc_file, selected);
}

OtpResult decode_result(const Bits& output_bits) {
    OtpResult result;
    result.output_bits = output_bits;
    result.decoded = static_cast<int16_t>(circ::bits_to_signed(output_bits));
    return result;
}

} // namespace otp::flow
