#include "otp/otm.hpp"

#include <openssl/sha.h>

#include <cstring>
#include <fstream>
#include <sstream>

namespace otp::otm {

namespace fs = std::filesystem;

namespace {

constexpr char kPairsMagic[9] = "OTPPAIR1";

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

// Per-label pad under MK; mask(17) + tag(15), as in the gate tables.
crypto::Digest label_pad(const Bytes& mk, uint32_t pair_index, uint8_t bit) {
    uint8_t buf[9 + 32 + 4 + 1];
    std::memcpy(buf, "otm-label", 9);
    std::memcpy(buf + 9, mk.data(), 32);
    size_t n = 9 + 32;
    for (int i = 0; i < 4; ++i) buf[n++] = static_cast<uint8_t>(pair_index >> (8 * i));
    buf[n++] = bit;
    return crypto::sha256(buf, n);
}

std::array<uint8_t, 32> encrypt_label(const crypto::Digest& pad,
                                      const garble::WireLabel& label) {
    std::array<uint8_t, 32> e{};
    for (int i = 0; i < 16; ++i) e[i] = label.key[i] ^ pad[i];
    e[16] = label.perm ^ pad[16];
    std::memcpy(e.data() + 17, pad.data() + 17, 15);
    return e;
}

garble::WireLabel decrypt_label(const crypto::Digest& pad,
                                const uint8_t* entry) {
    if (std::memcmp(entry + 17, pad.data() + 17, 15) != 0)
        throw Error(ErrorCode::DecryptionFailure, "label failed to authenticate");
    garble::WireLabel out;
    for (int i = 0; i < 16; ++i) out.key[i] = entry[i] ^ pad[i];
    out.perm = (entry[16] ^ pad[16]) & 1;
    return out;
}

constexpr uint32_t kMkNvSize = 512;

} // namespace

const char* mode_name(Mode m) {
    return m == Mode::MasterKey ? "master-key" : "seal-all";
}

Mode mode_from_name(const std::string& name) {
    if (name == "master-key") return Mode::MasterKey;
    if (name == "seal-all") return Mode::SealAll;
    throw Error(ErrorCode::ParseError, "unknown OTM mode '" + name + "'");
}

void OtmImage::save_meta() const {
    std::ostringstream out;
    out << "mode " << mode_name(mode) << "\n"
        << "width " << evaluator_width << "\n"
        << "flag_nv " << flag_nv_index << "\n"
        << "mk_nv " << mk_nv_index << "\n";
    std::string s = out.str();
    write_file(dir / "meta", Bytes(s.begin(), s.end()));
}

OtmImage OtmImage::load(const fs::path& dir) {
    Bytes raw = read_file(dir / "meta");
    std::istringstream in(std::string(raw.begin(), raw.end()));
    OtmImage img;
    img.dir = dir;
    std::string key;
    while (in >> key) {
        if (key == "mode") {
            std::string v;
            in >> v;
            img.mode = mode_from_name(v);
        } else if (key == "width") {
            in >> img.evaluator_width;
        } else if (key == "flag_nv") {
            in >> img.flag_nv_index;
        } else if (key == "mk_nv") {
            in >> img.mk_nv_index;
        } else {
            throw Error(ErrorCode::ParseError, "unknown meta key '" + key + "'");
        }
    }
    return img;
}

OtmImage provision(tee::TeeSession& session,
                   const std::vector<garble::WireLabelPair>& pairs,
                   const ProvisionSpec& spec, crypto::Rng& rng) {
    if (pairs.empty())
        throw Error(ErrorCode::EmptyVendorInput, "no label pairs to provision");
    tee::TpmState& tpm = session.tpm();

    bool flag_defined = tpm.nv_defined(spec.flag_nv_index);
    if (flag_defined && !spec.allow_reprovision)
        throw Error(ErrorCode::FlagAlreadyDefined,
                    "one-timeness flag already provisioned");

    fs::create_directories(spec.dir);

    OtmImage img;
    img.mode = spec.mode;
    img.evaluator_width = static_cast<uint32_t>(pairs.size());
    img.flag_nv_index = spec.flag_nv_index;
    img.mk_nv_index = spec.mk_nv_index;
    img.dir = spec.dir;

    if (!flag_defined)
        tpm.nv_define(spec.flag_nv_index, 1, spec.nv_policies);
    tpm.nv_write(spec.flag_nv_index, Bytes{0x00});

    Bytes blob;
    append(blob, kPairsMagic, 8);
    blob.push_back(spec.mode == Mode::MasterKey ? 1 : 0);
    put_u32(blob, img.evaluator_width);

    if (spec.mode == Mode::MasterKey) {
        Bytes mk = rng.bytes(32);
        tee::SealedBlob sealed_mk = tpm.seal(mk, spec.seal_policy);
        if (!tpm.nv_defined(spec.mk_nv_index))
            tpm.nv_define(spec.mk_nv_index, kMkNvSize, spec.nv_policies);
        tpm.nv_write(spec.mk_nv_index, sealed_mk.serialize());
        for (uint32_t i = 0; i < pairs.size(); ++i) {
            auto e0 = encrypt_label(label_pad(mk, i, 0), pairs[i].label0);
            auto e1 = encrypt_label(label_pad(mk, i, 1), pairs[i].label1);
            append(blob, e0.data(), e0.size());
            append(blob, e1.data(), e1.size());
        }
        std::fill(mk.begin(), mk.end(), 0);
    } else {
        for (const auto& pair : pairs) {
            Bytes pt = pair.label0.serialize();
            append(pt, pair.label1.serialize());
            Bytes sealed = tpm.seal(pt, spec.seal_policy).serialize();
            put_u32(blob, static_cast<uint32_t>(sealed.size()));
            append(blob, sealed);
        }
    }

    write_file(spec.dir / "pairs.bin", blob);
    img.save_meta();
    return img;
}

SelectResult select(tee::TeeSession& session, const OtmImage& image,
                    const Bits& input_bits, size_t chunk_size,
                    const SelectHooks& hooks) {
    if (input_bits.size() != image.evaluator_width)
        throw Error(ErrorCode::ArityMismatch,
                    "input bit count does not match OTM width");
    if (chunk_size == 0) chunk_size = 1;
    tee::TpmState& tpm = session.tpm();

    Bytes flag = tpm.nv_read(image.flag_nv_index);
    if (flag.empty() || flag[0] != 0)
        throw Error(ErrorCode::OneTimeViolation,
                    "one-time memory already consumed");
    // Fail closed: flip before releasing anything.
    tpm.nv_write(image.flag_nv_index, Bytes{0x01});
    if (hooks.after_flag_write) hooks.after_flag_write();

    Bytes raw = read_file(image.dir / "pairs.bin");
    ByteReader r(raw);
    Bytes magic = r.take(8);
    if (std::memcmp(magic.data(), kPairsMagic, 8) != 0)
        throw Error(ErrorCode::ParseError, "bad pairs blob magic");
    uint8_t mode_byte = r.u8();
    Mode mode = mode_byte == 1 ? Mode::MasterKey : Mode::SealAll;
    uint32_t width = r.u32();
    if (mode != image.mode || width != image.evaluator_width)
        throw Error(ErrorCode::ParseError, "pairs blob disagrees with meta");

    SelectResult result;
    result.labels.reserve(width);
    uint64_t current_exposure = 0;

    if (mode == Mode::MasterKey) {
        Bytes mk = tpm.unseal(
            tee::SealedBlob::deserialize(tpm.nv_read(image.mk_nv_index)));
        if (mk.size() != 32)
            throw Error(ErrorCode::DecryptionFailure, "bad master key length");
        for (uint32_t i = 0; i < width; ++i) {
            Bytes entries = r.take(64);
            uint8_t bit = input_bits[i] & 1;
            const uint8_t* chosen = entries.data() + (bit ? 32 : 0);
            result.labels.push_back(decrypt_label(label_pad(mk, i, bit), chosen));
            ++current_exposure;
            result.exposure_watermark =
                std::max(result.exposure_watermark, current_exposure);
            if (hooks.after_label) hooks.after_label(i);
        }
        std::fill(mk.begin(), mk.end(), 0);
    } else {
        std::vector<Bytes> blobs(width);
        for (uint32_t i = 0; i < width; ++i) {
            uint32_t len = r.u32();
            blobs[i] = r.take(len);
        }
        for (uint32_t base = 0; base < width; base += chunk_size) {
            uint32_t end = std::min<uint32_t>(width, base + static_cast<uint32_t>(chunk_size));
            std::vector<Bytes> chunk_plain;
            for (uint32_t i = base; i < end; ++i) {
                chunk_plain.push_back(
                    tpm.unseal(tee::SealedBlob::deserialize(blobs[i])));
                ++current_exposure;
                result.exposure_watermark =
                    std::max(result.exposure_watermark, current_exposure);
            }
            for (uint32_t i = base; i < end; ++i) {
                Bytes& pt = chunk_plain[i - base];
                if (pt.size() != 34)
                    throw Error(ErrorCode::DecryptionFailure, "bad pair plaintext");
                uint8_t bit = input_bits[i] & 1;
                Bytes chosen(pt.begin() + (bit ? 17 : 0),
                             pt.begin() + (bit ? 34 : 17));
                result.labels.push_back(garble::WireLabel::deserialize(chosen));
                std::fill(pt.begin(), pt.end(), 0);
                --current_exposure;
                if (hooks.after_label) hooks.after_label(i);
            }
        }
    }

    // Instrumentation channel for exposure_report.
    std::string wm = std::to_string(result.exposure_watermark) + "\n";
    write_file(image.dir / "exposure", Bytes(wm.begin(), wm.end()));
    return result;
}

uint64_t exposure_report(const OtmImage& image) {
    Bytes raw = read_file(image.dir / "exposure");
    return std::stoull(std::string(raw.begin(), raw.end()));
}

} // namespace otp::otm
