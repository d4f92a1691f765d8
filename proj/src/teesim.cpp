#include "otp/teesim.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

namespace otp::tee {

namespace fs = std::filesystem;

namespace {

constexpr char kStateMagic[9] = "OTPTPM01";
constexpr uint16_t kStateVersion = 1;

Bytes read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file_atomic(const fs::path& path, const Bytes& data) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

Bytes encode_policy(const PcrPolicy& policy) {
    Bytes out;
    out.push_back(static_cast<uint8_t>(policy.size()));
    for (const auto& [pcr, digest] : policy) {
        out.push_back(pcr);
        append(out, digest.data(), digest.size());
    }
    return out;
}

} // namespace

Bytes SealedBlob::serialize() const {
    Bytes out;
    append(out, kMagic, 8);
    append(out, encode_policy(policy));
    append(out, nonce);
    put_u32(out, static_cast<uint32_t>(ciphertext.size()));
    append(out, ciphertext);
    append(out, tag);
    return out;
}

SealedBlob SealedBlob::deserialize(const Bytes& raw) {
    ByteReader r(raw);
    Bytes magic = r.take(8);
    if (std::memcmp(magic.data(), kMagic, 8) != 0)
        throw Error(ErrorCode::ParseError, "bad sealed blob magic");
    SealedBlob blob;
    uint8_t count = r.u8();
    for (uint8_t i = 0; i < count; ++i) {
        uint8_t pcr = r.u8();
        Bytes d = r.take(32);
        Digest digest;
        std::memcpy(digest.data(), d.data(), 32);
        blob.policy.emplace_back(pcr, digest);
    }
    blob.nonce = r.take(12);
    uint32_t ct_len = r.u32();
    blob.ciphertext = r.take(ct_len);
    blob.tag = r.take(16);
    if (!r.done())
        throw Error(ErrorCode::ParseError, "trailing bytes in sealed blob");
    return blob;
}

std::shared_ptr<TpmState> TpmState::create(const fs::path& path, crypto::Rng& rng) {
    auto state = std::shared_ptr<TpmState>(new TpmState());
    state->root_secret_ = rng.bytes(32);
    state->state_path_ = path;
    state->rng_ = crypto::Rng(rng.next_u64());
    state->persist();
    return state;
}

std::shared_ptr<TpmState> TpmState::open(const fs::path& path) {
    auto state = std::shared_ptr<TpmState>(new TpmState());
    state->state_path_ = path;
    state->load(read_file(path));
    return state;
}

const Digest& TpmState::pcr(unsigned n) const {
    if (n >= kPcrCount)
        throw Error(ErrorCode::InvalidPcr, "PCR out of range");
    return pcrs_[n];
}

Digest TpmState::pcr_extend(unsigned pcr, const Bytes& measurement) {
    if (pcr >= kPcrCount)
        throw Error(ErrorCode::InvalidPcr, "PCR out of range");
    if (measurement.empty())
        throw Error(ErrorCode::InvalidMeasurement, "empty measurement");
    Digest m = crypto::sha256(measurement);
    Bytes concat;
    append(concat, pcrs_[pcr].data(), 32);
    append(concat, m.data(), 32);
    pcrs_[pcr] = crypto::sha256(concat);
    persist();
    return pcrs_[pcr];
}

void TpmState::pcr_reset(unsigned pcr) {
    if (pcr >= kPcrCount)
        throw Error(ErrorCode::InvalidPcr, "PCR out of range");
    pcrs_[pcr] = Digest{};
    persist();
}

bool TpmState::policy_matches(const PcrPolicy& policy) const {
    for (const auto& [pcr, digest] : policy) {
        if (pcr >= kPcrCount || pcrs_[pcr] != digest) return false;
    }
    return true;
}

Digest TpmState::seal_key(const PcrPolicy& policy) const {
    Bytes material = root_secret_;
    append(material, encode_policy(policy));
    return crypto::kdf("otp-seal-key", material);
}

void TpmState::apply_latency() const {
    if (latency_ms_ > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(latency_ms_));
}

SealedBlob TpmState::seal(const Bytes& plaintext, const PcrPolicy& policy) {
    for (const auto& [pcr, digest] : policy) {
        (void)digest;
        if (pcr >= kPcrCount)
            throw Error(ErrorCode::InvalidPcr, "policy PCR out of range");
    }
    // Inner frame: u32 length + plaintext + zero padding sized so the
    // serialized blob equals plaintext size + the configured overhead.
    Bytes inner;
    put_u32(inner, static_cast<uint32_t>(plaintext.size()));
    append(inner, plaintext);
    size_t fixed = 45 + 33 * policy.size();
    if (seal_overhead_ > fixed)
        inner.resize(plaintext.size() + 4 + (seal_overhead_ - fixed), 0);

    Bytes nonce = rng_.bytes(12);
    Bytes sealed = crypto::aead_seal(seal_key(policy), nonce, inner);

    SealedBlob blob;
    blob.policy = policy;
    blob.nonce = nonce;
    blob.ciphertext = Bytes(sealed.begin() + 12, sealed.end() - 16);
    blob.tag = Bytes(sealed.end() - 16, sealed.end());
    ++counters_.seal_ops;
    apply_latency();
    return blob;
}

Bytes TpmState::unseal(const SealedBlob& blob) {
    if (!policy_matches(blob.policy))
        throw Error(ErrorCode::PolicyMismatch, "PCR policy not satisfied");
    Bytes sealed = blob.nonce;
    append(sealed, blob.ciphertext);
    append(sealed, blob.tag);
    Bytes inner = crypto::aead_open(seal_key(blob.policy), sealed);
    ByteReader r(inner);
    uint32_t len = r.u32();
    if (len > r.remaining())
        throw Error(ErrorCode::AuthFailure, "corrupt inner frame");
    ++counters_.unseal_ops;
    apply_latency();
    return r.take(len);
}

void TpmState::nv_define(uint32_t index_id, uint32_t size,
                         const std::vector<PcrPolicy>& policies) {
    if (nv_indices_.count(index_id))
        throw Error(ErrorCode::IndexDefined, "NV index already defined");
    NvIndex idx;
    idx.index_id = index_id;
    idx.size = size;
    idx.policies = policies;
    idx.defined = true;
    nv_indices_[index_id] = std::move(idx);
    persist();
}

void TpmState::nv_write(uint32_t index_id, const Bytes& data) {
    auto it = nv_indices_.find(index_id);
    if (it == nv_indices_.end())
        throw Error(ErrorCode::IndexUndefined, "NV index not defined");
    bool ok = false;
    for (const auto& alt : it->second.policies)
        if (policy_matches(alt)) { ok = true; break; }
    if (!ok)
        throw Error(ErrorCode::PolicyMismatch, "NV write policy not satisfied");
    if (data.size() > it->second.size)
        throw Error(ErrorCode::SizeExceeded, "NV write exceeds index size");
    it->second.data = data;
    ++counters_.nv_writes;
    persist();
}

Bytes TpmState::nv_read(uint32_t index_id) {
    auto it = nv_indices_.find(index_id);
    if (it == nv_indices_.end())
        throw Error(ErrorCode::IndexUndefined, "NV index not defined");
    bool ok = false;
    for (const auto& alt : it->second.policies)
        if (policy_matches(alt)) { ok = true; break; }
    if (!ok)
        throw Error(ErrorCode::PolicyMismatch, "NV read policy not satisfied");
    ++counters_.nv_reads;
    return it->second.data;
}

bool TpmState::nv_defined(uint32_t index_id) const {
    return nv_indices_.count(index_id) != 0;
}

void TpmState::persist() const {
    Bytes out;
    append(out, kStateMagic, 8);
    put_u16(out, kStateVersion);
    append(out, root_secret_);
    put_u32(out, static_cast<uint32_t>(pcrs_.size()));
    for (const auto& p : pcrs_) append(out, p.data(), 32);
    put_u32(out, static_cast<uint32_t>(nv_indices_.size()));
    for (const auto& [id, idx] : nv_indices_) {
        put_u32(out, id);
        put_u32(out, idx.size);
        out.push_back(idx.defined ? 1 : 0);
        out.push_back(static_cast<uint8_t>(idx.policies.size()));
        for (const auto& alt : idx.policies) append(out, encode_policy(alt));
        put_u32(out, static_cast<uint32_t>(idx.data.size()));
        append(out, idx.data);
    }
    write_file_atomic(state_path_, out);
}

void TpmState::load(const Bytes& raw) {
    ByteReader r(raw);
    Bytes magic = r.take(8);
    if (std::memcmp(magic.data(), kStateMagic, 8) != 0)
        throw Error(ErrorCode::ParseError, "bad TPM state magic");
    if (r.u16() != kStateVersion)
        throw Error(ErrorCode::ParseError, "unsupported TPM state version");
    root_secret_ = r.take(32);
    uint32_t pcr_count = r.u32();
    if (pcr_count != kPcrCount)
        throw Error(ErrorCode::ParseError, "unexpected PCR bank size");
    pcrs_.resize(kPcrCount);
    for (auto& p : pcrs_) {
        Bytes d = r.take(32);
        std::memcpy(p.data(), d.data(), 32);
    }
    uint32_t nv_count = r.u32();
    for (uint32_t i = 0; i < nv_count; ++i) {
        NvIndex idx;
        idx.index_id = r.u32();
        idx.size = r.u32();
        idx.defined = r.u8() != 0;
        uint8_t alts = r.u8();
        for (uint8_t a = 0; a < alts; ++a) {
            PcrPolicy policy;
            uint8_t entries = r.u8();
            for (uint8_t e = 0; e < entries; ++e) {
                uint8_t pcr = r.u8();
                Bytes d = r.take(32);
                Digest digest;
                std::memcpy(digest.data(), d.data(), 32);
                policy.emplace_back(pcr, digest);
            }
            idx.policies.push_back(std::move(policy));
        }
        uint32_t data_len = r.u32();
        idx.data = r.take(data_len);
        nv_indices_[idx.index_id] = std::move(idx);
    }
    if (!r.done())
        throw Error(ErrorCode::ParseError, "trailing bytes in TPM state");
}

TeeSession::TeeSession(TeeSession&& other) noexcept
    : tpm_(std::move(other.tpm_)), program_digest_(other.program_digest_) {}

TeeSession::~TeeSession() {
    if (tpm_) tpm_->session_live_.store(false);
}

TeeSession measured_launch(std::shared_ptr<TpmState> tpm,
                           const Bytes& program_image,
                           const std::optional<Digest>& expected_digest) {
    if (program_image.empty())
        throw Error(ErrorCode::InvalidMeasurement, "empty program image");
    Digest digest = crypto::sha256(program_image);
    if (expected_digest && *expected_digest != digest)
        throw Error(ErrorCode::MeasurementMismatch, "program digest mismatch");
    bool expected = false;
    if (!tpm->session_live_.compare_exchange_strong(expected, true))
        throw Error(ErrorCode::SessionActive, "a TEE session is already live");
    try {
        tpm->pcr_reset(kLaunchPcr);
        tpm->pcr_extend(kLaunchPcr, program_image);
    } catch (...) {
        tpm->session_live_.store(false);
        throw;
    }
    return TeeSession(std::move(tpm), digest);
}

Digest launch_pcr_value(const Bytes& program_image) {
    Digest m = crypto::sha256(program_image);
    Bytes concat(32, 0);
    append(concat, m.data(), 32);
    return crypto::sha256(concat);
}

} // namespace otp::tee
