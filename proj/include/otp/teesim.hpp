#ifndef OTP_TEESIM_HPP
#define OTP_TEESIM_HPP

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "otp/bytes.hpp"
#include "otp/crypto.hpp"

namespace otp::tee {

using crypto::Digest;

constexpr size_t kPcrCount = 24;
constexpr unsigned kLaunchPcr = 17; // conventional DRTM PCR

// All (pcr, digest) pairs in one policy must match the live bank.
using PcrPolicy = std::vector<std::pair<uint8_t, Digest>>;

struct NvIndex {
    uint32_t index_id = 0;
    uint32_t size = 0;
    // Satisfied when any one alternative policy matches in full. A
    // single-alternative index behaves like a plain PCR-bound index; the
    // one-timeness flag uses two alternatives so that both the
    // provisioning-mode and execution-mode measurements can reach it.
    std::vector<PcrPolicy> policies;
    Bytes data;
    bool defined = false;
};

struct SealedBlob {
    static constexpr char kMagic[9] = "OTPSEAL1";
    PcrPolicy policy;
    Bytes nonce;      // 12 bytes
    Bytes ciphertext; // framed plaintext, includes padding
    Bytes tag;        // 16 bytes

    Bytes serialize() const;
    static SealedBlob deserialize(const Bytes& raw);
};

// Operation counters; exact, reset explicitly by the caller.
struct TpmCounters {
    uint64_t seal_ops = 0;
    uint64_t unseal_ops = 0;
    uint64_t nv_reads = 0;
    uint64_t nv_writes = 0;

    void reset() { *this = TpmCounters{}; }
};

class TeeSession;

class TpmState {
public:
    // Creates a fresh chip (new root secret, zeroed PCRs) persisted at path.
    static std::shared_ptr<TpmState> create(const std::filesystem::path& path,
                                            crypto::Rng& rng);
    // Loads previously persisted state.
    static std::shared_ptr<TpmState> open(const std::filesystem::path& path);

    const Digest& pcr(unsigned n) const;
    Digest pcr_extend(unsigned pcr, const Bytes& measurement);
    void pcr_reset(unsigned pcr); // DRTM-style reset, used by measured launch

    SealedBlob seal(const Bytes& plaintext, const PcrPolicy& policy);
    Bytes unseal(const SealedBlob& blob);

    void nv_define(uint32_t index_id, uint32_t size,
                   const std::vector<PcrPolicy>& policies);
    void nv_write(uint32_t index_id, const Bytes& data);
    Bytes nv_read(uint32_t index_id);
    bool nv_defined(uint32_t index_id) const;

    // Serialized blob size = plaintext size + overhead (default 312, so a
    // 10-byte record seals to a 322-byte blob). Applies to single-entry
    // policies; each extra policy entry consumes 33 bytes of the padding.
    void set_seal_overhead(size_t bytes) { seal_overhead_ = bytes; }
    size_t seal_overhead() const { return seal_overhead_; }

    // Optional fixed delay per seal/unseal, for demonstrations.
    void set_latency_ms(unsigned ms) { latency_ms_ = ms; }
    unsigned latency_ms() const { return latency_ms_; }

    TpmCounters& counters() { return counters_; }

    const std::filesystem::path& state_path() const { return state_path_; }

private:
    friend class TeeSession;
    friend TeeSession measured_launch(std::shared_ptr<TpmState>, const Bytes&,
                                      const std::optional<Digest>&);
    TpmState() = default;

    bool policy_matches(const PcrPolicy& policy) const;
    Digest seal_key(const PcrPolicy& policy) const;
    void persist() const;
    void load(const Bytes& raw);
    void apply_latency() const;

    std::vector<Digest> pcrs_{kPcrCount, Digest{}};
    std::map<uint32_t, NvIndex> nv_indices_;
    Bytes root_secret_; // 32 bytes, never leaves the state file
    std::filesystem::path state_path_;
    crypto::Rng rng_;
    size_t seal_overhead_ = 312;
    unsigned latency_ms_ = 0;
    std::atomic<bool> session_live_{false};
    TpmCounters counters_;
};

// Exclusive measured-launch session. At most one live per TpmState.
class TeeSession {
public:
    TeeSession(const TeeSession&) = delete;
    TeeSession& operator=(const TeeSession&) = delete;
    TeeSession(TeeSession&& other) noexcept;
    TeeSession& operator=(TeeSession&&) = delete;
    ~TeeSession();

    const Digest& program_digest() const { return program_digest_; }
    TpmState& tpm() const { return *tpm_; }

private:
    friend TeeSession measured_launch(std::shared_ptr<TpmState>, const Bytes&,
                                      const std::optional<Digest>&);
    TeeSession(std::shared_ptr<TpmState> tpm, const Digest& digest)
        : tpm_(std::move(tpm)), program_digest_(digest) {}

    std::shared_ptr<TpmState> tpm_;
    Digest program_digest_{};
};

// Resets the launch PCR, measures the image into it, and hands out the
// exclusive token. Throws SessionActive if a session is already live,
// MeasurementMismatch if expected_digest is given and does not match.
TeeSession measured_launch(std::shared_ptr<TpmState> tpm,
                           const Bytes& program_image,
                           const std::optional<Digest>& expected_digest = std::nullopt);

// PCR value after launching the given image on a fresh launch PCR.
// Lets a provisioner bind seals to a future execution environment.
Digest launch_pcr_value(const Bytes& program_image);

} // namespace otp::tee

#endif
