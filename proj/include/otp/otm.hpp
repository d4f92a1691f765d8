#ifndef OTP_OTM_HPP
#define OTP_OTM_HPP

#include <filesystem>
#include <functional>

#include "otp/garble.hpp"
#include "otp/teesim.hpp"

namespace otp::otm {

enum class Mode { SealAll, MasterKey };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// On-disk one-time-memory artifact: meta + pairs.bin in a directory on
// the (adversary-snapshottable) hard drive, plus NVRAM indices inside
// the TPM state file.
struct OtmImage {
    Mode mode = Mode::MasterKey;
    uint32_t evaluator_width = 0;
    uint32_t flag_nv_index = 0;
    uint32_t mk_nv_index = 0; // MasterKey mode only
    std::filesystem::path dir;

    void save_meta() const;
    static OtmImage load(const std::filesystem::path& dir);
};

struct ProvisionSpec {
    Mode mode = Mode::MasterKey;
    std::filesystem::path dir;
    uint32_t flag_nv_index = 1;
    uint32_t mk_nv_index = 2;
    // Alternatives admitted by the NV indices (provisioning + execution).
    std::vector<tee::PcrPolicy> nv_policies;
    // Seal binding for MK / pair blobs: the execution-mode environment.
    tee::PcrPolicy seal_policy;
    bool allow_reprovision = false;
};

// Test-only crash injection points inside select. Throwing from a hook
// simulates a crash at that point.
struct SelectHooks {
    std::function<void()> after_flag_write;
    std::function<void(size_t)> after_label; // index of label just released
};

struct SelectResult {
    std::vector<garble::WireLabel> labels;
    // High watermark of simultaneously decrypted pair plaintexts.
    uint64_t exposure_watermark = 0;
};

// Initializes the one-timeness flag to 0 and protects the label pairs per
// mode. The plaintext pair list must be discarded by the caller afterwards.
OtmImage provision(tee::TeeSession& session,
                   const std::vector<garble::WireLabelPair>& pairs,
                   const ProvisionSpec& spec, crypto::Rng& rng);

// Single atomic whole-input selection. Flips the flag before releasing any
// label; a repeat call (or a replayed disk snapshot) fails with
// OneTimeViolation. Unchosen labels are never decrypted.
SelectResult select(tee::TeeSession& session, const OtmImage& image,
                    const Bits& input_bits, size_t chunk_size = 1,
                    const SelectHooks& hooks = {});

// Watermark recorded by the most recent select on this image's directory.
uint64_t exposure_report(const OtmImage& image);

} // namespace otp::otm

#endif
