#ifndef OTP_OTP_HPP
#define OTP_OTP_HPP

#include <filesystem>

#include "otp/genomics.hpp"
#include "otp/otm.hpp"

namespace otp::flow {

// Simulated payload images. The mode is part of the measured image, so
// provisioning and execution run under distinct program digests; NV
// policies admit both.
extern const Bytes kTxtProvisionImage;
extern const Bytes kTxtExecuteImage;
extern const Bytes kGcProvisionImage;
extern const Bytes kGcExecuteImage;

constexpr uint32_t kFlagNvIndex = 1;
constexpr uint32_t kMkNvIndex = 2;

// A shipped device: TPM state file next to a "hard drive" directory.
// Adversary tests may snapshot/restore hd/; tpm.state is out of reach.
struct Box {
    std::filesystem::path root;
    std::shared_ptr<tee::TpmState> tpm;

    std::filesystem::path hd() const { return root / "hd"; }
    std::filesystem::path tpm_path() const { return root / "tpm.state"; }

    static Box create(const std::filesystem::path& root, crypto::Rng& rng);
    static Box open(const std::filesystem::path& root);
};

struct TxtOnlyImage {
    std::vector<tee::SealedBlob> sealed_vendor_records; // one per 10-byte record
    uint32_t flag_nv_index = kFlagNvIndex;
    crypto::Digest payload_digest{}; // execution-mode payload measurement

    void save(const std::filesystem::path& path) const;
    static TxtOnlyImage load(const std::filesystem::path& path);
};

struct OtpResult {
    Bits output_bits;      // 16 bits, msb first
    int16_t decoded = 0;   // total risk in deci-units
};

struct ExecHooks {
    std::function<void()> after_flag_write;
    std::function<void(size_t)> after_record;
};

tee::TeeSession launch(Box& box, const Bytes& image);

// TXT-only phase 1: flag := 0 in NVRAM, each vendor record sealed
// individually onto the hard drive.
TxtOnlyImage txt_provision(tee::TeeSession& session,
                           const std::vector<geno::SnpRecord>& vendor_records,
                           const std::filesystem::path& hd_dir,
                           bool allow_reprovision = false);

// TXT-only phase 2: flag 0->1 before any unseal, then one record unsealed,
// compared and wiped per iteration. exposure_watermark (if given) receives
// the max number of simultaneously unsealed vendor records.
OtpResult txt_execute(tee::TeeSession& session, const TxtOnlyImage& image,
                      const std::vector<geno::SnpRecord>& client_records,
                      const ExecHooks& hooks = {},
                      uint64_t* exposure_watermark = nullptr);

struct GcArtifacts {
    std::filesystem::path gc_file;
    otm::OtmImage otm_image;
};

// GC-based provisioning: garble under the provisioning session, provision
// evaluator pairs into the OTM, persist the garbled circuit. The plaintext
// pair list dies here.
GcArtifacts gc_provision(tee::TeeSession& session, const circ::Circuit& circuit,
                         const Bits& vendor_bits, otm::Mode mode,
                         const std::filesystem::path& hd_dir, crypto::Rng& rng,
                         bool allow_reprovision = false);

// Trusted selection (session required); writes the key file to disk.
std::filesystem::path gc_select(tee::TeeSession& session,
                                const otm::OtmImage& image,
                                const Bits& client_bits, size_t chunk_size = 1,
                                const otm::SelectHooks& hooks = {});

// Offline evaluation; no session, no TPM.
OtpResult gc_evl(const std::filesystem::path& gc_file,
                 const std::vector<garble::WireLabel>& selected);

// Full Bob-side flow: select inside a session, then evaluate outside it.
OtpResult gc_run(Box& box, const GcArtifacts& artifacts, const Bits& client_bits,
                 size_t chunk_size = 1);

OtpResult decode_result(const Bits& output_bits);

} // namespace otp::flow

#endif
