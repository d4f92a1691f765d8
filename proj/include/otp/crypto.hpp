#ifndef OTP_CRYPTO_HPP
#define OTP_CRYPTO_HPP

#include <array>
#include <cstdint>
#include <random>

#include "otp/bytes.hpp"

namespace otp::crypto {

using Digest = std::array<uint8_t, 32>;

Digest sha256(const uint8_t* data, size_t len);
Digest sha256(const Bytes& data);

// Derives a key by hashing a domain label with the key material.
Digest kdf(const std::string& label, const Bytes& material);

// AES-256-GCM. Returns nonce(12) || ciphertext || tag(16).
Bytes aead_seal(const Digest& key, const Bytes& nonce12, const Bytes& plaintext);
// Inverse; throws AuthFailure on tag mismatch.
Bytes aead_open(const Digest& key, const Bytes& sealed);

// Deterministic byte source, seedable for reproducible runs.
class Rng {
public:
    Rng();                       // seeded from the OS entropy source
    explicit Rng(uint64_t seed); // deterministic

    void fill(uint8_t* out, size_t n);
    Bytes bytes(size_t n);
    uint64_t next_u64();

private:
    std::mt19937_64 engine_;
};

} // namespace otp::crypto

#endif
