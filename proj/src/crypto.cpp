#include "otp/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "otp/errors.hpp"

namespace otp::crypto {

Digest sha256(const uint8_t* data, size_t len) {
    Digest out{};
    SHA256(data, len, out.data());
    return out;
}

Digest sha256(const Bytes& data) {
    return sha256(data.data(), data.size());
}

Digest kdf(const std::string& label, const Bytes& material) {
    Bytes input;
    input.reserve(label.size() + 1 + material.size());
    append(input, label.data(), label.size());
    input.push_back(0);
    append(input, material);
    return sha256(input);
}

Bytes aead_seal(const Digest& key, const Bytes& nonce12, const Bytes& plaintext) {
    if (nonce12.size() != 12)
        throw Error(ErrorCode::IoError, "nonce must be 12 bytes");
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw Error(ErrorCode::IoError, "EVP_CIPHER_CTX_new failed");
    Bytes out = nonce12;
    out.resize(12 + plaintext.size() + 16);
    int len = 0;
    bool ok = EVP_EncryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.data(), nonce12.data()) == 1
        && EVP_EncryptUpdate(ctx, out.data() + 12, &len, plaintext.data(),
                             static_cast<int>(plaintext.size())) == 1
        && EVP_EncryptFinal_ex(ctx, out.data() + 12 + len, &len) == 1
        && EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, 16,
                               out.data() + 12 + plaintext.size()) == 1;
    EVP_CIPHER_CTX_free(ctx);
    if (!ok) throw Error(ErrorCode::IoError, "AEAD encryption failed");
    return out;
}

Bytes aead_open(const Digest& key, const Bytes& sealed) {
    if (sealed.size() < 12 + 16)
        throw Error(ErrorCode::AuthFailure, "sealed blob too short");
    size_t ct_len = sealed.size() - 12 - 16;
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw Error(ErrorCode::IoError, "EVP_CIPHER_CTX_new failed");
    Bytes out(ct_len);
    Bytes tag(sealed.end() - 16, sealed.end());
    int len = 0;
    bool ok = EVP_DecryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, key.data(), sealed.data()) == 1
        && EVP_DecryptUpdate(ctx, out.data(), &len, sealed.data() + 12,
                             static_cast<int>(ct_len)) == 1
        && EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, 16, tag.data()) == 1
        && EVP_DecryptFinal_ex(ctx, out.data() + len, &len) == 1;
    EVP_CIPHER_CTX_free(ctx);
    if (!ok) throw Error(ErrorCode::AuthFailure, "AEAD authentication failed");
    return out;
}

Rng::Rng() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    engine_.seed(seq);
}

Rng::Rng(uint64_t seed) : engine_(seed) {}

void Rng::fill(uint8_t* out, size_t n) {
    size_t i = 0;
    while (i < n) {
        uint64_t v = engine_();
        for (int b = 0; b < 8 && i < n; ++b, ++i)
            out[i] = static_cast<uint8_t>(v >> (8 * b));
    }
}

Bytes Rng::bytes(size_t n) {
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

uint64_t Rng::next_u64() {
    return engine_();
}

} // namespace otp::crypto
