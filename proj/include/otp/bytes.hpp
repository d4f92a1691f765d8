#ifndef OTP_BYTES_HPP
#define OTP_BYTES_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "otp/errors.hpp"

namespace otp {

using Bytes = std::vector<uint8_t>;
using Bits = std::vector<uint8_t>; // one byte per bit, values 0/1

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

inline void append(Bytes& out, const Bytes& more) {
    out.insert(out.end(), more.begin(), more.end());
}

inline void append(Bytes& out, const void* data, size_t n) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    out.insert(out.end(), p, p + n);
}

inline void put_u16(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void put_u32(Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_u64(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

// Little-endian reader over a byte buffer; throws IoError on truncation.
class ByteReader {
public:
    explicit ByteReader(const Bytes& buf) : buf_(buf) {}

    uint8_t u8() { need(1); return buf_[pos_++]; }

    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(buf_[pos_] | (buf_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    Bytes take(size_t n) {
        need(n);
        Bytes out(buf_.begin() + pos_, buf_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    bool done() const { return pos_ == buf_.size(); }
    size_t remaining() const { return buf_.size() - pos_; }

private:
    void need(size_t n) {
        if (pos_ + n > buf_.size())
            throw Error(ErrorCode::IoError, "truncated buffer");
    }

    const Bytes& buf_;
    size_t pos_ = 0;
};

inline std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t byte : b) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

inline int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0)
        throw Error(ErrorCode::ParseError, "odd-length hex string");
    Bytes out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = hex_digit(s[i]), lo = hex_digit(s[i + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorCode::ParseError, "invalid hex digit");
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

// Expands a hex string into bits, most-significant digit bit first.
inline Bits hex_to_bits(const std::string& hex) {
    Bits bits;
    bits.reserve(hex.size() * 4);
    for (char c : hex) {
        int d = hex_digit(c);
        if (d < 0) throw Error(ErrorCode::ParseError, "invalid hex digit");
        for (int i = 3; i >= 0; --i) bits.push_back(static_cast<uint8_t>((d >> i) & 1));
    }
    return bits;
}

} // namespace otp

#endif
