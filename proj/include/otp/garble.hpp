#ifndef OTP_GARBLE_HPP
#define OTP_GARBLE_HPP

#include <array>
#include <cstdint>

#include "otp/circuit.hpp"
#include "otp/crypto.hpp"

namespace otp::garble {

// 16-byte wire key plus point-and-permute bit.
struct WireLabel {
    std::array<uint8_t, 16> key{};
    uint8_t perm = 0;

    Bytes serialize() const {
        Bytes out(key.begin(), key.end());
        out.push_back(perm);
        return out;
    }
    static WireLabel deserialize(const Bytes& raw);
    bool operator==(const WireLabel&) const = default;
};

struct WireLabelPair {
    WireLabel label0;
    WireLabel label1; // permute bits are complementary

    const WireLabel& get(uint8_t bit) const { return bit ? label1 : label0; }
};

// Encrypted truth-table entry: 17-byte masked label + 15-byte tag
// (forgery probability 2^-120).
constexpr size_t kEntrySize = 32;
using TableEntry = std::array<uint8_t, kEntrySize>;

struct GarbledGate {
    std::vector<TableEntry> entries; // 4 for binary gates, 2 for NOT
};

struct GarbledCircuit {
    circ::Circuit circuit; // topology only
    std::vector<GarbledGate> tables;
    std::vector<uint8_t> output_perm0;      // permute bit of label0 per output wire
    std::vector<WireLabel> generator_labels; // one label per generator input

    Bytes serialize() const;
    static GarbledCircuit deserialize(const Bytes& raw);
};

struct GenResult {
    GarbledCircuit gc;
    std::vector<WireLabelPair> evaluator_pairs; // for OTM provisioning only
};

// Key-generation phase: fresh labels for every wire, encrypted gate
// tables, generator input reduced to single labels.
GenResult gen(const circ::Circuit& c, const Bits& gen_bits, crypto::Rng& rng);

// Evaluation phase: walks the circuit with the selected evaluator labels;
// never needs the unchosen labels. Throws DecryptionFailure on any label
// that does not authenticate.
Bits evl(const GarbledCircuit& gc, const std::vector<WireLabel>& selected);

// KeyFile: one 17-byte label per line as lowercase hex, line order =
// evaluator input bit order (most-significant hex digit first).
std::string keyfile_serialize(const std::vector<WireLabel>& labels);
std::vector<WireLabel> keyfile_parse(const std::string& text);

} // namespace otp::garble

#endif
