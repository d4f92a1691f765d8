#ifndef OTP_CIRCUIT_HPP
#define OTP_CIRCUIT_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "otp/bytes.hpp"

namespace otp::circ {

using Wire = uint32_t;

enum class GateKind : uint8_t { And, Xor, Or, Not };

struct Gate {
    GateKind kind;
    Wire a = 0;
    Wire b = 0; // unused for NOT
    Wire out = 0;

    unsigned arity() const { return kind == GateKind::Not ? 1 : 2; }
};

// Topologically ordered Boolean circuit. Wires 0..wire_count-1; every
// gate's output id is strictly greater than its input ids.
struct Circuit {
    uint32_t wire_count = 0;
    std::vector<Gate> gates;
    std::vector<Wire> generator_inputs;
    std::vector<Wire> evaluator_inputs;
    std::vector<Wire> outputs;

    void validate() const; // throws ValidationError
};

Circuit parse_circuit(std::istream& text);
Circuit parse_circuit(const std::string& text);
std::string serialize_circuit(const Circuit& c);

Bits eval_plain(const Circuit& c, const Bits& gen_bits, const Bits& evl_bits);

// Incremental builder for composing gadgets. Wire ids are handed out in
// increasing order so the topological invariant holds by construction.
class CircuitBuilder {
public:
    Wire add_gen_input();
    Wire add_evl_input();
    std::vector<Wire> add_gen_inputs(size_t n);
    std::vector<Wire> add_evl_inputs(size_t n);

    Wire gate(GateKind kind, Wire a, Wire b);
    Wire not_gate(Wire a);
    Wire and_gate(Wire a, Wire b) { return gate(GateKind::And, a, b); }
    Wire xor_gate(Wire a, Wire b) { return gate(GateKind::Xor, a, b); }
    Wire or_gate(Wire a, Wire b) { return gate(GateKind::Or, a, b); }

    // Constant wires, materialized from the first available input wire.
    Wire const_bit(bool value);
    std::vector<Wire> const_input(const Bits& bits);

    // Two's-complement adder over msb-first bit vectors; wraps on overflow.
    std::vector<Wire> add_signed(std::span<const Wire> a, std::span<const Wire> b);
    // 1 iff a == b bitwise.
    Wire equal(std::span<const Wire> a, std::span<const Wire> b);
    // sel ? a : b, per bit.
    std::vector<Wire> mux(Wire sel, std::span<const Wire> a, std::span<const Wire> b);
    // sel ? a : 0, per bit.
    std::vector<Wire> and_mask(Wire sel, std::span<const Wire> a);

    void set_outputs(std::span<const Wire> outs);
    Circuit build() const;

private:
    Circuit c_;
    Wire const0_ = UINT32_MAX;
    Wire const1_ = UINT32_MAX;
};

// Signed two's-complement helpers over msb-first bit vectors.
Bits int_to_bits(int64_t value, size_t width);
int64_t bits_to_signed(const Bits& bits);

} // namespace otp::circ

#endif
