#include "otp/circuit.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace otp::circ {

namespace {

const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::And: return "AND";
        case GateKind::Xor: return "XOR";
        case GateKind::Or: return "OR";
        case GateKind::Not: return "NOT";
    }
    return "?";
}

} // namespace

void Circuit::validate() const {
    auto check_wire = [&](Wire w, const std::string& what) {
        if (w >= wire_count)
            throw Error(ErrorCode::ValidationError,
                        what + " references undeclared wire " + std::to_string(w));
    };

    std::set<Wire> inputs;
    for (Wire w : generator_inputs) {
        check_wire(w, "generator input");
        if (!inputs.insert(w).second)
            throw Error(ErrorCode::ValidationError,
                        "duplicate input wire " + std::to_string(w));
    }
    for (Wire w : evaluator_inputs) {
        check_wire(w, "evaluator input");
        if (!inputs.insert(w).second)
            throw Error(ErrorCode::ValidationError,
                        "input wire sets overlap at wire " + std::to_string(w));
    }

    std::vector<bool> driven(wire_count, false);
    for (Wire w : inputs) driven[w] = true;

    for (const Gate& g : gates) {
        check_wire(g.a, "gate");
        check_wire(g.out, "gate");
        if (g.arity() == 2) check_wire(g.b, "gate");
        if (g.out <= g.a || (g.arity() == 2 && g.out <= g.b))
            throw Error(ErrorCode::ValidationError,
                        "gate output wire " + std::to_string(g.out) +
                            " not greater than its inputs");
        if (!driven[g.a] || (g.arity() == 2 && !driven[g.b]))
            throw Error(ErrorCode::ValidationError,
                        "gate at wire " + std::to_string(g.out) +
                            " reads an undriven wire");
        if (driven[g.out])
            throw Error(ErrorCode::ValidationError,
                        "wire " + std::to_string(g.out) + " driven twice");
        driven[g.out] = true;
    }

    for (Wire w : outputs) {
        check_wire(w, "output");
        if (!driven[w])
            throw Error(ErrorCode::ValidationError,
                        "output wire " + std::to_string(w) + " is not driven");
    }
}

Circuit parse_circuit(std::istream& text) {
    Circuit c;
    std::string line;
    size_t line_no = 0;
    bool have_wires = false;

    auto fail = [&](const std::string& msg) -> void {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(text, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;

        auto read_wire = [&]() -> Wire {
            long long v;
            if (!(ss >> v) || v < 0) fail("expected wire id");
            return static_cast<Wire>(v);
        };
        auto read_wires = [&]() {
            std::vector<Wire> ws;
            long long v;
            while (ss >> v) {
                if (v < 0) fail("negative wire id");
                ws.push_back(static_cast<Wire>(v));
            }
            return ws;
        };

        if (tok == "wires") {
            long long n;
            if (!(ss >> n) || n < 0) fail("expected wire count");
            c.wire_count = static_cast<uint32_t>(n);
            have_wires = true;
        } else if (tok == "gen_in") {
            c.generator_inputs = read_wires();
        } else if (tok == "evl_in") {
            c.evaluator_inputs = read_wires();
        } else if (tok == "out") {
            c.outputs = read_wires();
        } else if (tok == "AND" || tok == "XOR" || tok == "OR") {
            Gate g;
            g.kind = tok == "AND" ? GateKind::And
                   : tok == "XOR" ? GateKind::Xor : GateKind::Or;
            g.a = read_wire();
            g.b = read_wire();
            std::string arrow;
            if (!(ss >> arrow) || arrow != "->") fail("expected '->'");
            g.out = read_wire();
            c.gates.push_back(g);
        } else if (tok == "NOT") {
            Gate g;
            g.kind = GateKind::Not;
            g.a = read_wire();
            std::string arrow;
            if (!(ss >> arrow) || arrow != "->") fail("expected '->'");
            g.out = read_wire();
            c.gates.push_back(g);
        } else {
            fail("unknown directive '" + tok + "'");
        }
    }
    if (!have_wires)
        throw Error(ErrorCode::ParseError, "missing 'wires' header");
    c.validate();
    return c;
}

Circuit parse_circuit(const std::string& text) {
    std::istringstream ss(text);
    return parse_circuit(ss);
}

std::string serialize_circuit(const Circuit& c) {
    std::ostringstream out;
    out << "wires " << c.wire_count << "\n";
    auto list = [&](const char* name, const std::vector<Wire>& ws) {
        out << name;
        for (Wire w : ws) out << ' ' << w;
        out << "\n";
    };
    list("gen_in", c.generator_inputs);
    list("evl_in", c.evaluator_inputs);
    list("out", c.outputs);
    for (const Gate& g : c.gates) {
        out << kind_name(g.kind) << ' ' << g.a;
        if (g.arity() == 2) out << ' ' << g.b;
        out << " -> " << g.out << "\n";
    }
    return out.str();
}

Bits eval_plain(const Circuit& c, const Bits& gen_bits, const Bits& evl_bits) {
    if (gen_bits.size() != c.generator_inputs.size() ||
        evl_bits.size() != c.evaluator_inputs.size())
        throw Error(ErrorCode::ArityMismatch, "input width mismatch");
    std::vector<uint8_t> values(c.wire_count, 0);
    for (size_t i = 0; i < gen_bits.size(); ++i)
        values[c.generator_inputs[i]] = gen_bits[i] & 1;
    for (size_t i = 0; i < evl_bits.size(); ++i)
        values[c.evaluator_inputs[i]] = evl_bits[i] & 1;
    for (const Gate& g : c.gates) {
        uint8_t a = values[g.a];
        uint8_t b = g.arity() == 2 ? values[g.b] : 0;
        switch (g.kind) {
            case GateKind::And: values[g.out] = a & b; break;
            case GateKind::Xor: values[g.out] = a ^ b; break;
            case GateKind::Or: values[g.out] = a | b; break;
            case GateKind::Not: values[g.out] = a ^ 1; break;
        }
    }
    Bits out;
    out.reserve(c.outputs.size());
    for (Wire w : c.outputs) out.push_back(values[w]);
    return out;
}

Wire CircuitBuilder::add_gen_input() {
    Wire w = c_.wire_count++;
    c_.generator_inputs.push_back(w);
    return w;
}

Wire CircuitBuilder::add_evl_input() {
    Wire w = c_.wire_count++;
    c_.evaluator_inputs.push_back(w);
    return w;
}

std::vector<Wire> CircuitBuilder::add_gen_inputs(size_t n) {
    std::vector<Wire> ws(n);
    for (auto& w : ws) w = add_gen_input();
    return ws;
}

std::vector<Wire> CircuitBuilder::add_evl_inputs(size_t n) {
    std::vector<Wire> ws(n);
    for (auto& w : ws) w = add_evl_input();
    return ws;
}

Wire CircuitBuilder::gate(GateKind kind, Wire a, Wire b) {
    Wire out = c_.wire_count++;
    c_.gates.push_back(Gate{kind, a, b, out});
    return out;
}

Wire CircuitBuilder::not_gate(Wire a) {
    Wire out = c_.wire_count++;
    c_.gates.push_back(Gate{GateKind::Not, a, 0, out});
    return out;
}

Wire CircuitBuilder::const_bit(bool value) {
    if (c_.wire_count == 0)
        throw Error(ErrorCode::ValidationError,
                    "constants need at least one existing wire");
    if (const0_ == UINT32_MAX) {
        Wire any = c_.generator_inputs.empty()
            ? (c_.evaluator_inputs.empty() ? 0 : c_.evaluator_inputs[0])
            : c_.generator_inputs[0];
        const0_ = xor_gate(any, any);
        const1_ = not_gate(const0_);
    }
    return value ? const1_ : const0_;
}

std::vector<Wire> CircuitBuilder::const_input(const Bits& bits) {
    std::vector<Wire> ws;
    ws.reserve(bits.size());
    for (uint8_t b : bits) ws.push_back(const_bit(b != 0));
    return ws;
}

std::vector<Wire> CircuitBuilder::add_signed(std::span<const Wire> a,
                                             std::span<const Wire> b) {
    if (a.size() != b.size() || a.empty())
        throw Error(ErrorCode::ArityMismatch, "adder operand width mismatch");
    size_t w = a.size();
    std::vector<Wire> sum(w);
    Wire carry = 0;
    for (size_t i = 0; i < w; ++i) {
        size_t k = w - 1 - i; // lsb first
        Wire ax = a[k], bx = b[k];
        Wire axb = xor_gate(ax, bx);
        if (i == 0) {
            sum[k] = axb;
            carry = and_gate(ax, bx);
        } else {
            sum[k] = xor_gate(axb, carry);
            if (i + 1 < w) {
                Wire g = and_gate(ax, bx);
                Wire p = and_gate(axb, carry);
                carry = or_gate(g, p);
            }
        }
    }
    return sum;
}

Wire CircuitBuilder::equal(std::span<const Wire> a, std::span<const Wire> b) {
    if (a.size() != b.size() || a.empty())
        throw Error(ErrorCode::ArityMismatch, "equality operand width mismatch");
    // NOR over per-bit differences.
    Wire diff = xor_gate(a[0], b[0]);
    for (size_t i = 1; i < a.size(); ++i)
        diff = or_gate(diff, xor_gate(a[i], b[i]));
    return not_gate(diff);
}

std::vector<Wire> CircuitBuilder::mux(Wire sel, std::span<const Wire> a,
                                      std::span<const Wire> b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::ArityMismatch, "mux operand width mismatch");
    // sel ? a : b  ==  b ^ (sel & (a ^ b))
    std::vector<Wire> out(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        out[i] = xor_gate(b[i], and_gate(sel, xor_gate(a[i], b[i])));
    return out;
}

std::vector<Wire> CircuitBuilder::and_mask(Wire sel, std::span<const Wire> a) {
    std::vector<Wire> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = and_gate(sel, a[i]);
    return out;
}

void CircuitBuilder::set_outputs(std::span<const Wire> outs) {
    c_.outputs.assign(outs.begin(), outs.end());
}

Circuit CircuitBuilder::build() const {
    Circuit c = c_;
    c.validate();
    return c;
}

Bits int_to_bits(int64_t value, size_t width) {
    Bits bits(width);
    for (size_t i = 0; i < width; ++i)
        bits[width - 1 - i] = static_cast<uint8_t>((value >> i) & 1);
    return bits;
}

int64_t bits_to_signed(const Bits& bits) {
    int64_t v = 0;
    for (uint8_t b : bits) v = (v << 1) | (b & 1);
    size_t w = bits.size();
    if (w < 64 && bits[0]) v -= (int64_t{1} << w);
    return v;
}

} // namespace otp::circ
