#include "otp/garble.hpp"

#include <openssl/sha.h>

#include <cstring>
#include <sstream>

namespace otp::garble {

namespace {

constexpr char kMagic[9] = "OTPGC001";

// One hash drives both the entry mask (17 bytes) and the tag (15 bytes).
// Labels are uniformly random per gen call, so (labels, gate, entry) never
// repeats as hash input.
crypto::Digest entry_pad(const WireLabel& a, const WireLabel* b,
                         uint32_t gate_index, uint8_t entry) {
    uint8_t buf[5 + 17 + 17 + 4 + 1];
    size_t n = 0;
    std::memcpy(buf, "gctbl", 5);
    n += 5;
    std::memcpy(buf + n, a.key.data(), 16);
    buf[n + 16] = a.perm;
    n += 17;
    if (b) {
        std::memcpy(buf + n, b->key.data(), 16);
        buf[n + 16] = b->perm;
        n += 17;
    }
    for (int i = 0; i < 4; ++i) buf[n++] = static_cast<uint8_t>(gate_index >> (8 * i));
    buf[n++] = entry;
    return crypto::sha256(buf, n);
}

TableEntry encrypt_entry(const crypto::Digest& pad, const WireLabel& out_label) {
    TableEntry e{};
    for (int i = 0; i < 16; ++i) e[i] = out_label.key[i] ^ pad[i];
    e[16] = out_label.perm ^ pad[16];
    std::memcpy(e.data() + 17, pad.data() + 17, 15);
    return e;
}

WireLabel decrypt_entry(const crypto::Digest& pad, const TableEntry& e) {
    if (std::memcmp(e.data() + 17, pad.data() + 17, 15) != 0)
        throw Error(ErrorCode::DecryptionFailure, "garbled entry failed to authenticate");
    WireLabel out;
    for (int i = 0; i < 16; ++i) out.key[i] = e[i] ^ pad[i];
    out.perm = (e[16] ^ pad[16]) & 1;
    return out;
}

uint8_t plain_gate(circ::GateKind kind, uint8_t a, uint8_t b) {
    switch (kind) {
        case circ::GateKind::And: return a & b;
        case circ::GateKind::Xor: return a ^ b;
        case circ::GateKind::Or: return a | b;
        case circ::GateKind::Not: return a ^ 1;
    }
    return 0;
}

} // namespace

WireLabel WireLabel::deserialize(const Bytes& raw) {
    if (raw.size() != 17)
        throw Error(ErrorCode::ParseError, "wire label must be 17 bytes");
    WireLabel l;
    std::memcpy(l.key.data(), raw.data(), 16);
    l.perm = raw[16] & 1;
    return l;
}

GenResult gen(const circ::Circuit& c, const Bits& gen_bits, crypto::Rng& rng) {
    if (gen_bits.size() != c.generator_inputs.size())
        throw Error(ErrorCode::ArityMismatch, "generator input width mismatch");

    std::vector<WireLabelPair> pairs(c.wire_count);
    for (auto& p : pairs) {
        rng.fill(p.label0.key.data(), 16);
        rng.fill(p.label1.key.data(), 16);
        uint8_t perm = static_cast<uint8_t>(rng.next_u64() & 1);
        p.label0.perm = perm;
        p.label1.perm = perm ^ 1;
    }

    GenResult result;
    result.gc.circuit = c;
    result.gc.tables.reserve(c.gates.size());
    for (uint32_t gi = 0; gi < c.gates.size(); ++gi) {
        const circ::Gate& g = c.gates[gi];
        GarbledGate gg;
        if (g.arity() == 1) {
            gg.entries.resize(2);
            for (uint8_t va = 0; va < 2; ++va) {
                const WireLabel& la = pairs[g.a].get(va);
                const WireLabel& lo = pairs[g.out].get(plain_gate(g.kind, va, 0));
                gg.entries[la.perm] = encrypt_entry(entry_pad(la, nullptr, gi, la.perm), lo);
            }
        } else {
            gg.entries.resize(4);
            for (uint8_t va = 0; va < 2; ++va) {
                for (uint8_t vb = 0; vb < 2; ++vb) {
                    const WireLabel& la = pairs[g.a].get(va);
                    const WireLabel& lb = pairs[g.b].get(vb);
                    const WireLabel& lo = pairs[g.out].get(plain_gate(g.kind, va, vb));
                    uint8_t idx = static_cast<uint8_t>((la.perm << 1) | lb.perm);
                    gg.entries[idx] = encrypt_entry(entry_pad(la, &lb, gi, idx), lo);
                }
            }
        }
        result.gc.tables.push_back(std::move(gg));
    }

    result.gc.output_perm0.reserve(c.outputs.size());
    for (circ::Wire w : c.outputs)
        result.gc.output_perm0.push_back(pairs[w].label0.perm);

    result.gc.generator_labels.reserve(c.generator_inputs.size());
    for (size_t i = 0; i < c.generator_inputs.size(); ++i)
        result.gc.generator_labels.push_back(
            pairs[c.generator_inputs[i]].get(gen_bits[i] & 1));

    result.evaluator_pairs.reserve(c.evaluator_inputs.size());
    for (circ::Wire w : c.evaluator_inputs)
        result.evaluator_pairs.push_back(pairs[w]);
    return result;
}

Bits evl(const GarbledCircuit& gc, const std::vector<WireLabel>& selected) {
    const circ::Circuit& c = gc.circuit;
    if (selected.size() != c.evaluator_inputs.size())
        throw Error(ErrorCode::ArityMismatch, "key file width mismatch");
    if (gc.tables.size() != c.gates.size())
        throw Error(ErrorCode::ParseError, "table count does not match circuit");

    std::vector<WireLabel> active(c.wire_count);
    std::vector<bool> have(c.wire_count, false);
    for (size_t i = 0; i < c.generator_inputs.size(); ++i) {
        active[c.generator_inputs[i]] = gc.generator_labels[i];
        have[c.generator_inputs[i]] = true;
    }
    for (size_t i = 0; i < c.evaluator_inputs.size(); ++i) {
        active[c.evaluator_inputs[i]] = selected[i];
        have[c.evaluator_inputs[i]] = true;
    }

    for (uint32_t gi = 0; gi < c.gates.size(); ++gi) {
        const circ::Gate& g = c.gates[gi];
        const GarbledGate& gg = gc.tables[gi];
        const WireLabel& la = active[g.a];
        if (!have[g.a])
            throw Error(ErrorCode::DecryptionFailure, "gate input wire has no label");
        if (g.arity() == 1) {
            if (gg.entries.size() != 2)
                throw Error(ErrorCode::ParseError, "bad table arity");
            active[g.out] = decrypt_entry(entry_pad(la, nullptr, gi, la.perm),
                                          gg.entries[la.perm]);
        } else {
            if (!have[g.b])
                throw Error(ErrorCode::DecryptionFailure, "gate input wire has no label");
            if (gg.entries.size() != 4)
                throw Error(ErrorCode::ParseError, "bad table arity");
            const WireLabel& lb = active[g.b];
            uint8_t idx = static_cast<uint8_t>((la.perm << 1) | lb.perm);
            active[g.out] = decrypt_entry(entry_pad(la, &lb, gi, idx), gg.entries[idx]);
        }
        have[g.out] = true;
    }

    Bits out;
    out.reserve(c.outputs.size());
    for (size_t i = 0; i < c.outputs.size(); ++i) {
        if (!have[c.outputs[i]])
            throw Error(ErrorCode::DecryptionFailure, "output wire has no label");
        out.push_back(static_cast<uint8_t>(active[c.outputs[i]].perm ^
                                           gc.output_perm0[i]));
    }
    return out;
}

Bytes GarbledCircuit::serialize() const {
    Bytes out;
    append(out, kMagic, 8);
    std::string text = circ::serialize_circuit(circuit);
    put_u32(out, static_cast<uint32_t>(text.size()));
    append(out, text.data(), text.size());
    put_u32(out, static_cast<uint32_t>(tables.size()));
    for (const auto& gg : tables) {
        out.push_back(static_cast<uint8_t>(gg.entries.size()));
        for (const auto& e : gg.entries) append(out, e.data(), e.size());
    }
    put_u32(out, static_cast<uint32_t>(output_perm0.size()));
    for (uint8_t p : output_perm0) out.push_back(p);
    put_u32(out, static_cast<uint32_t>(generator_labels.size()));
    for (const auto& l : generator_labels) append(out, l.serialize());
    return out;
}

GarbledCircuit GarbledCircuit::deserialize(const Bytes& raw) {
    ByteReader r(raw);
    Bytes magic = r.take(8);
    if (std::memcmp(magic.data(), kMagic, 8) != 0)
        throw Error(ErrorCode::ParseError, "bad garbled circuit magic");
    GarbledCircuit gc;
    uint32_t text_len = r.u32();
    Bytes text = r.take(text_len);
    gc.circuit = circ::parse_circuit(std::string(text.begin(), text.end()));
    uint32_t n_tables = r.u32();
    gc.tables.reserve(n_tables);
    for (uint32_t i = 0; i < n_tables; ++i) {
        GarbledGate gg;
        uint8_t n = r.u8();
        gg.entries.resize(n);
        for (auto& e : gg.entries) {
            Bytes raw_e = r.take(kEntrySize);
            std::memcpy(e.data(), raw_e.data(), kEntrySize);
        }
        gc.tables.push_back(std::move(gg));
    }
    uint32_t n_out = r.u32();
    gc.output_perm0.resize(n_out);
    for (auto& p : gc.output_perm0) p = r.u8();
    uint32_t n_gen = r.u32();
    gc.generator_labels.reserve(n_gen);
    for (uint32_t i = 0; i < n_gen; ++i)
        gc.generator_labels.push_back(WireLabel::deserialize(r.take(17)));
    if (!r.done())
        throw Error(ErrorCode::ParseError, "trailing bytes in garbled circuit");
    return gc;
}

std::string keyfile_serialize(const std::vector<WireLabel>& labels) {
    std::string out;
    out.reserve(labels.size() * 35);
    for (const auto& l : labels) {
        out += to_hex(l.serialize());
        out += '\n';
    }
    return out;
}

std::vector<WireLabel> keyfile_parse(const std::string& text) {
    std::vector<WireLabel> labels;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        labels.push_back(WireLabel::deserialize(from_hex(line)));
    }
    return labels;
}

} // namespace otp::garble
