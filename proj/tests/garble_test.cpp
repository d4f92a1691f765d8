#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "otp/garble.hpp"
#include "test_util.hpp"

using namespace otp;
using namespace otp::garble;

namespace {

std::vector<WireLabel> pick(const std::vector<WireLabelPair>& pairs,
                            const Bits& bits) {
    std::vector<WireLabel> out;
    out.reserve(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) out.push_back(pairs[i].get(bits[i]));
    return out;
}

} // namespace

TEST_CASE("one-gate AND circuit garbles to one 4-entry table") {
    circ::Circuit c = circ::parse_circuit(
        "wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 1 -> 2\n");
    crypto::Rng rng(1);
    for (uint8_t a : {0, 1}) {
        GenResult r = gen(c, {a}, rng);
        REQUIRE(r.gc.tables.size() == 1);
        CHECK(r.gc.tables[0].entries.size() == 4);
        REQUIRE(r.evaluator_pairs.size() == 1);
        CHECK(r.gc.generator_labels.size() == 1);
        for (uint8_t b : {0, 1}) {
            Bits out = evl(r.gc, pick(r.evaluator_pairs, {b}));
            CHECK(out == Bits{static_cast<uint8_t>(a & b)});
        }
    }
}

TEST_CASE("NOT gates garble to 2-entry tables") {
    circ::Circuit c = circ::parse_circuit(
        "wires 2\nevl_in 0\ngen_in\nout 1\nNOT 0 -> 1\n");
    crypto::Rng rng(2);
    GenResult r = gen(c, {}, rng);
    REQUIRE(r.gc.tables.size() == 1);
    CHECK(r.gc.tables[0].entries.size() == 2);
    CHECK(evl(r.gc, pick(r.evaluator_pairs, {0})) == Bits{1});
}

TEST_CASE("evl matches eval_plain on random circuits") {
    crypto::Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        circ::Circuit c = otp_test::random_circuit(rng);
        Bits a = otp_test::random_bits(rng, c.generator_inputs.size());
        Bits b = otp_test::random_bits(rng, c.evaluator_inputs.size());
        GenResult r = gen(c, a, rng);
        CHECK(evl(r.gc, pick(r.evaluator_pairs, b)) == circ::eval_plain(c, a, b));
    }
}

TEST_CASE("224-bit evaluator input yields exactly 224 label pairs") {
    circ::CircuitBuilder b;
    std::vector<circ::Wire> in = b.add_evl_inputs(224);
    circ::Wire acc = in[0];
    for (size_t i = 1; i < in.size(); ++i) acc = b.xor_gate(acc, in[i]);
    b.set_outputs(std::vector<circ::Wire>{acc});
    crypto::Rng rng(9);
    GenResult r = gen(b.build(), {}, rng);
    CHECK(r.evaluator_pairs.size() == 224);
    for (const auto& p : r.evaluator_pairs) {
        CHECK(p.label0.perm != p.label1.perm);
        CHECK(p.label0.key != p.label1.key);
    }
}

TEST_CASE("distinct seeds yield disjoint label sets") {
    circ::Circuit c = circ::parse_circuit(
        "wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 1 -> 2\n");
    crypto::Rng r1(1001), r2(1002);
    GenResult g1 = gen(c, {1}, r1);
    GenResult g2 = gen(c, {1}, r2);
    std::set<std::array<uint8_t, 16>> keys;
    auto collect = [&](const GenResult& g) {
        for (const auto& p : g.evaluator_pairs) {
            keys.insert(p.label0.key);
            keys.insert(p.label1.key);
        }
        for (const auto& l : g.gc.generator_labels) keys.insert(l.key);
    };
    collect(g1);
    size_t after_first = keys.size();
    collect(g2);
    CHECK(keys.size() == after_first + 3);
}

TEST_CASE("forged labels fail authentication") {
    crypto::Rng rng(5);
    circ::Circuit c = otp_test::random_circuit(rng, 32, 8);
    Bits a = otp_test::random_bits(rng, c.generator_inputs.size());
    Bits b = otp_test::random_bits(rng, c.evaluator_inputs.size());
    GenResult r = gen(c, a, rng);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<WireLabel> sel = pick(r.evaluator_pairs, b);
        WireLabel forged;
        rng.fill(forged.key.data(), forged.key.size());
        forged.perm = static_cast<uint8_t>(rng.next_u64() & 1);
        sel[rng.next_u64() % sel.size()] = forged;
        CHECK_THROWS_AS(evl(r.gc, sel), Error);
    }
    // Labels from an independent garbling of the same circuit are just as
    // useless as random forgeries.
    crypto::Rng other(777);
    GenResult stale = gen(c, a, other);
    std::vector<WireLabel> sel = pick(r.evaluator_pairs, b);
    sel[0] = stale.evaluator_pairs[0].get(b[0]);
    CHECK_THROWS_AS(evl(r.gc, sel), Error);
}

TEST_CASE("wrong selection width is rejected") {
    circ::Circuit c = circ::parse_circuit(
        "wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 1 -> 2\n");
    crypto::Rng rng(3);
    GenResult r = gen(c, {1}, rng);
    try {
        evl(r.gc, {});
        FAIL("empty selection accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArityMismatch);
    }
}

TEST_CASE("garbled circuit file round trip") {
    crypto::Rng rng(8);
    circ::Circuit c = otp_test::random_circuit(rng, 48, 12);
    Bits a = otp_test::random_bits(rng, c.generator_inputs.size());
    Bits b = otp_test::random_bits(rng, c.evaluator_inputs.size());
    GenResult r = gen(c, a, rng);
    Bytes raw = r.gc.serialize();
    GarbledCircuit back = GarbledCircuit::deserialize(raw);
    CHECK(back.serialize() == raw);
    CHECK(evl(back, pick(r.evaluator_pairs, b)) == circ::eval_plain(c, a, b));

    Bytes truncated(raw.begin(), raw.end() - 1);
    CHECK_THROWS_AS(GarbledCircuit::deserialize(truncated), Error);
}

TEST_CASE("tampered table entry fails during evaluation") {
    crypto::Rng rng(12);
    circ::Circuit c = circ::parse_circuit(
        "wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 1 -> 2\n");
    GenResult r = gen(c, {1}, rng);
    // Only two of the four entries are reachable with Alice's label fixed;
    // tampering must break exactly those, and never yield a wrong output.
    size_t failures = 0;
    for (size_t entry = 0; entry < 4; ++entry) {
        GarbledCircuit bad = r.gc;
        bad.tables[0].entries[entry][20] ^= 0x40;
        for (uint8_t b : {0, 1}) {
            try {
                Bits out = evl(bad, pick(r.evaluator_pairs, {b}));
                CHECK(out == Bits{static_cast<uint8_t>(1 & b)}); // untouched entry
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::DecryptionFailure);
                ++failures;
            }
        }
    }
    CHECK(failures == 2);
}

TEST_CASE("garbled shape is independent of generator input values") {
    crypto::Rng rng(15);
    circ::Circuit c = otp_test::random_circuit(rng, 40, 8);
    Bits a0(c.generator_inputs.size(), 0);
    Bits a1(c.generator_inputs.size(), 1);
    GenResult g0 = gen(c, a0, rng);
    GenResult g1 = gen(c, a1, rng);
    REQUIRE(g0.gc.tables.size() == g1.gc.tables.size());
    for (size_t i = 0; i < g0.gc.tables.size(); ++i)
        CHECK(g0.gc.tables[i].entries.size() == g1.gc.tables[i].entries.size());
    CHECK(g0.gc.generator_labels.size() == g1.gc.generator_labels.size());
    CHECK(g0.gc.serialize().size() == g1.gc.serialize().size());
}

TEST_CASE("key file round trip") {
    crypto::Rng rng(21);
    std::vector<WireLabel> labels(17);
    for (auto& l : labels) {
        rng.fill(l.key.data(), l.key.size());
        l.perm = static_cast<uint8_t>(rng.next_u64() & 1);
    }
    std::string text = keyfile_serialize(labels);
    // One lowercase-hex 34-character line per label.
    size_t lines = 0;
    for (char ch : text) {
        if (ch == '\n') ++lines;
        else CHECK(((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f')));
    }
    CHECK(lines == labels.size());
    CHECK(keyfile_parse(text) == labels);
    CHECK_THROWS_AS(keyfile_parse("zz\n"), Error);
}
