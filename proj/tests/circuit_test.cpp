#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "otp/circuit.hpp"
#include "test_util.hpp"

using namespace otp;
using namespace otp::circ;

TEST_CASE("parse a one-gate AND circuit") {
    Circuit c = parse_circuit(
        "# tiny example\n"
        "wires 3\n"
        "gen_in 0\n"
        "evl_in 1\n"
        "out 2\n"
        "AND 0 1 -> 2\n");
    REQUIRE(c.gates.size() == 1);
    CHECK(c.gates[0].kind == GateKind::And);
    CHECK(eval_plain(c, {1}, {1}) == Bits{1});
    CHECK(eval_plain(c, {1}, {0}) == Bits{0});
    CHECK(eval_plain(c, {0}, {1}) == Bits{0});
}

TEST_CASE("parser rejects malformed and invalid circuits") {
    // undeclared wire
    try {
        parse_circuit("wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 99 -> 2\n");
        FAIL("undeclared wire accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
    }
    // missing arrow, with line number in the message
    try {
        parse_circuit("wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 1 2\n");
        FAIL("missing arrow accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
    // missing header
    CHECK_THROWS_AS(parse_circuit("gen_in 0\n"), Error);
    // output wire not driven
    CHECK_THROWS_AS(parse_circuit("wires 3\ngen_in 0\nevl_in 1\nout 2\n"), Error);
    // non-topological gate order
    CHECK_THROWS_AS(
        parse_circuit("wires 4\ngen_in 0\nevl_in 1\nout 2\nAND 0 3 -> 2\nXOR 0 1 -> 3\n"),
        Error);
    // overlapping input sets
    CHECK_THROWS_AS(parse_circuit("wires 2\ngen_in 0\nevl_in 0\nout 1\nNOT 0 -> 1\n"),
                    Error);
}

TEST_CASE("serialize/parse round trip over 1000 random circuits") {
    crypto::Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        Circuit c = otp_test::random_circuit(rng);
        Circuit back = parse_circuit(serialize_circuit(c));
        CHECK(serialize_circuit(back) == serialize_circuit(c));
        Bits a = otp_test::random_bits(rng, c.generator_inputs.size());
        Bits b = otp_test::random_bits(rng, c.evaluator_inputs.size());
        CHECK(eval_plain(back, a, b) == eval_plain(c, a, b));
    }
}

TEST_CASE("xor chain computes parity") {
    for (size_t n : {1, 2, 7, 16}) {
        CircuitBuilder b;
        std::vector<Wire> in = b.add_evl_inputs(n);
        Wire acc = in[0];
        for (size_t i = 1; i < n; ++i) acc = b.xor_gate(acc, in[i]);
        b.set_outputs(std::vector<Wire>{acc});
        Circuit c = b.build();
        CHECK(eval_plain(c, {}, Bits(n, 1)) == Bits{static_cast<uint8_t>(n & 1)});
    }
}

TEST_CASE("eval_plain rejects width mismatches") {
    Circuit c = parse_circuit("wires 3\ngen_in 0\nevl_in 1\nout 2\nAND 0 1 -> 2\n");
    CHECK_THROWS_AS(eval_plain(c, {1, 0}, {1}), Error);
    CHECK_THROWS_AS(eval_plain(c, {1}, {}), Error);
}

namespace {

// Single-use adder circuit: a and b as evaluator input halves.
int64_t run_adder(size_t width, int64_t a, int64_t b) {
    CircuitBuilder builder;
    std::vector<Wire> wa = builder.add_evl_inputs(width);
    std::vector<Wire> wb = builder.add_evl_inputs(width);
    builder.set_outputs(builder.add_signed(wa, wb));
    Circuit c = builder.build();
    Bits in = int_to_bits(a, width);
    Bits bb = int_to_bits(b, width);
    in.insert(in.end(), bb.begin(), bb.end());
    return bits_to_signed(eval_plain(c, {}, in));
}

} // namespace

TEST_CASE("add_signed wraps in two's complement") {
    CHECK(run_adder(16, 32767, 1) == -32768);
    CHECK(run_adder(16, -1, 1) == 0);
    CHECK(run_adder(16, -32768, -1) == 32767);
    CHECK(run_adder(8, 100, 27) == 127);
}

TEST_CASE("add_signed(8) fuzz against native arithmetic mod 2^8") {
    crypto::Rng rng(77);
    // One circuit, many inputs: shape does not depend on values.
    CircuitBuilder builder;
    std::vector<Wire> wa = builder.add_evl_inputs(8);
    std::vector<Wire> wb = builder.add_evl_inputs(8);
    builder.set_outputs(builder.add_signed(wa, wb));
    Circuit c = builder.build();
    for (int i = 0; i < 10000; ++i) {
        auto a = static_cast<int8_t>(rng.next_u64());
        auto b = static_cast<int8_t>(rng.next_u64());
        Bits in = int_to_bits(a, 8);
        Bits bb = int_to_bits(b, 8);
        in.insert(in.end(), bb.begin(), bb.end());
        auto expect = static_cast<int8_t>(static_cast<uint8_t>(a) +
                                          static_cast<uint8_t>(b));
        CHECK(bits_to_signed(eval_plain(c, {}, in)) == expect);
    }
}

TEST_CASE("equality gadget") {
    crypto::Rng rng(5);
    CircuitBuilder builder;
    std::vector<Wire> wa = builder.add_evl_inputs(28);
    std::vector<Wire> wb = builder.add_evl_inputs(28);
    builder.set_outputs(std::vector<Wire>{builder.equal(wa, wb)});
    Circuit c = builder.build();
    for (int i = 0; i < 200; ++i) {
        Bits a = otp_test::random_bits(rng, 28);
        Bits in = a;
        in.insert(in.end(), a.begin(), a.end());
        CHECK(eval_plain(c, {}, in) == Bits{1});
        Bits b = a;
        b[rng.next_u64() % 28] ^= 1;
        in = a;
        in.insert(in.end(), b.begin(), b.end());
        CHECK(eval_plain(c, {}, in) == Bits{0});
    }
}

TEST_CASE("mux and and_mask gadgets") {
    crypto::Rng rng(6);
    CircuitBuilder builder;
    Wire sel = builder.add_evl_input();
    std::vector<Wire> wa = builder.add_evl_inputs(4);
    std::vector<Wire> wb = builder.add_evl_inputs(4);
    std::vector<Wire> m = builder.mux(sel, wa, wb);
    std::vector<Wire> masked = builder.and_mask(sel, wa);
    std::vector<Wire> outs = m;
    outs.insert(outs.end(), masked.begin(), masked.end());
    builder.set_outputs(outs);
    Circuit c = builder.build();
    for (int i = 0; i < 100; ++i) {
        Bits a = otp_test::random_bits(rng, 4);
        Bits b = otp_test::random_bits(rng, 4);
        for (uint8_t s : {0, 1}) {
            Bits in{s};
            in.insert(in.end(), a.begin(), a.end());
            in.insert(in.end(), b.begin(), b.end());
            Bits out = eval_plain(c, {}, in);
            Bits expect = s ? a : b;
            Bits expect_mask = s ? a : Bits(4, 0);
            expect.insert(expect.end(), expect_mask.begin(), expect_mask.end());
            CHECK(out == expect);
        }
    }
}

TEST_CASE("const_bit wires evaluate to their values") {
    CircuitBuilder b;
    Wire in = b.add_evl_input();
    Wire zero = b.const_bit(false);
    Wire one = b.const_bit(true);
    Wire both = b.or_gate(zero, in);
    b.set_outputs(std::vector<Wire>{zero, one, both});
    Circuit c = b.build();
    CHECK(eval_plain(c, {}, {0}) == Bits({0, 1, 0}));
    CHECK(eval_plain(c, {}, {1}) == Bits({0, 1, 1}));
}

TEST_CASE("int_to_bits / bits_to_signed round trip") {
    for (int64_t v : {0, 1, -1, 127, -128, 32767, -32768, 12345}) {
        size_t w = (v >= -128 && v <= 127) ? 8 : 16;
        CHECK(bits_to_signed(int_to_bits(v, w)) == v);
    }
    CHECK(int_to_bits(5, 4) == Bits({0, 1, 0, 1}));
}
