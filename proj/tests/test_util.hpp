#ifndef OTP_TEST_UTIL_HPP
#define OTP_TEST_UTIL_HPP

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "otp/circuit.hpp"
#include "otp/crypto.hpp"

namespace otp_test {

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("otp_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("OTP_DATA_DIR")) return env;
    return "data";
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

inline otp::Bits random_bits(otp::crypto::Rng& rng, size_t n) {
    otp::Bits bits(n);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
    return bits;
}

// Random topologically valid circuit; every wire is driven by construction.
inline otp::circ::Circuit random_circuit(otp::crypto::Rng& rng,
                                         size_t max_gates = 64,
                                         size_t max_inputs = 16) {
    using namespace otp::circ;
    CircuitBuilder b;
    size_t n_gen = 1 + rng.next_u64() % max_inputs;
    size_t n_evl = 1 + rng.next_u64() % max_inputs;
    std::vector<Wire> wires;
    for (Wire w : b.add_gen_inputs(n_gen)) wires.push_back(w);
    for (Wire w : b.add_evl_inputs(n_evl)) wires.push_back(w);

    size_t n_gates = 1 + rng.next_u64() % max_gates;
    for (size_t i = 0; i < n_gates; ++i) {
        GateKind kind = static_cast<GateKind>(rng.next_u64() % 4);
        Wire a = wires[rng.next_u64() % wires.size()];
        Wire out;
        if (kind == GateKind::Not) {
            out = b.not_gate(a);
        } else {
            Wire second = wires[rng.next_u64() % wires.size()];
            out = b.gate(kind, a, second);
        }
        wires.push_back(out);
    }
    size_t n_out = 1 + rng.next_u64() % 4;
    std::vector<Wire> outs;
    for (size_t i = 0; i < n_out; ++i)
        outs.push_back(wires[rng.next_u64() % wires.size()]);
    b.set_outputs(outs);
    return b.build();
}

} // namespace otp_test

#endif
