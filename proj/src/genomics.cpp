#include "otp/genomics.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>

namespace otp::geno {

namespace {

constexpr uint32_t kMaxSnpId = (1u << 28) - 1;

int base_index(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T': return 3;
        default: return -1;
    }
}

bool is_nocall(char c) {
    char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u == '-' || u == '0' || u == 'D' || u == 'I';
}

std::string lower_hex(uint64_t v, int width) {
    static const char* digits = "0123456789abcdef";
    std::string out(width, '0');
    for (int i = width - 1; i >= 0 && v; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

uint32_t parse_hex_field(const std::string& s, size_t pos, size_t len) {
    uint32_t v = 0;
    for (size_t i = 0; i < len; ++i) {
        int d = hex_digit(s[pos + i]);
        if (d < 0)
            throw Error(ErrorCode::ParseError, "invalid hex digit in compact input");
        v = (v << 4) | static_cast<uint32_t>(d);
    }
    return v;
}

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

uint8_t allele_code(char a1, char a2) {
    int i = base_index(a1), j = base_index(a2);
    if (i < 0 || j < 0) {
        if (is_nocall(a1) && is_nocall(a2)) return kNoMatchAllele;
        throw Error(ErrorCode::UnknownAllele,
                    std::string("unknown allele pair '") + a1 + a2 + "'");
    }
    if (i > j) std::swap(i, j);
    // code = position of (i,j), i<=j, in lexicographic order
    static const uint8_t table[4][4] = {
        {0, 1, 2, 3},
        {0, 4, 5, 6},
        {0, 0, 7, 8},
        {0, 0, 0, 9},
    };
    return table[i][j];
}

uint8_t allele_code(const std::string& pair) {
    if (pair.size() != 2)
        throw Error(ErrorCode::UnknownAllele, "allele pair must be two characters");
    return allele_code(pair[0], pair[1]);
}

int8_t parse_risk_deci(const std::string& text) {
    std::string s = strip(text);
    if (s.empty())
        throw Error(ErrorCode::MalformedRow, "empty risk factor");
    bool neg = false;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    long integral = 0;
    bool any = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        integral = integral * 10 + (s[i] - '0');
        if (integral > 1000) throw Error(ErrorCode::RiskOverflow, "risk factor too large");
        any = true;
        ++i;
    }
    long frac = 0;
    if (i < s.size() && s[i] == '.') {
        ++i;
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            throw Error(ErrorCode::MalformedRow, "malformed risk factor");
        frac = s[i] - '0';
        ++i;
    }
    if (!any || i != s.size())
        throw Error(ErrorCode::MalformedRow, "malformed risk factor '" + s + "'");
    long deci = integral * 10 + frac;
    if (neg) deci = -deci;
    if (deci < -128 || deci > 127)
        throw Error(ErrorCode::RiskOverflow,
                    "risk factor " + s + " outside signed 8-bit deci-units");
    return static_cast<int8_t>(deci);
}

std::string encode_snp_id(uint32_t id) {
    if (id > kMaxSnpId)
        throw Error(ErrorCode::RecordOverflow, "SNP id exceeds 28 bits");
    return lower_hex(id, 7);
}

std::string encode_client(const std::vector<SnpRecord>& records) {
    std::string out;
    out.reserve(records.size() * 8);
    for (const auto& r : records) {
        out += encode_snp_id(r.snp_id);
        out += lower_hex(r.allele_code & 0xf, 1);
    }
    return out;
}

std::string encode_vendor(const std::vector<SnpRecord>& records) {
    std::string out;
    out.reserve(records.size() * 10);
    for (const auto& r : records) {
        out += encode_snp_id(r.snp_id);
        out += lower_hex(r.allele_code & 0xf, 1);
        out += lower_hex(static_cast<uint8_t>(r.risk_deci), 2);
    }
    return out;
}

static std::vector<SnpRecord> parse_compact(const std::string& raw, size_t stride,
                                            bool with_risk) {
    std::string s = strip(raw);
    if (s.size() % stride != 0)
        throw Error(ErrorCode::ParseError,
                    "compact input length not divisible by record stride");
    std::vector<SnpRecord> records;
    records.reserve(s.size() / stride);
    for (size_t pos = 0; pos < s.size(); pos += stride) {
        SnpRecord r;
        r.snp_id = parse_hex_field(s, pos, 7);
        r.allele_code = static_cast<uint8_t>(parse_hex_field(s, pos + 7, 1));
        if (with_risk) {
            r.risk_deci = static_cast<int8_t>(parse_hex_field(s, pos + 8, 2));
            r.has_risk = true;
        }
        records.push_back(r);
    }
    return records;
}

std::vector<SnpRecord> parse_client(const std::string& compact) {
    return parse_compact(compact, 8, false);
}

std::vector<SnpRecord> parse_vendor(const std::string& compact) {
    return parse_compact(compact, 10, true);
}

std::string preprocess_ancestry(std::istream& raw) {
    std::string line;
    std::string out;
    bool header_skipped = false;
    while (std::getline(raw, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ss(line);
        std::string f;
        while (std::getline(ss, f, '\t')) fields.push_back(f);
        if (fields.size() != 5)
            throw Error(ErrorCode::MalformedRow,
                        "expected 5 tab-separated fields, got " +
                            std::to_string(fields.size()));
        const std::string& rsid = fields[0];
        if (rsid.size() < 3 || rsid.compare(0, 2, "rs") != 0)
            throw Error(ErrorCode::NonNumericId, "SNP id lacks 'rs' prefix: " + rsid);
        uint64_t id = 0;
        for (size_t i = 2; i < rsid.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(rsid[i])))
                throw Error(ErrorCode::NonNumericId, "non-numeric SNP id: " + rsid);
            id = id * 10 + (rsid[i] - '0');
            if (id > kMaxSnpId)
                throw Error(ErrorCode::RecordOverflow, "SNP id exceeds 28 bits: " + rsid);
        }
        const std::string& a1 = fields[3];
        const std::string& a2 = fields[4];
        if (a1.size() != 1 || a2.size() != 1)
            throw Error(ErrorCode::UnknownAllele, "alleles must be single characters");
        out += encode_snp_id(static_cast<uint32_t>(id));
        out += lower_hex(allele_code(a1[0], a2[0]), 1);
    }
    return out;
}

std::vector<SnpRecord> load_vendor_tsv(std::istream& in) {
    std::vector<SnpRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream ss(line);
        std::string f;
        while (std::getline(ss, f, '\t')) fields.push_back(f);
        if (fields.size() != 4)
            throw Error(ErrorCode::MalformedRow,
                        "vendor table rows need 4 fields: " + line);
        const std::string& rsid = fields[0];
        if (rsid.size() < 3 || rsid.compare(0, 2, "rs") != 0)
            throw Error(ErrorCode::NonNumericId, "SNP id lacks 'rs' prefix: " + rsid);
        SnpRecord r;
        r.snp_id = static_cast<uint32_t>(std::stoul(rsid.substr(2)));
        if (r.snp_id > kMaxSnpId)
            throw Error(ErrorCode::RecordOverflow, "SNP id exceeds 28 bits");
        r.allele_code = allele_code(strip(fields[2]));
        r.risk_deci = parse_risk_deci(fields[3]);
        r.has_risk = true;
        records.push_back(r);
    }
    return records;
}

int16_t risk_plain(const std::vector<SnpRecord>& vendor,
                   const std::vector<SnpRecord>& client) {
    uint16_t total = 0;
    for (const auto& c : client) {
        for (const auto& v : vendor) {
            uint16_t term = 0;
            if (c.snp_id == v.snp_id && c.allele_code == v.allele_code)
                term = static_cast<uint16_t>(static_cast<int16_t>(v.risk_deci));
            total = static_cast<uint16_t>(total + term);
        }
    }
    return static_cast<int16_t>(total);
}

Bits client_bits(const std::vector<SnpRecord>& records) {
    return hex_to_bits(encode_client(records));
}

GenomicCircuit compile_genomic(const std::vector<SnpRecord>& vendor_records,
                               size_t client_record_count) {
    if (vendor_records.empty())
        throw Error(ErrorCode::EmptyVendorInput, "no vendor records");
    if (client_record_count == 0)
        throw Error(ErrorCode::ValidationError, "client record count must be >= 1");
    for (const auto& r : vendor_records)
        if (r.snp_id > kMaxSnpId)
            throw Error(ErrorCode::RecordOverflow, "SNP id exceeds 28 bits");

    circ::CircuitBuilder b;
    struct VendorWires {
        std::vector<circ::Wire> id, allele, risk16;
    };
    std::vector<VendorWires> vendor(vendor_records.size());
    for (auto& vw : vendor) {
        vw.id = b.add_gen_inputs(28);
        vw.allele = b.add_gen_inputs(4);
        std::vector<circ::Wire> risk8 = b.add_gen_inputs(8);
        // sign-extend to 16 bits; pure wiring, no gates
        vw.risk16.assign(8, risk8[0]);
        vw.risk16.insert(vw.risk16.end(), risk8.begin(), risk8.end());
    }
    struct ClientWires {
        std::vector<circ::Wire> id, allele;
    };
    std::vector<ClientWires> client(client_record_count);
    for (auto& cw : client) {
        cw.id = b.add_evl_inputs(28);
        cw.allele = b.add_evl_inputs(4);
    }

    std::vector<circ::Wire> total(16, b.const_bit(false));
    for (const auto& cw : client) {
        for (const auto& vw : vendor) {
            circ::Wire id_match = b.equal(cw.id, vw.id);
            circ::Wire al_match = b.equal(cw.allele, vw.allele);
            circ::Wire match = b.and_gate(id_match, al_match);
            std::vector<circ::Wire> term = b.and_mask(match, vw.risk16);
            total = b.add_signed(total, term);
        }
    }
    b.set_outputs(total);

    GenomicCircuit out;
    out.circuit = b.build();
    out.vendor_bits.reserve(vendor_records.size() * 40);
    for (const auto& r : vendor_records) {
        Bits id = circ::int_to_bits(r.snp_id, 28);
        Bits al = circ::int_to_bits(r.allele_code, 4);
        Bits risk = circ::int_to_bits(static_cast<uint8_t>(r.risk_deci), 8);
        out.vendor_bits.insert(out.vendor_bits.end(), id.begin(), id.end());
        out.vendor_bits.insert(out.vendor_bits.end(), al.begin(), al.end());
        out.vendor_bits.insert(out.vendor_bits.end(), risk.begin(), risk.end());
    }
    return out;
}

uint64_t genomic_gate_count(size_t vendor_records, size_t client_records) {
    // Calibrated once from tiny compiles; the construction is exact in the
    // record-count product.
    static const uint64_t base = [] {
        SnpRecord r{1, 0, 10, true};
        GenomicCircuit one = compile_genomic({r}, 1);
        return static_cast<uint64_t>(one.circuit.gates.size());
    }();
    static const uint64_t per_pair = [] {
        SnpRecord r{1, 0, 10, true};
        GenomicCircuit two = compile_genomic({r, r}, 1);
        return static_cast<uint64_t>(two.circuit.gates.size()) - base;
    }();
    uint64_t constant = base - per_pair;
    return constant + per_pair * static_cast<uint64_t>(vendor_records) *
                          static_cast<uint64_t>(client_records);
}

} // namespace otp::geno
