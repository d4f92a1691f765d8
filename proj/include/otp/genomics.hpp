#ifndef OTP_GENOMICS_HPP
#define OTP_GENOMICS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "otp/circuit.hpp"

namespace otp::geno {

// One genomic record. Risk factors are stored in deci-units (value x10)
// so fractional factors like 1.1 fit the signed 8-bit field.
struct SnpRecord {
    uint32_t snp_id = 0;   // 28-bit reference number
    uint8_t allele_code = 0; // 4-bit allele-pair code
    int8_t risk_deci = 0;  // vendor records only
    bool has_risk = false;

    bool operator==(const SnpRecord&) const = default;
};

// Unordered allele-pair codes over {A,C,G,T}:
// AA=0 AC=1 AG=2 AT=3 CC=4 CG=5 CT=6 GG=7 GT=8 TT=9.
// Indels and no-calls map to 15, which never matches a vendor code.
constexpr uint8_t kNoMatchAllele = 15;
uint8_t allele_code(char a1, char a2);
uint8_t allele_code(const std::string& pair);

// "1.1" -> 11, "-7" -> -70. At most one fractional digit.
// Throws RiskOverflow outside [-128, 127] deci-units.
int8_t parse_risk_deci(const std::string& text);

std::string encode_snp_id(uint32_t id); // 7 lowercase hex digits

// Client records: 8 hex digits each. Vendor records: 10 (risk appended).
std::string encode_client(const std::vector<SnpRecord>& records);
std::string encode_vendor(const std::vector<SnpRecord>& records);
std::vector<SnpRecord> parse_client(const std::string& compact);
std::vector<SnpRecord> parse_vendor(const std::string& compact);

// AncestryDNA raw genotype stream -> single-line compact client input.
// Input: '#' comments, a header line, then rsid/chromosome/position/
// allele1/allele2 rows separated by tabs.
std::string preprocess_ancestry(std::istream& raw);

// Vendor table file: rsid <TAB> position <TAB> alleles <TAB> risk.
// Multi-mapping SNPs appear as repeated rows. Position is carried for
// provenance only and dropped here.
std::vector<SnpRecord> load_vendor_tsv(std::istream& in);

// Reference double-loop risk accumulation; wraps on 16-bit overflow to
// mirror the circuit. Returns total risk in deci-units.
int16_t risk_plain(const std::vector<SnpRecord>& vendor,
                   const std::vector<SnpRecord>& client);

struct GenomicCircuit {
    circ::Circuit circuit;
    Bits vendor_bits; // generator input assignment, msb-first per record
};

// Fixed-shape circuit computing risk_plain: topology depends only on
// (vendor count, client count), never on record values. Vendor values
// travel as generator inputs; evaluator input width = client_count * 32.
GenomicCircuit compile_genomic(const std::vector<SnpRecord>& vendor_records,
                               size_t client_record_count);

// Exact gate count of compile_genomic for given record counts, without
// materializing the circuit.
uint64_t genomic_gate_count(size_t vendor_records, size_t client_records);

Bits client_bits(const std::vector<SnpRecord>& records);

} // namespace otp::geno

#endif
