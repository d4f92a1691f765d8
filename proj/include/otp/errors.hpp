#ifndef OTP_ERRORS_HPP
#define OTP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace otp {

enum class ErrorCode {
    InvalidPcr,
    InvalidMeasurement,
    SessionActive,
    SessionRequired,
    MeasurementMismatch,
    PolicyMismatch,
    AuthFailure,
    IndexUndefined,
    IndexDefined,
    SizeExceeded,
    ParseError,
    ValidationError,
    ArityMismatch,
    RecordOverflow,
    RiskOverflow,
    MalformedRow,
    NonNumericId,
    UnknownAllele,
    DecryptionFailure,
    OneTimeViolation,
    FlagAlreadyDefined,
    EmptyVendorInput,
    ResourceLimit,
    IoError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidPcr: return "InvalidPcr";
        case ErrorCode::InvalidMeasurement: return "InvalidMeasurement";
        case ErrorCode::SessionActive: return "SessionActive";
        case ErrorCode::SessionRequired: return "SessionRequired";
        case ErrorCode::MeasurementMismatch: return "MeasurementMismatch";
        case ErrorCode::PolicyMismatch: return "PolicyMismatch";
        case ErrorCode::AuthFailure: return "AuthFailure";
        case ErrorCode::IndexUndefined: return "IndexUndefined";
        case ErrorCode::IndexDefined: return "IndexDefined";
        case ErrorCode::SizeExceeded: return "SizeExceeded";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::RecordOverflow: return "RecordOverflow";
        case ErrorCode::RiskOverflow: return "RiskOverflow";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NonNumericId: return "NonNumericId";
        case ErrorCode::UnknownAllele: return "UnknownAllele";
        case ErrorCode::DecryptionFailure: return "DecryptionFailure";
        case ErrorCode::OneTimeViolation: return "OneTimeViolation";
        case ErrorCode::FlagAlreadyDefined: return "FlagAlreadyDefined";
        case ErrorCode::EmptyVendorInput: return "EmptyVendorInput";
        case ErrorCode::ResourceLimit: return "ResourceLimit";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace otp

#endif
