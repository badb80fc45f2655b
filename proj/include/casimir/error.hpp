/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown by every module.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace casimir {

enum class errc {
    NonPositiveLength,
    AmplitudeTooLarge,
    OutOfRange,
    NonPositiveIntensity,
    SupersonicWall,
    GridTooCoarse,
    NonResonantDrive,
    QuadratureNotConverged,
    DimensionMismatch,
    InsufficientSmoothness,
    DriveStillOn,
    CFLViolation,
    InvalidConfig,
};

inline std::string_view to_string(errc c) {
    switch (c) {
    case errc::NonPositiveLength: return "NonPositiveLength";
    case errc::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case errc::OutOfRange: return "OutOfRange";
    case errc::NonPositiveIntensity: return "NonPositiveIntensity";
    case errc::SupersonicWall: return "SupersonicWall";
    case errc::GridTooCoarse: return "GridTooCoarse";
    case errc::NonResonantDrive: return "NonResonantDrive";
    case errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case errc::DimensionMismatch: return "DimensionMismatch";
    case errc::InsufficientSmoothness: return "InsufficientSmoothness";
    case errc::DriveStillOn: return "DriveStillOn";
    case errc::CFLViolation: return "CFLViolation";
    case errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

// Non-fatal flag attached to results computed outside a stated validity window.
struct Validity {
    bool out_of_validity = false;
    std::string note;
};

} // namespace casimir
