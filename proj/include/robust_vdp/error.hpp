#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robust_vdp {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    MissingRepresentation,
    InconsistentCone,
    DualNotLI,
    UnsupportedCone,
    DeskScaleExceeded,
    SupNotExists,
    Validation,
    Syntax,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code drives CLI exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace robust_vdp
