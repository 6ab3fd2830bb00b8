#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace repeaterlab {

enum class ErrorCode {
    dimension_mismatch,
    not_hermitian,
    not_normalized,
    not_unitary,
    negative_eigenvalue,
    angle_out_of_range,
    no_entanglement,
    incomplete_measurement,
    not_projective,
    rank_not_one,
    support_violation,
    invalid_schmidt,
    operator_inequality,
    parse_error,
    io_error,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::not_hermitian: return "not_hermitian";
    case ErrorCode::not_normalized: return "not_normalized";
    case ErrorCode::not_unitary: return "not_unitary";
    case ErrorCode::negative_eigenvalue: return "negative_eigenvalue";
    case ErrorCode::angle_out_of_range: return "angle_out_of_range";
    case ErrorCode::no_entanglement: return "no_entanglement";
    case ErrorCode::incomplete_measurement: return "incomplete_measurement";
    case ErrorCode::not_projective: return "not_projective";
    case ErrorCode::rank_not_one: return "rank_not_one";
    case ErrorCode::support_violation: return "support_violation";
    case ErrorCode::invalid_schmidt: return "invalid_schmidt";
    case ErrorCode::operator_inequality: return "operator_inequality";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    }
    return "unknown";
}

/// Library exception; `code()` distinguishes failure classes for callers and the CLI.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

namespace detail {
inline void require(bool condition, ErrorCode code, const std::string &msg) {
    if (!condition) {
        throw Error(code, msg);
    }
}
} // namespace detail

} // namespace repeaterlab
