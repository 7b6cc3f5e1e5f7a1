#pragma once

// Shared matrix aliases, bath labels and the error type used across qfridge.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qfridge {

inline constexpr int kDim = 8;

using Complex = std::complex<double>;
using Matrix8c = Eigen::Matrix<Complex, kDim, kDim>;
using Matrix8 = Eigen::Matrix<double, kDim, kDim>;
using Vector8 = Eigen::Matrix<double, kDim, 1>;

enum class Bath { Hot = 0, Room = 1, Cold = 2 };

inline constexpr std::array<Bath, 3> kBaths{Bath::Hot, Bath::Room, Bath::Cold};

// Numeric bath indices 1, 2, 3 used in the operator and rate-matrix tables map
// to the atoms H, R, C in this order.
inline constexpr std::array<Bath, 3> kNumberedBaths{Bath::Hot, Bath::Room,
                                                    Bath::Cold};

constexpr std::size_t index_of(Bath b) { return static_cast<std::size_t>(b); }

constexpr std::string_view name_of(Bath b) {
  switch (b) {
    case Bath::Hot: return "H";
    case Bath::Room: return "R";
    case Bath::Cold: return "C";
  }
  return "?";
}

enum class ErrorCode {
  NonPositiveParameter,
  DegenerateBohrFrequency,
  EigenvalueMismatch,
  ZeroFrequency,
  CommutatorViolation,
  DomainError,
  StepSizeUnstable,
  DegenerateKernel,
  NegativePopulation,
  OracleDisagreement,
  FormMismatch,
  SecondLawViolation,
  InvalidState,
  InvalidConfig,
  Io,
};

constexpr std::string_view name_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::DegenerateBohrFrequency: return "DegenerateBohrFrequency";
    case ErrorCode::EigenvalueMismatch: return "EigenvalueMismatch";
    case ErrorCode::ZeroFrequency: return "ZeroFrequency";
    case ErrorCode::CommutatorViolation: return "CommutatorViolation";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::StepSizeUnstable: return "StepSizeUnstable";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::NegativePopulation: return "NegativePopulation";
    case ErrorCode::OracleDisagreement: return "OracleDisagreement";
    case ErrorCode::FormMismatch: return "FormMismatch";
    case ErrorCode::SecondLawViolation: return "SecondLawViolation";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(name_of(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Hermitian conjugate as a concrete matrix (avoids aliasing surprises).
inline Matrix8c dagger(const Matrix8c& m) { return m.adjoint().eval(); }

}  // namespace qfridge
