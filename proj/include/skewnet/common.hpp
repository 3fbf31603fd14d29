#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace skewnet {

using Scalar = std::complex<double>;

/// Default relative tolerance for invertibility and residual checks.
inline constexpr double kDefaultTol = 1e-9;

enum class Err {
  AlgebraMismatch,
  SignatureMismatch,
  NotInvertible,
  UnsupportedCliffordInverse,
  NotEvolvable,
  NotClosed,
  MissingEdge,
  BadBox,
  FrameSingular,
  Incompatible,
  NotZeroFolded,
  ZeroPolynomial,
  NotARoot,
  NotIndependent,
  DegenerateColumns,
  AllZero,
  OnSphere,
  ZeroE,
  IdentityMap,
  DegenerateFixedPoints,
  TooShort,
  NearAntipodal,
  ZeroBhat,
  DegenerateDet,
  Degenerate,
  LabelConflict,
  BranchFailure,
  PatternViolation,
  GradeViolation,
  NotEmbeddable,
  Validation,
  Io,
};

const char* err_name(Err kind);

class Error : public std::runtime_error {
 public:
  Error(Err kind, const std::string& msg)
      : std::runtime_error(std::string(err_name(kind)) + ": " + msg), kind_(kind) {}

  Err kind() const { return kind_; }

 private:
  Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& msg) { throw Error(kind, msg); }

inline bool near(double a, double b, double tol = kDefaultTol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace skewnet
