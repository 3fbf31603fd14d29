#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "skewnet/common.hpp"

namespace skewnet::algebra {

// ---------------------------------------------------------------------------
// Quaternions

struct Quaternion {
  double w = 0, x = 0, y = 0, z = 0;

  double re() const { return w; }
  Quaternion vec() const { return {0, x, y, z}; }
  Quaternion conj() const { return {w, -x, -y, -z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const;
  bool is_imaginary(double tol = kDefaultTol) const;
};

Quaternion operator+(const Quaternion& a, const Quaternion& b);
Quaternion operator-(const Quaternion& a, const Quaternion& b);
Quaternion operator-(const Quaternion& a);
Quaternion operator*(const Quaternion& a, const Quaternion& b);
Quaternion operator*(double s, const Quaternion& a);
Quaternion inverse(const Quaternion& a, double tol = kDefaultTol);

inline Quaternion quat_scalar(double s) { return {s, 0, 0, 0}; }
inline Quaternion quat_i() { return {0, 1, 0, 0}; }
inline Quaternion quat_j() { return {0, 0, 1, 0}; }
inline Quaternion quat_k() { return {0, 0, 0, 1}; }

/// Scalar product of R^4; restricted to imaginary quaternions it is the
/// Euclidean scalar product of R^3.
double dot(const Quaternion& a, const Quaternion& b);
/// Cross product of the imaginary parts, returned as an imaginary quaternion.
Quaternion cross(const Quaternion& a, const Quaternion& b);
double dist(const Quaternion& a, const Quaternion& b);

// ---------------------------------------------------------------------------
// Complex 2x2 matrices, row-major [[a, b], [c, d]].

struct Mat2 {
  Scalar a{0}, b{0}, c{0}, d{0};

  Scalar trace() const { return a + d; }
  Scalar det() const { return a * d - b * c; }
  double norm() const;  // Frobenius
};

Mat2 operator+(const Mat2& m, const Mat2& n);
Mat2 operator-(const Mat2& m, const Mat2& n);
Mat2 operator-(const Mat2& m);
Mat2 operator*(const Mat2& m, const Mat2& n);
Mat2 operator*(Scalar s, const Mat2& m);

Mat2 mat2_identity();
Mat2 adjugate(const Mat2& m);
Mat2 inverse(const Mat2& m, double tol = kDefaultTol);

/// Embedding H -> C^{2x2} with 1 -> I, i -> [[0,i],[i,0]], j -> [[0,1],[-1,0]],
/// k -> [[i,0],[0,-i]]. Multiplicative homomorphism.
Mat2 quat_to_mat2(const Quaternion& q);

/// Distance of m from the image of the embedding, relative to |m|.
double quaternion_pattern_residual(const Mat2& m);

/// Nearest quaternion preimage (projection onto the image of quat_to_mat2).
Quaternion mat2_to_quat(const Mat2& m);

// ---------------------------------------------------------------------------
// Clifford algebra Cl(p,q), e_i e_j = -e_j e_i, e_i^2 = -<e_i,e_i>.
// Dense coefficients indexed by blade bitmask; bit k <-> generator e_{k+1}.

class Clifford {
 public:
  Clifford() = default;
  Clifford(int p, int q);
  Clifford(int p, int q, std::vector<double> coeffs);

  static Clifford scalar(int p, int q, double s);
  /// Grade-1 vector from components in R^{p,q}.
  static Clifford vector(int p, int q, const std::vector<double>& v);

  int p() const { return p_; }
  int q() const { return q_; }
  int dim() const { return p_ + q_; }
  int blades() const { return 1 << (p_ + q_); }
  double coeff(unsigned blade) const { return c_[blade]; }
  double& coeff(unsigned blade) { return c_[blade]; }
  const std::vector<double>& coeffs() const { return c_; }

  double norm() const;
  /// Reversal: grade k picks up (-1)^{k(k-1)/2}.
  Clifford reverse() const;
  Clifford grade(int k) const;
  double max_grade_coeff(int k) const;
  /// Components of the grade-1 part as a vector in R^{p,q}.
  std::vector<double> vector_part() const;
  bool same_signature(const Clifford& o) const { return p_ == o.p_ && q_ == o.q_; }

 private:
  int p_ = 0, q_ = 0;
  std::vector<double> c_{0.0};
};

Clifford operator+(const Clifford& a, const Clifford& b);
Clifford operator-(const Clifford& a, const Clifford& b);
Clifford operator-(const Clifford& a);
Clifford operator*(const Clifford& a, const Clifford& b);
Clifford operator*(double s, const Clifford& a);

/// Inverse via reversal. Defined whenever a * reverse(a) is a nonzero scalar,
/// which covers scalars, invertible vectors and Lipschitz-group products.
Clifford inverse(const Clifford& a, double tol = kDefaultTol);

/// Inner product of R^{p,q} on grade-1 vectors, computed as -(ab+ba)/2.
double quadric_inner(const Clifford& a, const Clifford& b);

// ---------------------------------------------------------------------------
// AlgebraElement: tagged union over the three algebras.

enum class Tag { Quat, Mat, Cliff };

class Value {
 public:
  Value() : v_(Quaternion{}) {}
  Value(Quaternion q) : v_(q) {}
  Value(Mat2 m) : v_(m) {}
  Value(Clifford c) : v_(std::move(c)) {}

  Tag tag() const { return static_cast<Tag>(v_.index()); }
  const Quaternion& quat() const;
  const Mat2& mat() const;
  const Clifford& cliff() const;

  bool same_kind(const Value& o) const;
  Value one() const;   // unit of the same algebra
  Value zero() const;  // zero of the same algebra
  double norm() const;

  /// trace-type invariant of the parallelogram evolution: tr for matrices,
  /// 2 Re for quaternions, twice the grade-0 part for Clifford elements.
  Scalar trace_invariant() const;
  /// det-type invariant: det for matrices, |q|^2 for quaternions.
  /// Unsupported for Clifford elements.
  Scalar det_invariant() const;

 private:
  std::variant<Quaternion, Mat2, Clifford> v_;
};

Value operator+(const Value& a, const Value& b);
Value operator-(const Value& a, const Value& b);
Value operator-(const Value& a);
Value operator*(const Value& a, const Value& b);

/// lambda * a for a scalar lambda (complex allowed only for Mat2).
Value scale(Scalar s, const Value& a);
/// lambda * 1 + a.
Value shift(Scalar s, const Value& a);
Value inverse(const Value& a, double tol = kDefaultTol);

}  // namespace skewnet::algebra
