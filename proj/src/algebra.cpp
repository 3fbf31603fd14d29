#include "skewnet/algebra.hpp"

#include <bit>
#include <cmath>

namespace skewnet::algebra {

// ---------------------------------------------------------------------------
// Quaternion

double Quaternion::norm() const { return std::sqrt(norm2()); }

bool Quaternion::is_imaginary(double tol) const {
  return std::abs(w) <= tol * std::max(1.0, norm());
}

Quaternion operator+(const Quaternion& a, const Quaternion& b) {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}

Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quaternion operator*(double s, const Quaternion& a) {
  return {s * a.w, s * a.x, s * a.y, s * a.z};
}

Quaternion inverse(const Quaternion& a, double tol) {
  double n2 = a.norm2();
  if (std::sqrt(n2) <= tol) fail(Err::NotInvertible, "quaternion norm below tolerance");
  return (1.0 / n2) * a.conj();
}

double dot(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

Quaternion cross(const Quaternion& a, const Quaternion& b) {
  return {0, a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dist(const Quaternion& a, const Quaternion& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Mat2

double Mat2::norm() const {
  return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
}

Mat2 operator+(const Mat2& m, const Mat2& n) { return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d}; }
Mat2 operator-(const Mat2& m, const Mat2& n) { return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d}; }
Mat2 operator-(const Mat2& m) { return {-m.a, -m.b, -m.c, -m.d}; }

Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

Mat2 operator*(Scalar s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

Mat2 mat2_identity() { return {1, 0, 0, 1}; }

Mat2 adjugate(const Mat2& m) { return {m.d, -m.b, -m.c, m.a}; }

Mat2 inverse(const Mat2& m, double tol) {
  Scalar det = m.det();
  if (std::abs(det) <= tol * tol * std::max(1.0, m.norm() * m.norm()))
    fail(Err::NotInvertible, "matrix determinant below tolerance");
  return (1.0 / det) * adjugate(m);
}

Mat2 quat_to_mat2(const Quaternion& q) {
  // basis 1 -> I, i -> [[0,i],[i,0]], j -> [[0,-1],[1,0]], k -> [[i,0],[0,-i]];
  // with this orientation M_i M_j = M_k and the map is multiplicative
  return {Scalar(q.w, q.z), Scalar(-q.y, q.x), Scalar(q.y, q.x), Scalar(q.w, -q.z)};
}

double quaternion_pattern_residual(const Mat2& m) {
  double res = std::hypot(std::abs(m.d - std::conj(m.a)), std::abs(m.c + std::conj(m.b)));
  return res / std::max(1.0, m.norm());
}

Quaternion mat2_to_quat(const Mat2& m) {
  return {0.5 * (m.a.real() + m.d.real()), 0.5 * (m.b.imag() + m.c.imag()),
          0.5 * (m.c.real() - m.b.real()), 0.5 * (m.a.imag() - m.d.imag())};
}

// ---------------------------------------------------------------------------
// Clifford

namespace {

// Sign of reordering a blade product e_A e_B into canonical order: counts the
// generator transpositions (pairs i in A, j in B with i > j).
int reorder_sign(unsigned a, unsigned b) {
  int swaps = 0;
  a >>= 1;
  while (a) {
    swaps += std::popcount(a & b);
    a >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

}  // namespace

Clifford::Clifford(int p, int q) : p_(p), q_(q), c_(std::size_t(1) << (p + q), 0.0) {
  if (p < 0 || q < 0 || p + q > 12) fail(Err::SignatureMismatch, "unsupported signature");
}

Clifford::Clifford(int p, int q, std::vector<double> coeffs) : Clifford(p, q) {
  if (coeffs.size() != c_.size()) fail(Err::Validation, "coefficient count mismatch");
  c_ = std::move(coeffs);
}

Clifford Clifford::scalar(int p, int q, double s) {
  Clifford r(p, q);
  r.c_[0] = s;
  return r;
}

Clifford Clifford::vector(int p, int q, const std::vector<double>& v) {
  if (int(v.size()) != p + q) fail(Err::Validation, "vector component count mismatch");
  Clifford r(p, q);
  for (int i = 0; i < p + q; ++i) r.c_[1u << i] = v[i];
  return r;
}

double Clifford::norm() const {
  double s = 0;
  for (double x : c_) s += x * x;
  return std::sqrt(s);
}

Clifford Clifford::reverse() const {
  Clifford r(p_, q_);
  for (unsigned m = 0; m < c_.size(); ++m) {
    int k = std::popcount(m);
    double sign = ((k * (k - 1) / 2) & 1) ? -1.0 : 1.0;
    r.c_[m] = sign * c_[m];
  }
  return r;
}

Clifford Clifford::grade(int k) const {
  Clifford r(p_, q_);
  for (unsigned m = 0; m < c_.size(); ++m)
    if (std::popcount(m) == k) r.c_[m] = c_[m];
  return r;
}

double Clifford::max_grade_coeff(int k) const {
  double s = 0;
  for (unsigned m = 0; m < c_.size(); ++m)
    if (std::popcount(m) == k) s = std::max(s, std::abs(c_[m]));
  return s;
}

std::vector<double> Clifford::vector_part() const {
  std::vector<double> v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = c_[1u << i];
  return v;
}

Clifford operator+(const Clifford& a, const Clifford& b) {
  if (!a.same_signature(b)) fail(Err::SignatureMismatch, "Clifford signature mismatch");
  Clifford r(a.p(), a.q());
  for (int m = 0; m < a.blades(); ++m) r.coeff(m) = a.coeff(m) + b.coeff(m);
  return r;
}

Clifford operator-(const Clifford& a, const Clifford& b) { return a + (-b); }

Clifford operator-(const Clifford& a) { return -1.0 * a; }

Clifford operator*(const Clifford& a, const Clifford& b) {
  if (!a.same_signature(b)) fail(Err::SignatureMismatch, "Clifford signature mismatch");
  Clifford r(a.p(), a.q());
  for (unsigned ma = 0; ma < unsigned(a.blades()); ++ma) {
    if (a.coeff(ma) == 0.0) continue;
    for (unsigned mb = 0; mb < unsigned(b.blades()); ++mb) {
      if (b.coeff(mb) == 0.0) continue;
      double f = a.coeff(ma) * b.coeff(mb) * reorder_sign(ma, mb);
      unsigned common = ma & mb;
      // contraction e_i e_i = -<e_i,e_i>: -1 for i <= p, +1 beyond
      for (unsigned i = 0; i < unsigned(a.dim()); ++i)
        if (common & (1u << i)) f *= (int(i) < a.p()) ? -1.0 : 1.0;
      r.coeff(ma ^ mb) += f;
    }
  }
  return r;
}

Clifford operator*(double s, const Clifford& a) {
  Clifford r(a.p(), a.q());
  for (int m = 0; m < a.blades(); ++m) r.coeff(m) = s * a.coeff(m);
  return r;
}

Clifford inverse(const Clifford& a, double tol) {
  Clifford rev = a.reverse();
  Clifford prod = a * rev;
  double s = prod.coeff(0);
  double off = 0;
  for (int m = 1; m < prod.blades(); ++m) off = std::max(off, std::abs(prod.coeff(m)));
  double scale = std::max(1.0, a.norm() * a.norm());
  if (off > tol * scale)
    fail(Err::UnsupportedCliffordInverse, "element outside the Lipschitz-group closure");
  if (std::abs(s) <= tol * scale) fail(Err::NotInvertible, "Clifford element not invertible");
  return (1.0 / s) * rev;
}

double quadric_inner(const Clifford& a, const Clifford& b) {
  Clifford s = a * b + b * a;
  return -0.5 * s.coeff(0);
}

// ---------------------------------------------------------------------------
// Value

const Quaternion& Value::quat() const {
  if (tag() != Tag::Quat) fail(Err::AlgebraMismatch, "expected quaternion value");
  return std::get<Quaternion>(v_);
}

const Mat2& Value::mat() const {
  if (tag() != Tag::Mat) fail(Err::AlgebraMismatch, "expected matrix value");
  return std::get<Mat2>(v_);
}

const Clifford& Value::cliff() const {
  if (tag() != Tag::Cliff) fail(Err::AlgebraMismatch, "expected Clifford value");
  return std::get<Clifford>(v_);
}

bool Value::same_kind(const Value& o) const {
  if (tag() != o.tag()) return false;
  if (tag() == Tag::Cliff) return cliff().same_signature(o.cliff());
  return true;
}

Value Value::one() const {
  switch (tag()) {
    case Tag::Quat: return Value(quat_scalar(1.0));
    case Tag::Mat: return Value(mat2_identity());
    case Tag::Cliff: return Value(Clifford::scalar(cliff().p(), cliff().q(), 1.0));
  }
  fail(Err::Validation, "corrupt value");
}

Value Value::zero() const {
  switch (tag()) {
    case Tag::Quat: return Value(Quaternion{});
    case Tag::Mat: return Value(Mat2{});
    case Tag::Cliff: return Value(Clifford(cliff().p(), cliff().q()));
  }
  fail(Err::Validation, "corrupt value");
}

double Value::norm() const {
  switch (tag()) {
    case Tag::Quat: return quat().norm();
    case Tag::Mat: return mat().norm();
    case Tag::Cliff: return cliff().norm();
  }
  fail(Err::Validation, "corrupt value");
}

Scalar Value::trace_invariant() const {
  switch (tag()) {
    case Tag::Quat: return Scalar(2.0 * quat().re(), 0.0);
    case Tag::Mat: return mat().trace();
    case Tag::Cliff: return Scalar(2.0 * cliff().coeff(0), 0.0);
  }
  fail(Err::Validation, "corrupt value");
}

Scalar Value::det_invariant() const {
  switch (tag()) {
    case Tag::Quat: return Scalar(quat().norm2(), 0.0);
    case Tag::Mat: return mat().det();
    case Tag::Cliff: fail(Err::AlgebraMismatch, "no determinant invariant for Clifford values");
  }
  fail(Err::Validation, "corrupt value");
}

namespace {

void require_same(const Value& a, const Value& b) {
  if (!a.same_kind(b)) fail(Err::AlgebraMismatch, "operands from different algebras");
}

double real_scalar(Scalar s) {
  if (std::abs(s.imag()) > 0.0)
    fail(Err::AlgebraMismatch, "complex scalar on a real algebra");
  return s.real();
}

}  // namespace

Value operator+(const Value& a, const Value& b) {
  require_same(a, b);
  switch (a.tag()) {
    case Tag::Quat: return Value(a.quat() + b.quat());
    case Tag::Mat: return Value(a.mat() + b.mat());
    case Tag::Cliff: return Value(a.cliff() + b.cliff());
  }
  fail(Err::Validation, "corrupt value");
}

Value operator-(const Value& a, const Value& b) {
  require_same(a, b);
  switch (a.tag()) {
    case Tag::Quat: return Value(a.quat() - b.quat());
    case Tag::Mat: return Value(a.mat() - b.mat());
    case Tag::Cliff: return Value(a.cliff() - b.cliff());
  }
  fail(Err::Validation, "corrupt value");
}

Value operator-(const Value& a) {
  switch (a.tag()) {
    case Tag::Quat: return Value(-a.quat());
    case Tag::Mat: return Value(-a.mat());
    case Tag::Cliff: return Value(-a.cliff());
  }
  fail(Err::Validation, "corrupt value");
}

Value operator*(const Value& a, const Value& b) {
  require_same(a, b);
  switch (a.tag()) {
    case Tag::Quat: return Value(a.quat() * b.quat());
    case Tag::Mat: return Value(a.mat() * b.mat());
    case Tag::Cliff: return Value(a.cliff() * b.cliff());
  }
  fail(Err::Validation, "corrupt value");
}

Value scale(Scalar s, const Value& a) {
  switch (a.tag()) {
    case Tag::Quat: return Value(real_scalar(s) * a.quat());
    case Tag::Mat: return Value(s * a.mat());
    case Tag::Cliff: return Value(real_scalar(s) * a.cliff());
  }
  fail(Err::Validation, "corrupt value");
}

Value shift(Scalar s, const Value& a) {
  switch (a.tag()) {
    case Tag::Quat: return Value(quat_scalar(real_scalar(s)) + a.quat());
    case Tag::Mat: return Value(s * mat2_identity() + a.mat());
    case Tag::Cliff:
      return Value(Clifford::scalar(a.cliff().p(), a.cliff().q(), real_scalar(s)) + a.cliff());
  }
  fail(Err::Validation, "corrupt value");
}

Value inverse(const Value& a, double tol) {
  switch (a.tag()) {
    case Tag::Quat: return Value(inverse(a.quat(), tol));
    case Tag::Mat: return Value(inverse(a.mat(), tol));
    case Tag::Cliff: return Value(inverse(a.cliff(), tol));
  }
  fail(Err::Validation, "corrupt value");
}

}  // namespace skewnet::algebra

namespace skewnet {

const char* err_name(Err kind) {
  switch (kind) {
    case Err::AlgebraMismatch: return "AlgebraMismatch";
    case Err::SignatureMismatch: return "SignatureMismatch";
    case Err::NotInvertible: return "NotInvertible";
    case Err::UnsupportedCliffordInverse: return "UnsupportedCliffordInverse";
    case Err::NotEvolvable: return "NotEvolvable";
    case Err::NotClosed: return "NotClosed";
    case Err::MissingEdge: return "MissingEdge";
    case Err::BadBox: return "BadBox";
    case Err::FrameSingular: return "FrameSingular";
    case Err::Incompatible: return "Incompatible";
    case Err::NotZeroFolded: return "NotZeroFolded";
    case Err::ZeroPolynomial: return "ZeroPolynomial";
    case Err::NotARoot: return "NotARoot";
    case Err::NotIndependent: return "NotIndependent";
    case Err::DegenerateColumns: return "DegenerateColumns";
    case Err::AllZero: return "AllZero";
    case Err::OnSphere: return "OnSphere";
    case Err::ZeroE: return "ZeroE";
    case Err::IdentityMap: return "IdentityMap";
    case Err::DegenerateFixedPoints: return "DegenerateFixedPoints";
    case Err::TooShort: return "TooShort";
    case Err::NearAntipodal: return "NearAntipodal";
    case Err::ZeroBhat: return "ZeroBhat";
    case Err::DegenerateDet: return "DegenerateDet";
    case Err::Degenerate: return "Degenerate";
    case Err::LabelConflict: return "LabelConflict";
    case Err::BranchFailure: return "BranchFailure";
    case Err::PatternViolation: return "PatternViolation";
    case Err::GradeViolation: return "GradeViolation";
    case Err::NotEmbeddable: return "NotEmbeddable";
    case Err::Validation: return "Validation";
    case Err::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace skewnet
