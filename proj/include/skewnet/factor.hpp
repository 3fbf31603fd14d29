#pragma once

#include <utility>
#include <vector>

#include "skewnet/lattice.hpp"

namespace skewnet::factor {

using algebra::Mat2;
using algebra::Quaternion;

/// Scalar polynomials, coefficients lowest degree first.
using CPoly = std::vector<Scalar>;
using RPoly = std::vector<double>;

CPoly trim(CPoly p, double tol = 1e-12);
int degree(const CPoly& p, double tol = 1e-12);
CPoly poly_add(const CPoly& a, const CPoly& b);
CPoly poly_mul(const CPoly& a, const CPoly& b);
CPoly poly_deriv(const CPoly& p);
Scalar poly_eval(const CPoly& p, Scalar z);
CPoly to_cpoly(const RPoly& p);

/// All complex roots with multiplicity (Aberth-Ehrlich with a Newton polish),
/// ordered by real then imaginary part.
std::vector<Scalar> polynomial_roots(const CPoly& p, double tol = kDefaultTol);

/// Monic approximate GCD of real polynomials (Euclidean remainder sequence
/// with coefficient truncation).
RPoly gcd_real_polys(const std::vector<RPoly>& ps, double tol = 1e-10);

/// Quotient of a real polynomial division p = q * g (+ r), discarding r.
RPoly rpoly_divide(const RPoly& p, const RPoly& g);

// ---------------------------------------------------------------------------
// Matrix polynomials P(mu) = sum mu^k C_k over C^{2x2}.

struct MatPoly {
  std::vector<Mat2> c;

  int deg() const { return int(c.size()) - 1; }
  Mat2 eval(Scalar mu) const;
  /// Right evaluation sum C_k u^k; zero iff u is a right root.
  Mat2 eval_right(const Mat2& u) const;
  double norm() const;
  MatPoly trimmed(double tol = 1e-12) const;
};

MatPoly operator*(const MatPoly& a, const MatPoly& b);
MatPoly operator*(const Mat2& a, const MatPoly& b);
MatPoly mat_poly_linear(const Mat2& u);  // mu - u
/// mu^n P(-1/mu): swaps factorizations mu - u <-> 1 + mu u.
MatPoly reverse_neg(const MatPoly& p);

CPoly det_poly(const MatPoly& p);
CPoly trace_poly(const MatPoly& p);

MatPoly quat_poly_to_mat(const std::vector<Quaternion>& coeffs);

/// Roots mu1, mu2 of det P are independent iff ker P(mu1) and ker P(mu2)
/// meet only in 0; only independent pairs admit a unique right factor.
bool independent(const MatPoly& p, Scalar mu1, Scalar mu2, double tol = kDefaultTol);

struct RightFactor {
  MatPoly quotient;
  Mat2 u;           // P = quotient * (mu - u)
  double residual;  // division remainder, relative
};

/// Unique right factor mu - u with det(mu - u) roots {mu1, mu2}, via the
/// diagonalized form u = Y diag(mu1, mu2) Y^{-1} with Y columns from the
/// adjugates of P(mu_i). Column choice: largest norm, or forced for tests.
RightFactor right_factor(const MatPoly& p, Scalar mu1, Scalar mu2, double tol = kDefaultTol,
                         int force_col1 = -1, int force_col2 = -1);

// ---------------------------------------------------------------------------
// Quaternionic factorization

struct QuatFactorization {
  RPoly real_factor;               // maximal real scalar polynomial factor
  std::vector<Quaternion> roots;   // P/g = leading (mu-r_k)...(mu-r_1); index 0 rightmost
  Quaternion leading;
  double residual = 0;             // reconstruction residual, relative
};

/// Factorizes a quaternionic polynomial (quaternion coefficients, scalar
/// indeterminate) into the maximal real factor and quaternion linear factors,
/// pairing conjugate roots of the determinant polynomial.
QuatFactorization factorize_quaternionic(const std::vector<Quaternion>& coeffs,
                                         double tol = kDefaultTol);

std::vector<Quaternion> quat_poly_mul(const std::vector<Quaternion>& a,
                                      const std::vector<Quaternion>& b);
std::vector<Quaternion> reverse_neg(const std::vector<Quaternion>& p);

struct UnitFactorization {
  Quaternion leading;             // P = leading (1 + mu v_{n-1}) ... (1 + mu v_0)
  std::vector<Quaternion> vs;     // index 0 rightmost
  RPoly real_factor;
  double residual = 0;
};

/// Factorization into factors of the form 1 + mu v, obtained from the
/// reparametrization P(mu) -> mu^n P(-1/mu).
UnitFactorization factorize_unit_quaternionic(const std::vector<Quaternion>& coeffs,
                                              double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Refactorization cubes

using RootPairing = std::vector<std::pair<Scalar, Scalar>>;

/// Conjugate pairing of the determinant roots of a quaternionic polynomial.
RootPairing conjugate_pairing(const std::vector<Scalar>& roots, double tol = kDefaultTol);

struct FactorizationCube {
  lattice::EdgeNet roots;  // n-cube of linear-factor roots u (Mat2 values)
  Mat2 leading;
  double path_residual = 0;  // worst monotone-path reconstruction error
  double quad_residual = 0;
};

/// Populates the n-cube of refactorizations: axis staircase by successive
/// right-factor extraction in pairing order, remaining edges by quad
/// completion; verifies every monotone path product against P.
FactorizationCube factorize_cube(const MatPoly& p, const RootPairing& pairing,
                                 double tol = kDefaultTol);

}  // namespace skewnet::factor
