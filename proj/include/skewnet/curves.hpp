#pragma once

#include <optional>
#include <vector>

#include "skewnet/factor.hpp"

namespace skewnet::curves {

using algebra::Quaternion;

/// Arc-length discrete curve: base point and unit imaginary edge quaternions.
struct DiscreteCurve {
  Quaternion base;                 // imaginary
  std::vector<Quaternion> edges;   // unit imaginary, u(k) != -u(k-1)

  int vertex_count() const { return int(edges.size()) + 1; }
  Quaternion vertex(int k) const;
  void validate(double tol = kDefaultTol) const;
};

/// True when v lies too close to the excluded sphere S^2.
bool on_sphere(const Quaternion& v, double tol = 1e-8);

/// Bäcklund edge map T_v: u -> (v-u) u (v-u)^{-1} on S^2.
Quaternion backlund_map(const Quaternion& v, const Quaternion& u, double tol = kDefaultTol);

struct BacklundResult {
  DiscreteCurve curve;            // transformed curve
  std::vector<Quaternion> v;      // per-vertex transformation edges
};

/// Bäcklund transformation of a whole curve: v is propagated from v0 at the
/// anchor index in both directions via the parallelogram equations.
BacklundResult backlund_curve(const DiscreteCurve& curve, const Quaternion& v0, int anchor = 0,
                              double tol = kDefaultTol);

/// Matrix [[A, B], [-B, A]] acting on S^2 in HP^1.
struct ABMatrix {
  Quaternion A, B;

  Scalar complex_trace() const;  // (tr M)/2 = r_A + r_B i
  Scalar complex_det() const;    // |B|^2 - |A|^2 - 2 <A,B> i
  Scalar det_vec() const;        // complex det of the trace-free part
  Quaternion apply(const Quaternion& u, double tol = kDefaultTol) const;
};

ABMatrix ab_mul(const ABMatrix& m, const ABMatrix& n);

/// M = diag(E, E) T_{v_{n-1}} ... T_{v_0}.
ABMatrix compose_chain(const Quaternion& E, const std::vector<Quaternion>& vs,
                       double tol = kDefaultTol);

struct FixedPoints {
  Quaternion plus, minus;  // u_+/- = (+-beta + vec B)^{-1} (+-alpha + vec A)
  double alpha, beta;      // alpha + i beta = principal sqrt of det vec M
};

FixedPoints fixed_points(const ABMatrix& m, double tol = kDefaultTol);

struct NInvariantResult {
  DiscreteCurve curve;
  Quaternion E;
  std::vector<std::vector<Quaternion>> vs;  // vs[k][l], chain at curve index k
  double invariance_residual = 0;           // |chain(u) - E^{-1} u E|
};

/// Constructs an n-invariant curve from initial Bäcklund data by iterating
/// the fixed-point step and the parallelogram evolution.
NInvariantResult ninvariant_construct(const Quaternion& E, const std::vector<Quaternion>& vs0,
                                      int branch, int steps, double tol = kDefaultTol);

/// tr P(lambda) and det P(lambda) of P = E (lambda + v_{n-1}) ... (lambda + v_0).
std::pair<factor::CPoly, factor::CPoly> chain_invariants(const Quaternion& E,
                                                         const std::vector<Quaternion>& vs);

struct ElasticResult {
  DiscreteCurve curve;
  Quaternion E;
  std::vector<Quaternion> bhat;  // hat B(i), one per step
};

/// Simplified 2-invariant (elastic rod) construction:
/// hat B(i+1) = hat B(i) + u(i) E - E u(i), u(i+1) = hat B(i)^{-1} u(i) hat B(i).
ElasticResult elastic_construct(const Quaternion& E, const Quaternion& bhat0,
                                const Quaternion& u0, int steps, double tol = kDefaultTol);

struct ElasticVerification {
  double residual = 0;  // worst |2 alpha F^T + beta F^H - e x gamma - x|
  double alpha = 0, beta = 0;
  Quaternion e, x;  // imaginary
};

/// Fits the Euclidean-motion field 2 alpha F^T + beta F^H = e x gamma + x by
/// least squares with |(alpha, beta)| = 1; small residual certifies an
/// elastic rod.
ElasticVerification elastic_verify(const DiscreteCurve& curve, double tol = kDefaultTol);

struct BacklundPair {
  Quaternion v0, v1;        // the two transformation seeds at k = 0
  double conjugacy_residual;  // |tilde u(k) - E^{-1} u(k) E| after both transforms
};

/// Recovers a pair of Bäcklund transformations fixing an elastic rod by
/// factorizing P(mu) = E + mu B(0) + mu^2 (A(0) + E) quaternionically.
BacklundPair recover_backlund_pair(const ElasticResult& rod, double a, double b,
                                   double tol = kDefaultTol);

/// Retry policy for the real shifts: (1, 0), then (0, 1), then seeded random.
BacklundPair recover_backlund_pair_auto(const ElasticResult& rod, std::uint64_t seed = 1,
                                        double tol = kDefaultTol);

}  // namespace skewnet::curves
