#pragma once

#include <cstdint>

#include "skewnet/lax.hpp"

namespace skewnet::moutard {

using algebra::Clifford;
using lattice::EdgeNet;
using lattice::LatticeBox;

/// Moutard net in the quadric <f, f> = kappa of R^{p,q}.
struct QuadricNet {
  int p = 3, q = 0;
  double kappa = 1;
  LatticeBox box;
  std::vector<std::vector<double>> f;  // vertex vectors in R^{p+q}

  const std::vector<double>& at(const std::vector<int>& x) const {
    return f[box.vertex_index(x)];
  }
  Clifford vec_at(const std::vector<int>& x) const { return Clifford::vector(p, q, at(x)); }
  double inner(const std::vector<double>& a, const std::vector<double>& b) const;

  /// worst |<f,f> - kappa| and worst Moutard (parallel-diagonal) deviation
  double quadric_residual() const;
  double moutard_residual() const;
};

/// Fourth quad point f_ij = f + <f, f_i - f_j> / (kappa - <f_i, f_j>) (f_j - f_i).
std::vector<double> moutard_complete(const QuadricNet& net, const std::vector<double>& f,
                                     const std::vector<double>& fi, const std::vector<double>& fj,
                                     double tol = kDefaultTol);

/// Grade-1 parallelogram reduction p^i = f_i - f.
EdgeNet edge_reduction(const QuadricNet& net, double tol = kDefaultTol);

/// Product reduction p^i = f_i f (grades 0 and 2, Lipschitz-group Lax factors).
EdgeNet product_reduction(const QuadricNet& net, double tol = kDefaultTol);

struct MoutardFamily {
  QuadricNet net;        // f_t = Phi^{-1} f Phi
  double grade_dev = 0;  // non-grade-1 leakage of f_t
  double identity_dev = 0;  // q_t = r + s p_t check
  double r = 0, s = 0;      // the closed-form constants at this t
};

/// Geometric associated family of a Moutard net in a quadric via the product
/// reduction; stays in the quadric with parallel diagonals.
MoutardFamily moutard_family(const QuadricNet& net, const lax::SpectralPath& path, double t,
                             double tol = kDefaultTol);

/// Seeded random Moutard net: random axis vertices on the quadric, bulk by
/// moutard_complete.
QuadricNet random_moutard_net(int p, int q, double kappa, const std::vector<int>& extents,
                              std::uint64_t seed, double tol = kDefaultTol);

}  // namespace skewnet::moutard
