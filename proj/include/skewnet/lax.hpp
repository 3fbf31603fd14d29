#pragma once

#include <functional>

#include "skewnet/lattice.hpp"

namespace skewnet::lax {

using algebra::Value;
using lattice::EdgeNet;
using lattice::LatticeBox;
using lattice::VertexNet;

/// Spectral functions lambda(t), mu(t) with derivatives. The standing
/// assumption lambda' mu - lambda mu' != 0 is checked where the path is used.
struct SpectralPath {
  std::function<Scalar(double)> lambda, mu, dlambda, dmu;
  bool real = true;  // real-valued for real t (required on quaternion/Clifford nets)

  static SpectralPath linear();       // (t, 1)
  static SpectralPath exponential();  // (e^t, e^-t)
  static SpectralPath trig();         // (cos t, sin t)
  static SpectralPath unit_circle();  // (e^{it}, e^{-it})

  Scalar wronskian(double t) const;  // lambda' mu - lambda mu'
};

/// Moving frame Phi with its t-derivative on the vertices of a box. The
/// inverse is accumulated factor-wise along the propagation, which keeps it
/// well conditioned even when the reversal scalar of the full product decays.
struct Frame {
  LatticeBox box;
  std::vector<Value> phi, dphi, phi_inv;
  double t = 0;
  Scalar lambda, mu, dlambda, dmu;

  const Value& at(const std::vector<int>& x) const { return phi[box.vertex_index(x)]; }
  const Value& deriv_at(const std::vector<int>& x) const { return dphi[box.vertex_index(x)]; }
  const Value& inv_at(const std::vector<int>& x) const { return phi_inv[box.vertex_index(x)]; }
};

/// P^i(lambda, mu) = lambda + mu p^i.
Value lax_matrix(const Value& pi, Scalar lambda, Scalar mu);

/// Propagates Phi_i = P^i Phi and Phi'_i = P^i Phi' + (P^i)' Phi from
/// Phi(0) = phi0 along a lexicographic sweep. Checks the quad equations of p
/// and invertibility of every Phi.
Frame propagate_frame(const EdgeNet& p, const SpectralPath& path, double t, const Value& phi0,
                      double tol = kDefaultTol);

/// Associated family edges p_t^i = Phi_i^{-1} (P^i)' Phi.
EdgeNet associated_edges(const EdgeNet& p, const Frame& frame, double tol = kDefaultTol);

/// Sym formula f_t = Phi^{-1} Phi'.
VertexNet sym_points(const Frame& frame, double tol = kDefaultTol);

struct FoldingReport {
  bool zero_folded = false;     // tr p^i = 0 on all edges
  bool equally_folded = false;  // det p^i = 1 on all edges
  double dev_zero = 0;
  double dev_equal = 0;
};

FoldingReport classify_folding(const EdgeNet& p, double tol = kDefaultTol);

struct FamilyMember {
  double t = 0;
  EdgeNet p;
  VertexNet f;
};

/// Associated-family member of a zero-folded net along (e^t, e^-t); the
/// output is equally folded.
FamilyMember unfold_zero_folded(const EdgeNet& p, double t, double tol = kDefaultTol);

struct FoldingParameter {
  double sigma = 0;     // sin(dihedral at p^i) / |vec p^i|
  bool planar = false;  // flat tetrahedron
  double mismatch = 0;  // disagreement between the two edge choices
};

/// Folding parameter of a single skew parallelogram spanned by the imaginary
/// parts of f, f_i, f_j, f_ij.
FoldingParameter folding_parameter(const algebra::Quaternion& f, const algebra::Quaternion& fi,
                                   const algebra::Quaternion& fj, const algebra::Quaternion& fij,
                                   double tol = kDefaultTol);

/// Gauge of a general linear representation Psi_i = (lambda A^i + mu B^i) Psi
/// into the standard form: p^i = G (A^i)^{-1} B^i G^{-1} with
/// G = Psi(lambda=1, mu=0)^{-1}. Requires invertible A^i.
EdgeNet gauge_linear_lax(const EdgeNet& A, const EdgeNet& B, double tol = kDefaultTol);

/// Canonical form for testing primary equivalence of matrix nets: per-edge
/// trace removal, global scale fixing det of the first edge to 1, global
/// sign fixed by the first edge's leading entry.
EdgeNet normalize_primary(const EdgeNet& p, double tol = kDefaultTol);

/// Largest entrywise difference of two nets on a common box, relative to scale.
double net_distance(const EdgeNet& a, const EdgeNet& b);

}  // namespace skewnet::lax
