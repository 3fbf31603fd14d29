#pragma once

#include <array>

#include "skewnet/lax.hpp"

namespace skewnet::surfaces {

using algebra::Mat2;
using algebra::Quaternion;
using lattice::EdgeNet;
using lattice::LatticeBox;
using lattice::VertexNet;

Scalar cross_ratio(Scalar a, Scalar b, Scalar c, Scalar d, double tol = kDefaultTol);

/// Fourth quad point with cr(f, f_i, f_ij, f_j) = (alpha_i / alpha_j)^2.
Scalar cr_quad_complete(Scalar f, Scalar fi, Scalar fj, Scalar ai, Scalar aj,
                        double tol = kDefaultTol);

/// s-map evolution s_ij / s = (a^j s_j - a^i s_i) / (a^j s_i - a^i s_j).
Scalar s_evolve(Scalar s, Scalar si, Scalar sj, Scalar ai, Scalar aj, double tol = kDefaultTol);
/// Solves the evolution for s_j given s, s_i and s_ij.
Scalar s_solve_j(Scalar s, Scalar si, Scalar sij, Scalar ai, Scalar aj, double tol = kDefaultTol);

/// Cross-ratio system on a box: vertex map f, direction labels alpha (one
/// value per coordinate), and the derived vertex map s with s(0) = 1 and
/// d^i = alpha^i s_i s.
struct CrossRatioLattice {
  LatticeBox box;
  std::vector<Scalar> f;
  std::vector<std::vector<Scalar>> alpha;  // [dir][coordinate]
  std::vector<Scalar> s;

  Scalar f_at(const std::vector<int>& x) const { return f[box.vertex_index(x)]; }
  Scalar s_at(const std::vector<int>& x) const { return s[box.vertex_index(x)]; }
  Scalar alpha_at(int dir, const std::vector<int>& x) const { return alpha[dir][x[dir]]; }
  Scalar edge_d(int dir, const std::vector<int>& x) const;  // d^i = f_i - f
};

/// Builds a lattice from vertex values and labels; derives s and validates
/// the cross-ratio property.
CrossRatioLattice make_cross_ratio_lattice(LatticeBox box, std::vector<Scalar> f,
                                           std::vector<std::vector<Scalar>> alpha,
                                           double tol = kDefaultTol);

/// Fills a box by cr_quad_complete from vertex values on the coordinate axes.
CrossRatioLattice fill_cross_ratio(const std::vector<std::vector<Scalar>>& axis_f,
                                   std::vector<std::vector<Scalar>> alpha,
                                   double tol = kDefaultTol);

/// Worst deviation |cr - (a^i/a^j)^2| / |ratio| over all quads.
double cr_residual(const CrossRatioLattice& lat);

/// Parallelogram reduction p^i = [[0, d^i], [-(alpha^i)^2 / d^i, 0]].
EdgeNet cr_to_parallelogram(const CrossRatioLattice& lat, double tol = kDefaultTol);

/// Dual system (d^i)* = (alpha^i)^2 / d^i, integrated from f*(0) = 0.
CrossRatioLattice dual_lattice(const CrossRatioLattice& lat, double tol = kDefaultTol);

/// K-net associated family member of a planar quaternionic net along
/// (e^t, e^-t); returns the Sym primitive and the frame.
std::pair<VertexNet, lax::Frame> knet_family(const EdgeNet& p, double t, double tol = kDefaultTol);

/// Classical K-net Lax data: x on direction-1 edges, y on direction-2 edges.
struct ClassicKnetData {
  LatticeBox box;
  std::vector<Scalar> x;  // edge-indexed, direction 1
  std::vector<Scalar> y;  // edge-indexed, direction 2
};

/// Gauge of the classical K-net representation into the planar parallelogram
/// form: a = -i conj(x) or -i x and b = y or -conj(y) by the parity of k.
EdgeNet gauge_classic_knet(const ClassicKnetData& data, double tol = kDefaultTol);

enum class Mode4D { CPlus, CMinus };

struct Lattice4D {
  CrossRatioLattice lat;  // 4D
  Mode4D mode;

  int diag_m() const;  // extents of the diagonal net D
  int diag_n() const;
  std::vector<int> diag_vertex(int i, int j) const { return {i, j, i, j}; }
};

/// Unique C+/C- extension of a 2D cross-ratio seed: labels from the mode
/// relations, s on the 1,3- and 2,4-planes from s_1 conj(s_3) = 1 and the
/// evolution, then the bulk. Deterministic fill; validates the mode
/// invariants on D.
Lattice4D extend_to_4d(const CrossRatioLattice& seed, Mode4D mode, std::array<int, 4> extents,
                       double tol = kDefaultTol);

/// Worst violation of the D-vertex conditions: s_1 conj(s_3) = 1,
/// s_2 conj(s_4) = 1, and s real (C+) or unitary (C-).
struct ModeReport {
  double dpw_dev = 0;
  double reality_dev = 0;
};
ModeReport mode_invariants(const Lattice4D& l4);

/// Lax matrix of a diagonal edge as a Laurent polynomial
/// L = lambda^2 Cp + C0 + lambda^-2 C2 (Cp = I before gauging).
struct DiagLax {
  Mat2 cp, c0, c2;

  Mat2 eval(Scalar lambda) const;
  Mat2 deriv(Scalar lambda, Scalar dlambda) const;
  /// substitution lambda^2 -> lambda used by the classical-form gauges
  Mat2 eval_sub(Scalar lambda) const;
};

/// L (dir = 0) or M (dir = 1) at the D vertex (i, j), built from the explicit
/// s-form; checks the off-diagonal symmetry identity.
DiagLax diagonal_lax(const Lattice4D& l4, int i, int j, int dir, double tol = kDefaultTol);

/// beta(i) with beta^2 = -alpha^1 alpha^3 (or -alpha^2 alpha^4), branch
/// tracked by continuity along the coordinate.
std::vector<Scalar> beta_branch(const Lattice4D& l4, int dir, double tol = kDefaultTol);

/// C+ gauge: Ltilde = (1/beta) diag(1, s_13) L diag(1, s)^{-1}.
DiagLax cplus_gauge(const DiagLax& L, Scalar beta, Scalar s, Scalar s13);

struct DiagonalSurface {
  int m = 0, n = 0;
  std::vector<Quaternion> points;   // imaginary parts of f_t on D
  std::vector<Quaternion> normals;  // C+ only: Phi^{-1} k Phi
  double t = 0;
  Mode4D mode;
  double pattern_residual = 0;  // worst quaternion-pattern deviation of f_t
  double compat_residual = 0;

  const Quaternion& point(int i, int j) const { return points[i * (n + 1) + j]; }
};

/// Frame over D with the Sym formula; C- uses lambda = e^t, C+ uses
/// lambda = e^{it} and the gauged Lax matrices.
DiagonalSurface surface_extract(const Lattice4D& l4, double t, double tol = kDefaultTol);

/// Entries of the classical CMC Lax matrix recovered from a C+ lattice at a
/// D vertex; sign of the square-root branches is fixed by matching the gauged
/// matrix and recorded.
struct CmcEntries {
  Scalar a, b;
  bool flipped = false;  // branch sign applied to (a, b)
  double residual = 0;   // assembled vs gauged
};
CmcEntries cmc_entries(const Lattice4D& l4, int i, int j, int dir, double tol = kDefaultTol);

/// Classical CMC Lax matrix [[a, lb + 1/(lb)], [-conj(b)/l - l/conj(b), conj(a)]].
Mat2 cmc_lax(Scalar a, Scalar b, Scalar lambda);

/// Entries of the cK-net Lax matrix recovered from a C- lattice (unitary
/// labels) at a D vertex.
struct CkEntries {
  Scalar r, r1, t1, l;
  double residual = 0;
};
CkEntries ck_entries(const Lattice4D& l4, int i, int j, int dir, double tol = kDefaultTol);

Mat2 ck_lax(const CkEntries& e, Scalar lambda);

/// Classical CMC Lax data on a 2D box: (a, b) on direction-1 edges and
/// (d, e) on direction-2 edges.
struct CmcLaxData {
  LatticeBox box;
  std::vector<Scalar> a, b;  // direction-1 edge arrays
  std::vector<Scalar> d, e;  // direction-2 edge arrays
};

/// Extracts CMC Lax data from a C+ lattice via cmc_entries on both directions.
CmcLaxData cmc_data_from_cplus(const Lattice4D& l4, double tol = kDefaultTol);

/// Forward gauge chain of the CMC cube equivalence: builds the two-layer
/// frame and returns the zero-folded two-layer parallelogram net
/// U = cos t + sin t u, V = cos t + sin t v, W = cos t + sin t w.
struct CmcCubeResult {
  LatticeBox box;  // 2D
  std::vector<Quaternion> u0, u1;  // direction-1 edges, layers 0 and 1
  std::vector<Quaternion> v0, v1;  // direction-2 edges
  std::vector<Quaternion> w;       // vertical edges, per vertex
  double form_residual = 0;        // |U(t) - (cos t + sin t u)| over samples
  double quad_residual = 0;        // two-layer parallelogram equations
  double w_norm_dev = 0;           // | |w| - 1 |
  double compat_residual = 0;      // M_1 L = L_2 M over samples
};

CmcCubeResult cmc_cube_gauge(const CmcLaxData& data, const std::vector<double>& t_samples,
                             double tol = kDefaultTol);

/// Two-layer net of a cube-gauge result as a 3D EdgeNet of quaternions.
EdgeNet cmc_cube_net(const CmcCubeResult& r);

}  // namespace skewnet::surfaces
