#pragma once

#include <optional>
#include <vector>

#include "skewnet/algebra.hpp"

namespace skewnet::lattice {

using algebra::Value;

/// Finite box [0,extent_1] x ... x [0,extent_n] of Z^n.
class LatticeBox {
 public:
  LatticeBox() = default;
  explicit LatticeBox(std::vector<int> extents);

  int dim() const { return int(extents_.size()); }
  const std::vector<int>& extents() const { return extents_; }
  long vertex_count() const { return vcount_; }
  long vertex_index(const std::vector<int>& x) const;
  std::vector<int> vertex_coords(long idx) const;
  bool contains(const std::vector<int>& x) const;

  /// Edges (x, x+e_d): all x in the box with x_d < extent_d.
  long edge_count(int dir) const;
  long edge_index(int dir, const std::vector<int>& x) const;
  std::vector<int> edge_coords(int dir, long idx) const;

 private:
  std::vector<int> extents_;
  long vcount_ = 1;
};

/// Edge based map on a box, values in one algebra, with occupancy for
/// partially filled nets. Operations fail loudly on missing edges.
class EdgeNet {
 public:
  EdgeNet() = default;
  explicit EdgeNet(LatticeBox box);

  const LatticeBox& box() const { return box_; }
  bool has(int dir, const std::vector<int>& x) const;
  const Value& at(int dir, const std::vector<int>& x) const;
  void set(int dir, const std::vector<int>& x, Value v);
  bool complete() const;
  long edge_total() const;
  /// First stored edge in (direction, lex) order; errors when empty.
  const Value& first_edge() const;

  template <typename F>
  void for_each_edge(F&& f) const {
    for (int d = 0; d < box_.dim(); ++d)
      for (long i = 0; i < box_.edge_count(d); ++i)
        if (occ_[d][i]) f(d, box_.edge_coords(d, i), val_[d][i]);
  }

 private:
  LatticeBox box_;
  std::vector<std::vector<Value>> val_;
  std::vector<std::vector<char>> occ_;
  bool have_proto_ = false;
  Value proto_;  // fixes the algebra of the net
};

/// Vertex based map on a box.
class VertexNet {
 public:
  VertexNet() = default;
  explicit VertexNet(LatticeBox box);

  const LatticeBox& box() const { return box_; }
  bool has(const std::vector<int>& x) const;
  const Value& at(const std::vector<int>& x) const;
  void set(const std::vector<int>& x, Value v);

 private:
  LatticeBox box_;
  std::vector<Value> val_;
  std::vector<char> occ_;
};

struct QuadResidual {
  double additive = 0;
  double multiplicative = 0;
  double max() const { return std::max(additive, multiplicative); }
};

/// Residuals of the two parallelogram equations on one quad, normalized by
/// the scale of the inputs. Arguments follow the shift notation: pi = p^i,
/// pj = p^j, pij = p^i_j, pji = p^j_i.
QuadResidual quad_residual(const Value& pi, const Value& pj, const Value& pij, const Value& pji);

/// Forward evolution: p^i_j = (p^j-p^i) p^i (p^j-p^i)^{-1} and the analogue
/// for p^j_i. Requires the diagonal p^j - p^i to be invertible.
std::pair<Value, Value> evolve_quad(const Value& pi, const Value& pj, double tol = kDefaultTol);

/// Backward evolution: recovers (p^i, p^j) from (p^i_j, p^j_i).
std::pair<Value, Value> evolve_backward(const Value& pij, const Value& pji,
                                        double tol = kDefaultTol);

/// Sideways refactorization for complex 2x2 (or embedded quaternion) values:
/// recovers (p^i, p^j_i) from (p^j, p^i_j), preserving the pairing of the
/// determinant roots.
std::pair<Value, Value> evolve_sideways(const Value& pj, const Value& pij,
                                        double tol = kDefaultTol);

/// Mirror image of evolve_sideways: recovers (p^j, p^i_j) from (p^i, p^j_i).
std::pair<Value, Value> evolve_sideways_mirror(const Value& pi, const Value& pji,
                                               double tol = kDefaultTol);

/// Fills the positive box from edge values on the coordinate axes by repeated
/// forward evolution (deterministic lexicographic sweep), then verifies all
/// quad residuals.
EdgeNet fill_box(const std::vector<std::vector<Value>>& axes, double tol = kDefaultTol);

/// Completes a partially filled net in place by forward evolution; errors if
/// edges remain unreachable. Returns max quad residual of the result.
double complete_net(EdgeNet& net, double tol = kDefaultTol);

/// Max residual of both quad equations over all fully populated quads.
QuadResidual max_quad_residual(const EdgeNet& net);

/// Additive primitive map: f(0) = f0, f_i = f + p^i. Verifies closure.
VertexNet integrate_primitive(const EdgeNet& p, const Value& f0, double tol = kDefaultTol);

/// Multiplicative primitive map: f(0) = f0, f_i = p^i f^{-1}. Verifies
/// path-independence, which for this recursion depends on f0.
VertexNet multiplicative_primitive(const EdgeNet& p, const Value& f0, double tol = kDefaultTol);

struct LabelReport {
  bool pass = true;
  double max_deviation = 0;            // relative to invariant scale
  std::vector<double> per_direction;   // worst deviation per direction
  int worst_dir = -1;
  std::vector<int> worst_edge;         // base vertex of the worst edge
};

/// Checks the labelling property of the evolution invariants (trace and
/// determinant for matrices, real part and norm for quaternions).
LabelReport labelling_check(const EdgeNet& p, double tol = kDefaultTol);

EdgeNet conjugate_net(const EdgeNet& p, const Value& c, double tol = kDefaultTol);
EdgeNet scale_net(const EdgeNet& p, Scalar s);
EdgeNet shift_net(const EdgeNet& p, Scalar r);
/// Composite primary equivalence: p -> c (s p + r) c^{-1}.
EdgeNet primary_equivalent(const EdgeNet& p, const Value& c, Scalar s, Scalar r,
                           double tol = kDefaultTol);

}  // namespace skewnet::lattice
