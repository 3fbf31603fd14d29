#include "skewnet/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace skewnet::lattice {

using algebra::Mat2;
using algebra::Tag;
using algebra::adjugate;

namespace {

std::string coords_str(const std::vector<int>& x) {
  std::ostringstream os;
  os << "(";
  for (size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
  os << ")";
  return os.str();
}

double input_scale(std::initializer_list<const Value*> vs) {
  double s = 0;
  for (const Value* v : vs) s = std::max(s, v->norm());
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticeBox

LatticeBox::LatticeBox(std::vector<int> extents) : extents_(std::move(extents)) {
  if (extents_.empty()) fail(Err::BadBox, "dimension must be >= 1");
  for (int e : extents_) {
    if (e < 0) fail(Err::BadBox, "negative extent");
    vcount_ *= e + 1;
  }
}

long LatticeBox::vertex_index(const std::vector<int>& x) const {
  if (!contains(x)) fail(Err::BadBox, "vertex " + coords_str(x) + " outside box");
  long idx = 0;
  for (int k = 0; k < dim(); ++k) idx = idx * (extents_[k] + 1) + x[k];
  return idx;
}

std::vector<int> LatticeBox::vertex_coords(long idx) const {
  std::vector<int> x(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    x[k] = int(idx % (extents_[k] + 1));
    idx /= extents_[k] + 1;
  }
  return x;
}

bool LatticeBox::contains(const std::vector<int>& x) const {
  if (int(x.size()) != dim()) return false;
  for (int k = 0; k < dim(); ++k)
    if (x[k] < 0 || x[k] > extents_[k]) return false;
  return true;
}

long LatticeBox::edge_count(int dir) const {
  long n = 1;
  for (int k = 0; k < dim(); ++k) n *= (k == dir) ? extents_[k] : extents_[k] + 1;
  return n;
}

long LatticeBox::edge_index(int dir, const std::vector<int>& x) const {
  if (!contains(x) || x[dir] >= extents_[dir])
    fail(Err::BadBox, "edge " + coords_str(x) + " dir " + std::to_string(dir + 1) + " outside box");
  long idx = 0;
  for (int k = 0; k < dim(); ++k) {
    int size = (k == dir) ? extents_[k] : extents_[k] + 1;
    idx = idx * size + x[k];
  }
  return idx;
}

std::vector<int> LatticeBox::edge_coords(int dir, long idx) const {
  std::vector<int> x(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    int size = (k == dir) ? extents_[k] : extents_[k] + 1;
    x[k] = int(idx % size);
    idx /= size;
  }
  return x;
}

// ---------------------------------------------------------------------------
// EdgeNet / VertexNet

EdgeNet::EdgeNet(LatticeBox box) : box_(std::move(box)) {
  val_.resize(box_.dim());
  occ_.resize(box_.dim());
  for (int d = 0; d < box_.dim(); ++d) {
    val_[d].resize(box_.edge_count(d));
    occ_[d].assign(box_.edge_count(d), 0);
  }
}

bool EdgeNet::has(int dir, const std::vector<int>& x) const {
  return occ_[dir][box_.edge_index(dir, x)] != 0;
}

const Value& EdgeNet::at(int dir, const std::vector<int>& x) const {
  long i = box_.edge_index(dir, x);
  if (!occ_[dir][i])
    fail(Err::MissingEdge, "edge " + coords_str(x) + " dir " + std::to_string(dir + 1));
  return val_[dir][i];
}

void EdgeNet::set(int dir, const std::vector<int>& x, Value v) {
  long i = box_.edge_index(dir, x);
  if (have_proto_) {
    if (!proto_.same_kind(v)) fail(Err::AlgebraMismatch, "mixed algebras in one net");
  } else {
    proto_ = v.zero();
    have_proto_ = true;
  }
  val_[dir][i] = std::move(v);
  occ_[dir][i] = 1;
}

bool EdgeNet::complete() const {
  for (int d = 0; d < box_.dim(); ++d)
    for (char o : occ_[d])
      if (!o) return false;
  return true;
}

long EdgeNet::edge_total() const {
  long n = 0;
  for (int d = 0; d < box_.dim(); ++d) n += box_.edge_count(d);
  return n;
}

const Value& EdgeNet::first_edge() const {
  for (int d = 0; d < box_.dim(); ++d)
    for (long i = 0; i < box_.edge_count(d); ++i)
      if (occ_[d][i]) return val_[d][i];
  fail(Err::MissingEdge, "empty net");
}

VertexNet::VertexNet(LatticeBox box) : box_(std::move(box)) {
  val_.resize(box_.vertex_count());
  occ_.assign(box_.vertex_count(), 0);
}

bool VertexNet::has(const std::vector<int>& x) const { return occ_[box_.vertex_index(x)] != 0; }

const Value& VertexNet::at(const std::vector<int>& x) const {
  long i = box_.vertex_index(x);
  if (!occ_[i]) fail(Err::MissingEdge, "vertex " + coords_str(x));
  return val_[i];
}

void VertexNet::set(const std::vector<int>& x, Value v) {
  long i = box_.vertex_index(x);
  val_[i] = std::move(v);
  occ_[i] = 1;
}

// ---------------------------------------------------------------------------
// Quad operations

QuadResidual quad_residual(const Value& pi, const Value& pj, const Value& pij, const Value& pji) {
  double s = input_scale({&pi, &pj, &pij, &pji});
  if (s == 0) return {};
  Value add = (pi + pji) - (pj + pij);
  Value mult = pji * pi - pij * pj;
  return {add.norm() / s, mult.norm() / (s * s)};
}

std::pair<Value, Value> evolve_quad(const Value& pi, const Value& pj, double tol) {
  Value d = pj - pi;
  double s = std::max({pi.norm(), pj.norm(), 1.0});
  if (d.norm() <= tol * s) fail(Err::NotEvolvable, "diagonal p^j - p^i below tolerance");
  Value dinv = algebra::inverse(d, tol);
  return {d * pi * dinv, d * pj * dinv};
}

std::pair<Value, Value> evolve_backward(const Value& pij, const Value& pji, double tol) {
  Value d = pji - pij;
  double s = std::max({pij.norm(), pji.norm(), 1.0});
  if (d.norm() <= tol * s) fail(Err::NotEvolvable, "diagonal p^j_i - p^i_j below tolerance");
  Value dinv = algebra::inverse(d, tol);
  return {dinv * pij * d, dinv * pji * d};
}

namespace {

// adjugate within the value's own algebra: adj on matrices, conjugate on
// quaternions (the embedded image of adj).
Value value_adjugate(const Value& v) {
  switch (v.tag()) {
    case Tag::Quat: return Value(v.quat().conj());
    case Tag::Mat: return Value(adjugate(v.mat()));
    case Tag::Cliff:
      fail(Err::AlgebraMismatch, "sideways evolution needs a matrix or quaternion net");
  }
  fail(Err::Validation, "corrupt value");
}

}  // namespace

std::pair<Value, Value> evolve_sideways(const Value& pj, const Value& pij, double tol) {
  Value d = pij - value_adjugate(pj);
  double s = std::max({pj.norm(), pij.norm(), 1.0});
  if (d.norm() <= tol * s) fail(Err::NotEvolvable, "p^i_j - adj p^j below tolerance");
  Value dinv = algebra::inverse(d, tol);
  return {d * pij * dinv, d * pj * dinv};
}

std::pair<Value, Value> evolve_sideways_mirror(const Value& pi, const Value& pji, double tol) {
  Value d = pji - value_adjugate(pi);
  double s = std::max({pi.norm(), pji.norm(), 1.0});
  if (d.norm() <= tol * s) fail(Err::NotEvolvable, "p^j_i - adj p^i below tolerance");
  Value dinv = algebra::inverse(d, tol);
  return {d * pji * dinv, d * pi * dinv};
}

// ---------------------------------------------------------------------------
// Box filling and primitives

double complete_net(EdgeNet& net, double tol) {
  const LatticeBox& box = net.box();
  int n = box.dim();
  bool changed = true;
  while (changed) {
    changed = false;
    for (long vi = 0; vi < box.vertex_count(); ++vi) {
      std::vector<int> x = box.vertex_coords(vi);
      for (int i = 0; i < n; ++i) {
        if (x[i] >= box.extents()[i] || !net.has(i, x)) continue;
        for (int j = 0; j < n; ++j) {
          if (j == i || x[j] >= box.extents()[j] || !net.has(j, x)) continue;
          std::vector<int> xi = x, xj = x;
          xi[i] += 1;
          xj[j] += 1;
          bool need_ij = !net.has(i, xj);
          bool need_ji = !net.has(j, xi);
          if (!need_ij && !need_ji) continue;
          auto [pij, pji] = evolve_quad(net.at(i, x), net.at(j, x), tol);
          if (need_ij) net.set(i, xj, pij);
          if (need_ji) net.set(j, xi, pji);
          changed = true;
        }
      }
    }
  }
  if (!net.complete()) fail(Err::MissingEdge, "net not reachable from given edges");
  QuadResidual r = max_quad_residual(net);
  if (r.max() > std::sqrt(tol))
    fail(Err::Incompatible, "filled net violates the quad equations, residual " +
                                std::to_string(r.max()));
  return r.max();
}

EdgeNet fill_box(const std::vector<std::vector<Value>>& axes, double tol) {
  if (axes.empty()) fail(Err::BadBox, "no axis data");
  std::vector<int> extents;
  for (const auto& a : axes) extents.push_back(int(a.size()));
  EdgeNet net{LatticeBox(extents)};
  for (int d = 0; d < int(axes.size()); ++d) {
    std::vector<int> x(axes.size(), 0);
    for (int k = 0; k < int(axes[d].size()); ++k) {
      x[d] = k;
      net.set(d, x, axes[d][k]);
    }
  }
  complete_net(net, tol);
  return net;
}

QuadResidual max_quad_residual(const EdgeNet& net) {
  const LatticeBox& box = net.box();
  QuadResidual worst;
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int i = 0; i < box.dim(); ++i) {
      if (x[i] >= box.extents()[i]) continue;
      for (int j = i + 1; j < box.dim(); ++j) {
        if (x[j] >= box.extents()[j]) continue;
        std::vector<int> xi = x, xj = x;
        xi[i] += 1;
        xj[j] += 1;
        if (!(net.has(i, x) && net.has(j, x) && net.has(i, xj) && net.has(j, xi))) continue;
        QuadResidual r = quad_residual(net.at(i, x), net.at(j, x), net.at(i, xj), net.at(j, xi));
        worst.additive = std::max(worst.additive, r.additive);
        worst.multiplicative = std::max(worst.multiplicative, r.multiplicative);
      }
    }
  }
  return worst;
}

VertexNet integrate_primitive(const EdgeNet& p, const Value& f0, double tol) {
  const LatticeBox& box = p.box();
  VertexNet f(box);
  std::vector<int> origin(box.dim(), 0);
  f.set(origin, f0);
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    if (!f.has(x)) fail(Err::MissingEdge, "primitive integration hit a gap at " + coords_str(x));
    for (int d = 0; d < box.dim(); ++d) {
      if (x[d] >= box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      if (!f.has(xd)) f.set(xd, f.at(x) + p.at(d, x));
    }
  }
  // closure: f_i - f = p^i on every edge
  double worst = 0;
  p.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    std::vector<int> xd = x;
    xd[d] += 1;
    Value r = f.at(xd) - f.at(x) - v;
    worst = std::max(worst, r.norm() / std::max(1.0, v.norm()));
  });
  if (worst > tol)
    fail(Err::NotClosed, "additive closure violated, residual " + std::to_string(worst));
  return f;
}

VertexNet multiplicative_primitive(const EdgeNet& p, const Value& f0, double tol) {
  const LatticeBox& box = p.box();
  VertexNet f(box);
  std::vector<int> origin(box.dim(), 0);
  f.set(origin, f0);
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int d = 0; d < box.dim(); ++d) {
      if (x[d] >= box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      if (!f.has(xd)) f.set(xd, p.at(d, x) * algebra::inverse(f.at(x), tol));
    }
  }
  double worst = 0;
  p.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    std::vector<int> xd = x;
    xd[d] += 1;
    Value r = f.at(xd) - v * algebra::inverse(f.at(x), tol);
    worst = std::max(worst, r.norm() / std::max(1.0, v.norm()));
  });
  if (worst > tol)
    fail(Err::NotClosed, "multiplicative closure violated, residual " + std::to_string(worst));
  return f;
}

// ---------------------------------------------------------------------------
// Labels and primary equivalence

LabelReport labelling_check(const EdgeNet& p, double tol) {
  const LatticeBox& box = p.box();
  LabelReport rep;
  rep.per_direction.assign(box.dim(), 0.0);
  for (int d = 0; d < box.dim(); ++d) {
    // reference value per d-coordinate: edge on the d axis
    for (long ei = 0; ei < box.edge_count(d); ++ei) {
      std::vector<int> x = box.edge_coords(d, ei);
      std::vector<int> ax(box.dim(), 0);
      ax[d] = x[d];
      if (!p.has(d, x) || !p.has(d, ax)) continue;
      const Value& v = p.at(d, x);
      const Value& ref = p.at(d, ax);
      Scalar t0 = ref.trace_invariant(), t1 = v.trace_invariant();
      Scalar d0 = ref.det_invariant(), d1 = v.det_invariant();
      double scale = std::max({1.0, std::abs(t0), std::abs(d0)});
      double dev = std::max(std::abs(t1 - t0), std::abs(d1 - d0)) / scale;
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.worst_dir = d;
        rep.worst_edge = x;
      }
      rep.per_direction[d] = std::max(rep.per_direction[d], dev);
    }
  }
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

namespace {

template <typename F>
EdgeNet map_net(const EdgeNet& p, F&& f) {
  EdgeNet out(p.box());
  p.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) { out.set(d, x, f(v)); });
  return out;
}

}  // namespace

EdgeNet conjugate_net(const EdgeNet& p, const Value& c, double tol) {
  Value cinv = algebra::inverse(c, tol);
  return map_net(p, [&](const Value& v) { return c * v * cinv; });
}

EdgeNet scale_net(const EdgeNet& p, Scalar s) {
  if (std::abs(s) == 0.0) fail(Err::Validation, "scale factor must be nonzero");
  return map_net(p, [&](const Value& v) { return algebra::scale(s, v); });
}

EdgeNet shift_net(const EdgeNet& p, Scalar r) {
  return map_net(p, [&](const Value& v) { return algebra::shift(r, v); });
}

EdgeNet primary_equivalent(const EdgeNet& p, const Value& c, Scalar s, Scalar r, double tol) {
  if (std::abs(s) == 0.0) fail(Err::Validation, "scale factor must be nonzero");
  Value cinv = algebra::inverse(c, tol);
  return map_net(p, [&](const Value& v) {
    return c * algebra::shift(r, algebra::scale(s, v)) * cinv;
  });
}

}  // namespace skewnet::lattice
