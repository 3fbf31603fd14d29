#include "skewnet/surfaces.hpp"

#include <cmath>

namespace skewnet::surfaces {

using algebra::inverse;
using algebra::mat2_identity;
using algebra::mat2_to_quat;
using algebra::quat_to_mat2;
using algebra::quaternion_pattern_residual;
using algebra::Value;

namespace {

const Scalar kI(0, 1);

void require_nonzero(Scalar z, double tol, const char* what) {
  if (std::abs(z) <= tol) fail(Err::Degenerate, std::string(what) + " vanishes");
}

}  // namespace

Scalar cross_ratio(Scalar a, Scalar b, Scalar c, Scalar d, double tol) {
  Scalar den = (b - c) * (d - a);
  require_nonzero(den, tol * tol, "cross-ratio denominator");
  return (a - b) * (c - d) / den;
}

Scalar cr_quad_complete(Scalar f, Scalar fi, Scalar fj, Scalar ai, Scalar aj, double tol) {
  Scalar q = (ai * ai) / (aj * aj);
  Scalar A = f - fi, B = fj - f;
  Scalar den = A + q * B;
  require_nonzero(den, tol, "quad completion denominator");
  return (A * fj + q * B * fi) / den;
}

Scalar s_evolve(Scalar s, Scalar si, Scalar sj, Scalar ai, Scalar aj, double tol) {
  Scalar den = aj * si - ai * sj;
  require_nonzero(den, tol, "s-evolution denominator");
  return s * (aj * sj - ai * si) / den;
}

Scalar s_solve_j(Scalar s, Scalar si, Scalar sij, Scalar ai, Scalar aj, double tol) {
  Scalar den = ai * sij + aj * s;
  require_nonzero(den, tol, "s-completion denominator");
  return si * (ai * s + aj * sij) / den;
}

Scalar CrossRatioLattice::edge_d(int dir, const std::vector<int>& x) const {
  std::vector<int> xd = x;
  xd[dir] += 1;
  return f[box.vertex_index(xd)] - f[box.vertex_index(x)];
}

CrossRatioLattice make_cross_ratio_lattice(LatticeBox box, std::vector<Scalar> f,
                                           std::vector<std::vector<Scalar>> alpha, double tol) {
  CrossRatioLattice lat;
  lat.box = std::move(box);
  lat.f = std::move(f);
  lat.alpha = std::move(alpha);
  if (long(lat.f.size()) != lat.box.vertex_count())
    fail(Err::Validation, "vertex count mismatch");
  if (int(lat.alpha.size()) != lat.box.dim()) fail(Err::Validation, "one label list per direction");
  for (int d = 0; d < lat.box.dim(); ++d) {
    if (int(lat.alpha[d].size()) != lat.box.extents()[d])
      fail(Err::Validation, "label list length must match the extent");
    for (Scalar a : lat.alpha[d]) require_nonzero(a, tol, "edge label");
  }

  // derive s from s(0) = 1 and d^i = alpha^i s_i s
  lat.s.assign(lat.box.vertex_count(), Scalar(0));
  std::vector<char> have(lat.box.vertex_count(), 0);
  lat.s[0] = Scalar(1);
  have[0] = 1;
  for (long vi = 0; vi < lat.box.vertex_count(); ++vi) {
    std::vector<int> x = lat.box.vertex_coords(vi);
    if (!have[vi]) fail(Err::Validation, "s integration hit a gap");
    for (int d = 0; d < lat.box.dim(); ++d) {
      if (x[d] >= lat.box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      long ti = lat.box.vertex_index(xd);
      if (have[ti]) continue;
      Scalar denom = lat.alpha[d][x[d]] * lat.s[vi];
      require_nonzero(denom, tol, "s recursion denominator");
      lat.s[ti] = lat.edge_d(d, x) / denom;
      have[ti] = 1;
    }
  }
  // consistency of s with every edge
  double worst = 0;
  for (long vi = 0; vi < lat.box.vertex_count(); ++vi) {
    std::vector<int> x = lat.box.vertex_coords(vi);
    for (int d = 0; d < lat.box.dim(); ++d) {
      if (x[d] >= lat.box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      Scalar dv = lat.edge_d(d, x);
      Scalar rec = lat.alpha[d][x[d]] * lat.s[lat.box.vertex_index(xd)] * lat.s[vi];
      worst = std::max(worst, std::abs(dv - rec) / std::max(1.0, std::abs(dv)));
    }
  }
  if (worst > std::sqrt(tol))
    fail(Err::Validation, "f is not a cross-ratio system for these labels, deviation " +
                              std::to_string(worst));
  return lat;
}

CrossRatioLattice fill_cross_ratio(const std::vector<std::vector<Scalar>>& axis_f,
                                   std::vector<std::vector<Scalar>> alpha, double tol) {
  int n = int(axis_f.size());
  if (n < 1) fail(Err::Validation, "no axis data");
  std::vector<int> extents;
  for (const auto& ax : axis_f) extents.push_back(int(ax.size()) - 1);
  LatticeBox box(extents);
  std::vector<Scalar> f(box.vertex_count(), Scalar(0));
  std::vector<char> have(box.vertex_count(), 0);
  for (int d = 0; d < n; ++d) {
    if (axis_f[d].empty() || std::abs(axis_f[d][0] - axis_f[0][0]) > 1e-12)
      fail(Err::Validation, "axis values must share the origin");
    std::vector<int> x(n, 0);
    for (int k = 0; k <= extents[d]; ++k) {
      x[d] = k;
      f[box.vertex_index(x)] = axis_f[d][k];
      have[box.vertex_index(x)] = 1;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (long vi = 0; vi < box.vertex_count(); ++vi) {
      if (!have[vi]) continue;
      std::vector<int> x = box.vertex_coords(vi);
      for (int i = 0; i < n; ++i) {
        if (x[i] >= extents[i]) continue;
        for (int j = i + 1; j < n; ++j) {
          if (x[j] >= extents[j]) continue;
          std::vector<int> xi = x, xj = x, xij = x;
          xi[i] += 1;
          xj[j] += 1;
          xij[i] += 1;
          xij[j] += 1;
          long ti = box.vertex_index(xij);
          if (!have[box.vertex_index(xi)] || !have[box.vertex_index(xj)] || have[ti]) continue;
          f[ti] = cr_quad_complete(f[vi], f[box.vertex_index(xi)], f[box.vertex_index(xj)],
                                   alpha[i][x[i]], alpha[j][x[j]], tol);
          have[ti] = 1;
          changed = true;
        }
      }
    }
  }
  for (char h : have)
    if (!h) fail(Err::Degenerate, "cross-ratio completion could not fill the box");
  return make_cross_ratio_lattice(std::move(box), std::move(f), std::move(alpha), tol);
}

double cr_residual(const CrossRatioLattice& lat) {
  double worst = 0;
  const LatticeBox& box = lat.box;
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int i = 0; i < box.dim(); ++i) {
      if (x[i] >= box.extents()[i]) continue;
      for (int j = i + 1; j < box.dim(); ++j) {
        if (x[j] >= box.extents()[j]) continue;
        std::vector<int> xi = x, xj = x, xij = x;
        xi[i] += 1;
        xj[j] += 1;
        xij[i] += 1;
        xij[j] += 1;
        Scalar cr = cross_ratio(lat.f_at(x), lat.f_at(xi), lat.f_at(xij), lat.f_at(xj));
        Scalar ai = lat.alpha[i][x[i]], aj = lat.alpha[j][x[j]];
        Scalar ratio = (ai * ai) / (aj * aj);
        worst = std::max(worst, std::abs(cr - ratio) / std::max(1.0, std::abs(ratio)));
      }
    }
  }
  return worst;
}

EdgeNet cr_to_parallelogram(const CrossRatioLattice& lat, double tol) {
  EdgeNet net(lat.box);
  for (int d = 0; d < lat.box.dim(); ++d) {
    for (long ei = 0; ei < lat.box.edge_count(d); ++ei) {
      std::vector<int> x = lat.box.edge_coords(d, ei);
      Scalar dv = lat.edge_d(d, x);
      require_nonzero(dv, tol, "edge d^i");
      Scalar a = lat.alpha[d][x[d]];
      net.set(d, x, Value(Mat2{0, dv, -(a * a) / dv, 0}));
    }
  }
  return net;
}

CrossRatioLattice dual_lattice(const CrossRatioLattice& lat, double tol) {
  const LatticeBox& box = lat.box;
  CrossRatioLattice dual;
  dual.box = box;
  dual.alpha = lat.alpha;
  dual.f.assign(box.vertex_count(), Scalar(0));
  std::vector<char> have(box.vertex_count(), 0);
  have[0] = 1;
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int d = 0; d < box.dim(); ++d) {
      if (x[d] >= box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      long ti = box.vertex_index(xd);
      if (have[ti]) continue;
      Scalar dv = lat.edge_d(d, x);
      require_nonzero(dv, tol, "edge d^i");
      Scalar a = lat.alpha[d][x[d]];
      dual.f[ti] = dual.f[vi] + (a * a) / dv;
      have[ti] = 1;
    }
  }
  // additive closure of the dual edges on every quad
  double worst = 0;
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int i = 0; i < box.dim(); ++i) {
      if (x[i] >= box.extents()[i]) continue;
      for (int j = i + 1; j < box.dim(); ++j) {
        if (x[j] >= box.extents()[j]) continue;
        std::vector<int> xi = x, xj = x;
        xi[i] += 1;
        xj[j] += 1;
        Scalar ai = lat.alpha[i][x[i]], aj = lat.alpha[j][x[j]];
        Scalar lhs = (ai * ai) / lat.edge_d(i, x) + (aj * aj) / lat.edge_d(j, xi);
        Scalar rhs = (aj * aj) / lat.edge_d(j, x) + (ai * ai) / lat.edge_d(i, xj);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  if (worst > std::sqrt(tol)) fail(Err::Degenerate, "dual edges do not close");
  dual.s = make_cross_ratio_lattice(dual.box, dual.f, dual.alpha, tol).s;
  return dual;
}

// ---------------------------------------------------------------------------
// K-nets

std::pair<VertexNet, lax::Frame> knet_family(const EdgeNet& p, double t, double tol) {
  p.for_each_edge([&](int, const std::vector<int>&, const Value& v) {
    if (v.tag() != algebra::Tag::Quat)
      fail(Err::AlgebraMismatch, "K-net construction needs a quaternionic net");
    const algebra::Quaternion& q = v.quat();
    double off = std::max(std::abs(q.w), std::abs(q.z));
    if (off > std::sqrt(tol) * std::max(1.0, q.norm()))
      fail(Err::Validation, "net is not contained in the i,j-plane");
  });
  lax::Frame fr = lax::propagate_frame(p, lax::SpectralPath::exponential(), t,
                                       p.first_edge().one(), tol);
  return {lax::sym_points(fr, tol), std::move(fr)};
}

namespace {

Mat2 classic_L(Scalar x, Scalar lambda) { return {x, kI * lambda, kI * lambda, std::conj(x)}; }

Mat2 classic_M(Scalar y, Scalar lambda) {
  return {1, y / lambda, -std::conj(y) / lambda, 1};
}

}  // namespace

EdgeNet gauge_classic_knet(const ClassicKnetData& data, double tol) {
  const LatticeBox& box = data.box;
  if (box.dim() != 2) fail(Err::Validation, "classical K-net data is two-dimensional");
  // compatibility M_1 L = L_2 M at a couple of sample lambdas
  double worst = 0;
  for (double lv : {0.7, 1.3}) {
    Scalar lambda(lv);
    for (int k = 0; k + 1 <= box.extents()[0]; ++k) {
      for (int l = 0; l + 1 <= box.extents()[1]; ++l) {
        if (k >= box.extents()[0] || l >= box.extents()[1]) continue;
        Scalar xkl = data.x[box.edge_index(0, {k, l})];
        Scalar xkl1 = data.x[box.edge_index(0, {k, l + 1})];
        Scalar ykl = data.y[box.edge_index(1, {k, l})];
        Scalar yk1l = data.y[box.edge_index(1, {k + 1, l})];
        Mat2 lhs = classic_M(yk1l, lambda) * classic_L(xkl, lambda);
        Mat2 rhs = classic_L(xkl1, lambda) * classic_M(ykl, lambda);
        worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
      }
    }
  }
  if (worst > std::sqrt(tol))
    fail(Err::Incompatible, "classical data violates L_2 M = M_1 L, residual " +
                                std::to_string(worst));

  // planar edges from the (1,2)-entry a: the i,j-plane quaternion with
  // matrix [[0, a], [-conj(a), 0]] is Im(a) i - Re(a) j
  EdgeNet out(box);
  for (long ei = 0; ei < box.edge_count(0); ++ei) {
    std::vector<int> x = box.edge_coords(0, ei);
    Scalar xv = data.x[ei];
    Scalar a = (x[0] % 2 == 0) ? -kI * std::conj(xv) : -kI * xv;
    out.set(0, x, Value(algebra::Quaternion{0, a.imag(), -a.real(), 0}));
  }
  for (long ei = 0; ei < box.edge_count(1); ++ei) {
    std::vector<int> x = box.edge_coords(1, ei);
    Scalar yv = data.y[ei];
    Scalar b = (x[0] % 2 == 0) ? yv : -std::conj(yv);
    out.set(1, x, Value(algebra::Quaternion{0, b.imag(), -b.real(), 0}));
  }
  (void)tol;
  return out;
}

// ---------------------------------------------------------------------------
// 4D lattices

int Lattice4D::diag_m() const { return std::min(lat.box.extents()[0], lat.box.extents()[2]); }
int Lattice4D::diag_n() const { return std::min(lat.box.extents()[1], lat.box.extents()[3]); }

namespace {

Scalar mode_label(Mode4D mode, Scalar seed_label) {
  // C+: alpha^1 conj(alpha^3) = -1; C-: alpha^3 = conj(alpha^1)
  if (mode == Mode4D::CPlus) return -1.0 / std::conj(seed_label);
  return std::conj(seed_label);
}

}  // namespace

Lattice4D extend_to_4d(const CrossRatioLattice& seed, Mode4D mode, std::array<int, 4> extents,
                       double tol) {
  if (seed.box.dim() != 2) fail(Err::Validation, "seed must be two-dimensional");
  int e1 = extents[0], e2 = extents[1], e3 = extents[2], e4 = extents[3];
  if (e1 != seed.box.extents()[0] || e2 != seed.box.extents()[1])
    fail(Err::Validation, "extents 1,2 must match the seed");
  if (e3 > e1 || e4 > e2)
    fail(Err::Validation, "extents 3,4 may not exceed the seed extents");

  std::vector<std::vector<Scalar>> alpha(4);
  alpha[0] = seed.alpha[0];
  alpha[1] = seed.alpha[1];
  alpha[2].resize(e3);
  alpha[3].resize(e4);
  for (int k = 0; k < e3; ++k) alpha[2][k] = mode_label(mode, seed.alpha[0][k]);
  for (int l = 0; l < e4; ++l) alpha[3][l] = mode_label(mode, seed.alpha[1][l]);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (Scalar ai : alpha[i])
        for (Scalar aj : alpha[j])
          if (std::abs(ai - aj) <= 1e-12)
            fail(Err::LabelConflict, "mode relations force alpha^i = alpha^j between directions " +
                                         std::to_string(i + 1) + " and " + std::to_string(j + 1));

  LatticeBox box4({e1, e2, e3, e4});
  std::vector<Scalar> s4(box4.vertex_count(), Scalar(0));
  std::vector<char> have(box4.vertex_count(), 0);
  auto idx = [&](int a, int b, int c, int d) { return box4.vertex_index({a, b, c, d}); };
  auto put = [&](long i, Scalar v) {
    s4[i] = v;
    have[i] = 1;
  };

  // seed plane
  for (int i = 0; i <= e1; ++i)
    for (int j = 0; j <= e2; ++j) put(idx(i, j, 0, 0), seed.s_at({i, j}));

  // Half-swap symmetry implied by the mode conditions: for sigma(x) =
  // (x3, x4, x1, x2) the map s fulfills s(sigma x) = 1/conj(s(x)) on a C-
  // lattice and, on a C+ lattice, conj(s(x)) at even total parity and
  // 1/conj(s(x)) at odd. This extends the diagonal condition and gives the
  // points on the far side of the diagonal, where the quad equations alone
  // degenerate for symmetric seeds; every quad is re-verified afterwards.
  auto swap_value = [&](Scalar z, int total_parity) {
    if (mode == Mode4D::CMinus || (total_parity & 1)) return 1.0 / std::conj(z);
    return std::conj(z);
  };

  // 1,3-plane from the diagonal condition s_1 conj(s_3) = 1 and the evolution
  for (int k = 0; k < e3; ++k) {
    Scalar diag_next = 1.0 / std::conj(s4[idx(k + 1, 0, k, 0)]);
    put(idx(k, 0, k + 1, 0), diag_next);
    for (int i = k; i < e1; ++i) {
      Scalar v = s_evolve(s4[idx(i, 0, k, 0)], s4[idx(i + 1, 0, k, 0)], s4[idx(i, 0, k + 1, 0)],
                          alpha[0][i], alpha[2][k], tol);
      put(idx(i + 1, 0, k + 1, 0), v);
    }
    for (int i = k - 1; i >= 0; --i)
      put(idx(i, 0, k + 1, 0), swap_value(s4[idx(k + 1, 0, i, 0)], i + k + 1));
  }
  // 2,4-plane
  for (int l = 0; l < e4; ++l) {
    Scalar diag_next = 1.0 / std::conj(s4[idx(0, l + 1, 0, l)]);
    put(idx(0, l, 0, l + 1), diag_next);
    for (int j = l; j < e2; ++j) {
      Scalar v = s_evolve(s4[idx(0, j, 0, l)], s4[idx(0, j + 1, 0, l)], s4[idx(0, j, 0, l + 1)],
                          alpha[1][j], alpha[3][l], tol);
      put(idx(0, j + 1, 0, l + 1), v);
    }
    for (int j = l - 1; j >= 0; --j)
      put(idx(0, j, 0, l + 1), swap_value(s4[idx(0, l + 1, 0, j)], j + l + 1));
  }

  // bulk: evolve s over every quad until stable (deterministic lex sweeps)
  bool changed = true;
  while (changed) {
    changed = false;
    for (long vi = 0; vi < box4.vertex_count(); ++vi) {
      if (!have[vi]) continue;
      std::vector<int> x = box4.vertex_coords(vi);
      for (int i = 0; i < 4; ++i) {
        if (x[i] >= e1 && i == 0) continue;
        if (x[i] >= box4.extents()[i]) continue;
        for (int j = i + 1; j < 4; ++j) {
          if (x[j] >= box4.extents()[j]) continue;
          std::vector<int> xi = x, xj = x, xij = x;
          xi[i] += 1;
          xj[j] += 1;
          xij[i] += 1;
          xij[j] += 1;
          long ii = box4.vertex_index(xi), jj = box4.vertex_index(xj), tt = box4.vertex_index(xij);
          if (!have[ii] || !have[jj] || have[tt]) continue;
          put(tt, s_evolve(s4[vi], s4[ii], s4[jj], alpha[i][x[i]], alpha[j][x[j]], tol));
          changed = true;
        }
      }
    }
  }
  for (long vi = 0; vi < box4.vertex_count(); ++vi)
    if (!have[vi]) fail(Err::Degenerate, "s could not be evolved to the whole box");

  // certify the evolution on every quad (cross-multiplied, no denominators)
  double worst_s = 0;
  for (long vi = 0; vi < box4.vertex_count(); ++vi) {
    std::vector<int> x = box4.vertex_coords(vi);
    for (int i = 0; i < 4; ++i) {
      if (x[i] >= box4.extents()[i]) continue;
      for (int j = i + 1; j < 4; ++j) {
        if (x[j] >= box4.extents()[j]) continue;
        std::vector<int> xi = x, xj = x, xij = x;
        xi[i] += 1;
        xj[j] += 1;
        xij[i] += 1;
        xij[j] += 1;
        Scalar s = s4[vi], si = s4[box4.vertex_index(xi)], sj = s4[box4.vertex_index(xj)];
        Scalar sij = s4[box4.vertex_index(xij)];
        Scalar ai = alpha[i][x[i]], aj = alpha[j][x[j]];
        Scalar lhs = sij * (aj * si - ai * sj);
        Scalar rhs = s * (aj * sj - ai * si);
        double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        worst_s = std::max(worst_s, std::abs(lhs - rhs) / scale);
      }
    }
  }
  if (worst_s > std::sqrt(tol))
    fail(Err::Degenerate, "extension violates the s evolution, residual " + std::to_string(worst_s));

  // integrate f from d^i = alpha^i s_i s
  std::vector<Scalar> f4(box4.vertex_count(), Scalar(0));
  std::vector<char> havef(box4.vertex_count(), 0);
  f4[0] = seed.f_at({0, 0});
  havef[0] = 1;
  for (long vi = 0; vi < box4.vertex_count(); ++vi) {
    std::vector<int> x = box4.vertex_coords(vi);
    for (int d = 0; d < 4; ++d) {
      if (x[d] >= box4.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      long ti = box4.vertex_index(xd);
      if (havef[ti]) continue;
      f4[ti] = f4[vi] + alpha[d][x[d]] * s4[ti] * s4[vi];
      havef[ti] = 1;
    }
  }

  Lattice4D out;
  out.mode = mode;
  out.lat.box = box4;
  out.lat.f = std::move(f4);
  out.lat.s = std::move(s4);
  out.lat.alpha = std::move(alpha);

  // seed plane must be reproduced
  for (int i = 0; i <= e1; ++i)
    for (int j = 0; j <= e2; ++j)
      if (std::abs(out.lat.f_at({i, j, 0, 0}) - seed.f_at({i, j})) >
          std::sqrt(tol) * std::max(1.0, std::abs(seed.f_at({i, j}))))
        fail(Err::Degenerate, "extension does not restrict to the seed");

  ModeReport rep = mode_invariants(out);
  if (std::max(rep.dpw_dev, rep.reality_dev) > std::sqrt(tol))
    fail(Err::Degenerate, "mode conditions violated on D, deviation " +
                              std::to_string(std::max(rep.dpw_dev, rep.reality_dev)));
  return out;
}

ModeReport mode_invariants(const Lattice4D& l4) {
  ModeReport rep;
  int m = l4.diag_m(), n = l4.diag_n();
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      std::vector<int> x = l4.diag_vertex(i, j);
      Scalar s = l4.lat.s_at(x);
      if (l4.mode == Mode4D::CPlus)
        rep.reality_dev = std::max(rep.reality_dev, std::abs(s.imag()));
      else
        rep.reality_dev = std::max(rep.reality_dev, std::abs(std::abs(s) - 1.0));
      if (i < m) {
        std::vector<int> x1 = x, x3 = x;
        x1[0] += 1;
        x3[2] += 1;
        Scalar dev = l4.lat.s_at(x1) * std::conj(l4.lat.s_at(x3)) - Scalar(1);
        rep.dpw_dev = std::max(rep.dpw_dev, std::abs(dev));
      }
      if (j < n) {
        std::vector<int> x2 = x, x4 = x;
        x2[1] += 1;
        x4[3] += 1;
        Scalar dev = l4.lat.s_at(x2) * std::conj(l4.lat.s_at(x4)) - Scalar(1);
        rep.dpw_dev = std::max(rep.dpw_dev, std::abs(dev));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Diagonal Lax matrices

Mat2 DiagLax::eval(Scalar lambda) const {
  Scalar l2 = lambda * lambda;
  return l2 * cp + c0 + (1.0 / l2) * c2;
}

Mat2 DiagLax::deriv(Scalar lambda, Scalar dlambda) const {
  Scalar l2 = lambda * lambda;
  return (2.0 * lambda * dlambda) * cp + (-2.0 * dlambda / (lambda * l2)) * c2;
}

Mat2 DiagLax::eval_sub(Scalar lambda) const { return lambda * cp + c0 + (1.0 / lambda) * c2; }

DiagLax diagonal_lax(const Lattice4D& l4, int i, int j, int dir, double tol) {
  const CrossRatioLattice& lat = l4.lat;
  std::vector<int> x = l4.diag_vertex(i, j);
  int da = (dir == 0) ? 0 : 1;  // lattice direction of the first factor
  int db = (dir == 0) ? 2 : 3;
  int coord = (dir == 0) ? i : j;
  Scalar aa = lat.alpha[da][coord], ab = lat.alpha[db][coord];
  std::vector<int> xa = x, xb = x, xab = x;
  xa[da] += 1;
  xb[db] += 1;
  xab[da] += 1;
  xab[db] += 1;
  Scalar s = lat.s_at(x), sa = lat.s_at(xa), sb = lat.s_at(xb), sab = lat.s_at(xab);

  // off-diagonal symmetry identity implied by the evolution
  Scalar lhs = sa * (aa * s + ab * sab);
  Scalar rhs = sb * (ab * s + aa * sab);
  if (std::abs(lhs - rhs) > std::sqrt(tol) * std::max(1.0, std::abs(lhs)))
    fail(Err::Degenerate, "off-diagonal identity violated; lattice data inconsistent");

  DiagLax L;
  L.cp = mat2_identity();
  L.c0 = Mat2{0, sa * (aa * s + ab * sab), -(ab / sab + aa / s) / sa, 0};
  L.c2 = Mat2{-ab * aa * sab / s, 0, 0, -ab * aa * s / sab};
  return L;
}

std::vector<Scalar> beta_branch(const Lattice4D& l4, int dir, double tol) {
  int count = (dir == 0) ? l4.diag_m() : l4.diag_n();
  int da = (dir == 0) ? 0 : 1;
  int db = (dir == 0) ? 2 : 3;
  std::vector<Scalar> beta(count);
  for (int k = 0; k < count; ++k) {
    Scalar b2 = -l4.lat.alpha[da][k] * l4.lat.alpha[db][k];
    require_nonzero(b2, tol, "beta^2");
    Scalar b = std::sqrt(b2);
    if (k > 0 && std::abs(b - beta[k - 1]) > std::abs(b + beta[k - 1])) b = -b;
    beta[k] = b;
  }
  return beta;
}

DiagLax cplus_gauge(const DiagLax& L, Scalar beta, Scalar s, Scalar s13) {
  auto sandwich = [&](const Mat2& m) {
    // (1/beta) diag(1, s13) m diag(1, 1/s)
    return (1.0 / beta) * Mat2{m.a, m.b / s, s13 * m.c, s13 * m.d / s};
  };
  return {sandwich(L.cp), sandwich(L.c0), sandwich(L.c2)};
}

// ---------------------------------------------------------------------------
// Surface extraction over D

DiagonalSurface surface_extract(const Lattice4D& l4, double t, double tol) {
  DiagonalSurface surf;
  surf.mode = l4.mode;
  surf.t = t;
  surf.m = l4.diag_m();
  surf.n = l4.diag_n();
  int m = surf.m, n = surf.n;

  Scalar lambda, dlambda;
  if (l4.mode == Mode4D::CMinus) {
    lambda = Scalar(std::exp(t));
    dlambda = lambda;
  } else {
    lambda = std::exp(Scalar(0, t));
    dlambda = kI * lambda;
  }

  std::vector<Scalar> beta1, beta2;
  if (l4.mode == Mode4D::CPlus) {
    beta1 = beta_branch(l4, 0, tol);
    beta2 = beta_branch(l4, 1, tol);
  }

  auto lax_at = [&](int i, int j, int dir) {
    DiagLax L = diagonal_lax(l4, i, j, dir, tol);
    if (l4.mode == Mode4D::CPlus) {
      std::vector<int> x = l4.diag_vertex(i, j);
      std::vector<int> xab = x;
      xab[dir == 0 ? 0 : 1] += 1;
      xab[dir == 0 ? 2 : 3] += 1;
      Scalar s = l4.lat.s_at(x), sab = l4.lat.s_at(xab);
      L = cplus_gauge(L, (dir == 0) ? beta1[i] : beta2[j], s, sab);
    }
    return L;
  };

  LatticeBox grid({m, n});
  std::vector<Mat2> phi(grid.vertex_count()), dphi(grid.vertex_count());
  std::vector<char> have(grid.vertex_count(), 0);
  phi[0] = mat2_identity();
  dphi[0] = Mat2{};
  have[0] = 1;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      long vi = grid.vertex_index({i, j});
      if (!have[vi]) fail(Err::FrameSingular, "frame propagation gap");
      for (int dir = 0; dir < 2; ++dir) {
        int ii = i + (dir == 0), jj = j + (dir == 1);
        if (ii > m || jj > n) continue;
        long ti = grid.vertex_index({ii, jj});
        if (have[ti]) continue;
        DiagLax L = lax_at(i, j, dir);
        Mat2 Lv = L.eval(lambda);
        Mat2 Ld = L.deriv(lambda, dlambda);
        phi[ti] = Lv * phi[vi];
        dphi[ti] = Lv * dphi[vi] + Ld * phi[vi];
        if (std::abs(phi[ti].det()) <= tol * tol * std::max(1.0, phi[ti].norm() * phi[ti].norm()))
          fail(Err::FrameSingular, "frame lost invertibility at (" + std::to_string(ii) + "," +
                                       std::to_string(jj) + ")");
        have[ti] = 1;
      }
    }
  }

  // compatibility residual M_1 L = L_2 M over the D grid
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      Mat2 lhs = lax_at(i + 1, j, 1).eval(lambda) * lax_at(i, j, 0).eval(lambda);
      Mat2 rhs = lax_at(i, j + 1, 0).eval(lambda) * lax_at(i, j, 1).eval(lambda);
      surf.compat_residual =
          std::max(surf.compat_residual, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
    }
  }

  surf.points.resize(grid.vertex_count());
  if (l4.mode == Mode4D::CPlus) surf.normals.resize(grid.vertex_count());
  Mat2 kmat = quat_to_mat2(algebra::quat_k());
  for (long vi = 0; vi < grid.vertex_count(); ++vi) {
    Mat2 inv = inverse(phi[vi], tol);
    Mat2 ft = inv * dphi[vi];
    surf.pattern_residual = std::max(surf.pattern_residual, quaternion_pattern_residual(ft));
    surf.points[vi] = mat2_to_quat(ft).vec();
    if (l4.mode == Mode4D::CPlus) {
      Mat2 nt = inv * kmat * phi[vi];
      surf.pattern_residual = std::max(surf.pattern_residual, quaternion_pattern_residual(nt));
      surf.normals[vi] = mat2_to_quat(nt);
    }
  }
  if (surf.pattern_residual > 1e-6)
    fail(Err::PatternViolation, "diagonal points are not quaternionic, residual " +
                                    std::to_string(surf.pattern_residual));
  return surf;
}

// ---------------------------------------------------------------------------
// CMC / cK entries

namespace {

Mat2 jpow(int k) {
  static const Mat2 j = quat_to_mat2(algebra::quat_j());
  Mat2 acc = mat2_identity();
  int kk = ((k % 4) + 4) % 4;
  for (int i = 0; i < kk; ++i) acc = acc * j;
  return acc;
}

Mat2 ipow(int k) {
  static const Mat2 i = quat_to_mat2(algebra::quat_i());
  Mat2 acc = mat2_identity();
  int kk = ((k % 4) + 4) % 4;
  for (int n = 0; n < kk; ++n) acc = acc * i;
  return acc;
}

// parity of the first two lattice coordinates
bool even_site(const std::vector<int>& x) { return ((x[0] + x[1]) & 1) == 0; }

}  // namespace

Mat2 cmc_lax(Scalar a, Scalar b, Scalar lambda) {
  Scalar bc = std::conj(b);
  return {a, lambda * b + 1.0 / (lambda * b), -bc / lambda - lambda / bc, std::conj(a)};
}

CmcEntries cmc_entries(const Lattice4D& l4, int i, int j, int dir, double tol) {
  if (l4.mode != Mode4D::CPlus) fail(Err::Validation, "cmc entries need a C+ lattice");
  const CrossRatioLattice& lat = l4.lat;
  std::vector<int> x = l4.diag_vertex(i, j);
  int da = (dir == 0) ? 0 : 1;
  int db = (dir == 0) ? 2 : 3;
  int coord = (dir == 0) ? i : j;
  std::vector<int> xa = x, xab = x;
  xa[da] += 1;
  xab[da] += 1;
  xab[db] += 1;

  auto shat = [&](const std::vector<int>& y) {
    Scalar s = lat.s_at(y);
    return even_site(y) ? s : 1.0 / s;
  };
  Scalar sh = shat(x), sh_a = shat(xa), sh_ab = shat(xab);
  Scalar aa = lat.alpha[da][coord], ab = lat.alpha[db][coord];
  std::vector<Scalar> betas = beta_branch(l4, dir, tol);
  Scalar beta = betas[coord];

  CmcEntries out;
  out.b = 1.0 / (beta * std::sqrt(sh_ab * sh));
  out.a = -(std::sqrt(sh) * sh_a / (std::sqrt(sh_ab) * beta)) * (ab * sh_ab + aa / sh);

  // gauged target: sqrt(s/s_ab) G_ab Ltilde G^{-1} with lambda^2 -> lambda
  Scalar s = lat.s_at(x), sab = lat.s_at(xab);
  DiagLax L = cplus_gauge(diagonal_lax(l4, i, j, dir, tol), beta, s, sab);
  Scalar pref = std::sqrt(s / sab);
  int par = i + j;
  double best = 1e300, best_flip = 1e300;
  for (double tv : {0.35, 0.9}) {
    Scalar lambda = std::exp(Scalar(0, tv));
    Mat2 target = pref * (jpow(par + 1) * L.eval_sub(lambda) * jpow(-par));
    Mat2 asm_plus = cmc_lax(out.a, out.b, lambda);
    double scale = std::max(1.0, target.norm());
    best = std::min(best, 1e300);
    double r_plus = (asm_plus - target).norm() / scale;
    double r_minus = (asm_plus + target).norm() / scale;  // assembled(-a,-b) = -assembled(a,b)
    if (tv == 0.35) {
      best = r_plus;
      best_flip = r_minus;
    } else {
      best = std::max(best, r_plus);
      best_flip = std::max(best_flip, r_minus);
    }
  }
  if (best_flip < best) {
    out.a = -out.a;
    out.b = -out.b;
    out.flipped = true;
    out.residual = best_flip;
  } else {
    out.residual = best;
  }
  if (out.residual > std::sqrt(tol))
    fail(Err::BranchFailure,
         "cmc entries do not reproduce the gauged matrix, residual " + std::to_string(out.residual));
  return out;
}

Mat2 ck_lax(const CkEntries& e, Scalar lambda) {
  return {e.l / (e.t1 * e.r) + e.t1 * e.l * e.r1, kI * (lambda - e.r * e.r1 / lambda),
          kI * (lambda - 1.0 / (lambda * e.r * e.r1)),
          e.r / (e.t1 * e.l) + e.t1 / (e.l * e.r1)};
}

CkEntries ck_entries(const Lattice4D& l4, int i, int j, int dir, double tol) {
  if (l4.mode != Mode4D::CMinus) fail(Err::Validation, "cK entries need a C- lattice");
  const CrossRatioLattice& lat = l4.lat;
  std::vector<int> x = l4.diag_vertex(i, j);
  int da = (dir == 0) ? 0 : 1;
  int db = (dir == 0) ? 2 : 3;
  int coord = (dir == 0) ? i : j;
  Scalar aa = lat.alpha[da][coord];
  if (std::abs(std::abs(aa) - 1.0) > std::sqrt(tol))
    fail(Err::Validation, "cK entries need unitary labels");
  std::vector<int> xa = x, xab = x;
  xa[da] += 1;
  xab[da] += 1;
  xab[db] += 1;
  Scalar s = lat.s_at(x), sa = lat.s_at(xa), sab = lat.s_at(xab);

  CkEntries out;
  bool even = even_site(x);
  out.t1 = lat.alpha[db][coord];  // 1/alpha^a for unitary labels
  out.r = even ? s : 1.0 / s;
  out.r1 = even ? 1.0 / sab : sab;
  out.l = even ? 1.0 / (kI * sa) : kI * sa;

  DiagLax L = diagonal_lax(l4, i, j, dir, tol);
  int par = i + j;
  double worst = 0;
  for (double tv : {0.4, 1.1}) {
    Scalar lambda(std::exp(tv));
    Mat2 target = ipow(par + 1) * L.eval_sub(lambda) * ipow(-par);
    Mat2 assembled = ck_lax(out, lambda);
    worst = std::max(worst, (assembled - target).norm() / std::max(1.0, target.norm()));
  }
  out.residual = worst;
  if (worst > std::sqrt(tol))
    fail(Err::BranchFailure,
         "cK entries do not reproduce the gauged matrix, residual " + std::to_string(worst));
  return out;
}

// ---------------------------------------------------------------------------
// CMC cube gauge (forward direction)

CmcLaxData cmc_data_from_cplus(const Lattice4D& l4, double tol) {
  CmcLaxData data;
  int m = l4.diag_m(), n = l4.diag_n();
  data.box = LatticeBox({m, n});
  data.a.resize(data.box.edge_count(0));
  data.b.resize(data.box.edge_count(0));
  data.d.resize(data.box.edge_count(1));
  data.e.resize(data.box.edge_count(1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) {
      CmcEntries en = cmc_entries(l4, i, j, 0, tol);
      long ei = data.box.edge_index(0, {i, j});
      data.a[ei] = en.a;
      data.b[ei] = en.b;
    }
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j < n; ++j) {
      CmcEntries en = cmc_entries(l4, i, j, 1, tol);
      long ei = data.box.edge_index(1, {i, j});
      data.d[ei] = en.a;
      data.e[ei] = en.b;
    }
  return data;
}

namespace {

struct FrameGrid {
  std::vector<Mat2> phi;
  double compat = 0;
};

FrameGrid propagate_cmc(const CmcLaxData& data, Scalar lambda, double tol) {
  const LatticeBox& box = data.box;
  FrameGrid fg;
  fg.phi.assign(box.vertex_count(), Mat2{});
  std::vector<char> have(box.vertex_count(), 0);
  fg.phi[0] = mat2_identity();
  have[0] = 1;
  auto L = [&](int i, int j) { return cmc_lax(data.a[box.edge_index(0, {i, j})],
                                              data.b[box.edge_index(0, {i, j})], lambda); };
  auto M = [&](int i, int j) { return cmc_lax(data.d[box.edge_index(1, {i, j})],
                                              data.e[box.edge_index(1, {i, j})], lambda); };
  int m = box.extents()[0], n = box.extents()[1];
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      long vi = box.vertex_index({i, j});
      if (i < m) {
        long ti = box.vertex_index({i + 1, j});
        if (!have[ti]) {
          fg.phi[ti] = L(i, j) * fg.phi[vi];
          have[ti] = 1;
        }
      }
      if (j < n) {
        long ti = box.vertex_index({i, j + 1});
        if (!have[ti]) {
          fg.phi[ti] = M(i, j) * fg.phi[vi];
          have[ti] = 1;
        }
      }
      if (i < m && j < n) {
        Mat2 lhs = M(i + 1, j) * L(i, j);
        Mat2 rhs = L(i, j + 1) * M(i, j);
        fg.compat = std::max(fg.compat, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
      }
    }
  }
  if (fg.compat > std::sqrt(tol))
    fail(Err::Incompatible, "CMC data violates M_1 L = L_2 M, residual " + std::to_string(fg.compat));
  return fg;
}

Quaternion quat_from(const Mat2& m, double tol, double& pattern_dev) {
  pattern_dev = std::max(pattern_dev, quaternion_pattern_residual(m));
  (void)tol;
  return mat2_to_quat(m);
}

}  // namespace

CmcCubeResult cmc_cube_gauge(const CmcLaxData& data, const std::vector<double>& t_samples,
                             double tol) {
  if (t_samples.empty()) fail(Err::Validation, "need at least one t sample");
  const LatticeBox& box = data.box;
  int m = box.extents()[0], n = box.extents()[1];

  CmcCubeResult out;
  out.box = box;
  FrameGrid base = propagate_cmc(data, Scalar(1), tol);  // t = 0

  auto parity = [&](int i, int j) { return ((i + j) & 1) == 0; };

  // two-layer frame Psi at (i, j, layer) for a given t
  struct Layered {
    std::vector<Mat2> psi0, psi1;
  };
  auto make_psi = [&](double t) {
    Scalar lambda = std::exp(Scalar(0, t));
    FrameGrid fg = propagate_cmc(data, lambda, tol);
    out.compat_residual = std::max(out.compat_residual, fg.compat);
    Scalar g(std::cos(t / 2), std::sin(t / 2));
    Mat2 G{g, 0, 0, std::conj(g)};
    Mat2 Ginv{std::conj(g), 0, 0, g};
    Layered L;
    L.psi0.resize(box.vertex_count());
    L.psi1.resize(box.vertex_count());
    for (long vi = 0; vi < box.vertex_count(); ++vi) {
      std::vector<int> x = box.vertex_coords(vi);
      Mat2 base_inv = inverse(base.phi[vi], tol);
      bool even = parity(x[0], x[1]);
      Mat2 low = even ? (Ginv * fg.phi[vi]) : (G * fg.phi[vi]);
      Mat2 high = even ? (G * fg.phi[vi]) : (Ginv * fg.phi[vi]);
      L.psi0[vi] = base_inv * low;
      L.psi1[vi] = base_inv * high;
    }
    return L;
  };

  double t0 = t_samples.front();
  if (std::abs(std::sin(t0)) < 0.1)
    fail(Err::Validation, "first t sample must stay away from multiples of pi");
  Layered ref = make_psi(t0);

  auto extract = [&](const Mat2& U, double t) {
    Mat2 umat = (1.0 / Scalar(std::sin(t))) * (U - Scalar(std::cos(t)) * mat2_identity());
    double dev = 0;
    Quaternion q = quat_from(umat, tol, dev);
    dev = std::max(dev, std::abs(q.re()));
    if (dev > 1e-6)
      fail(Err::PatternViolation, "Lax matrix is not of the form cos t + sin t (imaginary)");
    return q.vec();
  };

  out.u0.resize(box.edge_count(0));
  out.u1.resize(box.edge_count(0));
  out.v0.resize(box.edge_count(1));
  out.v1.resize(box.edge_count(1));
  out.w.resize(box.vertex_count());

  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      long vi = box.vertex_index({i, j});
      if (i < m) {
        long ei = box.edge_index(0, {i, j});
        long ti = box.vertex_index({i + 1, j});
        out.u0[ei] = extract(ref.psi0[ti] * inverse(ref.psi0[vi], tol), t0);
        out.u1[ei] = extract(ref.psi1[ti] * inverse(ref.psi1[vi], tol), t0);
      }
      if (j < n) {
        long ei = box.edge_index(1, {i, j});
        long ti = box.vertex_index({i, j + 1});
        out.v0[ei] = extract(ref.psi0[ti] * inverse(ref.psi0[vi], tol), t0);
        out.v1[ei] = extract(ref.psi1[ti] * inverse(ref.psi1[vi], tol), t0);
      }
      out.w[vi] = extract(ref.psi1[vi] * inverse(ref.psi0[vi], tol), t0);
      out.w_norm_dev = std::max(out.w_norm_dev, std::abs(out.w[vi].norm() - 1.0));
    }
  }

  // cross-check the cos t + sin t u form at the remaining samples
  for (size_t si = 1; si < t_samples.size(); ++si) {
    double t = t_samples[si];
    Layered ly = make_psi(t);
    Scalar ct(std::cos(t)), st(std::sin(t));
    auto check = [&](const Mat2& U, const Quaternion& uq) {
      Mat2 expect = ct * mat2_identity() + st * quat_to_mat2(uq);
      out.form_residual =
          std::max(out.form_residual, (U - expect).norm() / std::max(1.0, expect.norm()));
    };
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= n; ++j) {
        long vi = box.vertex_index({i, j});
        if (i < m) {
          long ei = box.edge_index(0, {i, j});
          long ti = box.vertex_index({i + 1, j});
          check(ly.psi0[ti] * inverse(ly.psi0[vi], tol), out.u0[ei]);
          check(ly.psi1[ti] * inverse(ly.psi1[vi], tol), out.u1[ei]);
        }
        if (j < n) {
          long ei = box.edge_index(1, {i, j});
          long ti = box.vertex_index({i, j + 1});
          check(ly.psi0[ti] * inverse(ly.psi0[vi], tol), out.v0[ei]);
          check(ly.psi1[ti] * inverse(ly.psi1[vi], tol), out.v1[ei]);
        }
        check(ly.psi1[vi] * inverse(ly.psi0[vi], tol), out.w[vi]);
      }
    }
  }

  out.quad_residual = lattice::max_quad_residual(cmc_cube_net(out)).max();
  return out;
}

EdgeNet cmc_cube_net(const CmcCubeResult& r) {
  int m = r.box.extents()[0], n = r.box.extents()[1];
  EdgeNet net{LatticeBox({m, n, 1})};
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i < m) {
        long ei = r.box.edge_index(0, {i, j});
        net.set(0, {i, j, 0}, Value(r.u0[ei]));
        net.set(0, {i, j, 1}, Value(r.u1[ei]));
      }
      if (j < n) {
        long ei = r.box.edge_index(1, {i, j});
        net.set(1, {i, j, 0}, Value(r.v0[ei]));
        net.set(1, {i, j, 1}, Value(r.v1[ei]));
      }
      net.set(2, {i, j, 0}, Value(r.w[r.box.vertex_index({i, j})]));
    }
  }
  return net;
}

}  // namespace skewnet::surfaces
