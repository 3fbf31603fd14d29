#include "skewnet/moutard.hpp"

#include <cmath>
#include <random>

namespace skewnet::moutard {

using algebra::Value;

double QuadricNet::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  double acc = 0;
  for (int i = 0; i < p + q; ++i) acc += ((i < p) ? 1.0 : -1.0) * a[i] * b[i];
  return acc;
}

double QuadricNet::quadric_residual() const {
  double worst = 0;
  for (const auto& v : f) worst = std::max(worst, std::abs(inner(v, v) - kappa));
  return worst;
}

double QuadricNet::moutard_residual() const {
  double worst = 0;
  int n = box.dim();
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int i = 0; i < n; ++i) {
      if (x[i] >= box.extents()[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (x[j] >= box.extents()[j]) continue;
        std::vector<int> xi = x, xj = x, xij = x;
        xi[i] += 1;
        xj[j] += 1;
        xij[i] += 1;
        xij[j] += 1;
        // parallel diagonals: wedge of f_ij - f with f_j - f_i vanishes
        Clifford d1 = vec_at(xij) - vec_at(x);
        Clifford d2 = vec_at(xj) - vec_at(xi);
        Clifford wedge = (d1 * d2).grade(2);
        double scale = std::max(1.0, d1.norm() * d2.norm());
        worst = std::max(worst, wedge.norm() / scale);
      }
    }
  }
  return worst;
}

std::vector<double> moutard_complete(const QuadricNet& net, const std::vector<double>& f,
                                     const std::vector<double>& fi, const std::vector<double>& fj,
                                     double tol) {
  double den = net.kappa - net.inner(fi, fj);
  if (std::abs(den) <= tol * std::max(1.0, std::abs(net.kappa)))
    fail(Err::Degenerate, "kappa - <f_i, f_j> vanishes");
  std::vector<double> diff(fi.size()), fij(fi.size());
  for (size_t k = 0; k < fi.size(); ++k) diff[k] = fi[k] - fj[k];
  double coeff = net.inner(f, diff) / den;
  double diag = 0;
  for (size_t k = 0; k < fi.size(); ++k) {
    fij[k] = f[k] + coeff * (fj[k] - fi[k]);
    diag += (fij[k] - f[k]) * (fij[k] - f[k]);
  }
  if (std::sqrt(diag) <= tol) fail(Err::Degenerate, "vanishing quad diagonal");
  return fij;
}

EdgeNet edge_reduction(const QuadricNet& net, double tol) {
  EdgeNet out(net.box);
  for (int d = 0; d < net.box.dim(); ++d) {
    for (long ei = 0; ei < net.box.edge_count(d); ++ei) {
      std::vector<int> x = net.box.edge_coords(d, ei);
      std::vector<int> xd = x;
      xd[d] += 1;
      out.set(d, x, Value(net.vec_at(xd) - net.vec_at(x)));
    }
  }
  lattice::QuadResidual r = lattice::max_quad_residual(out);
  if (r.max() > std::sqrt(tol))
    fail(Err::Degenerate, "edge reduction violates the quad equations, residual " +
                              std::to_string(r.max()));
  return out;
}

EdgeNet product_reduction(const QuadricNet& net, double tol) {
  EdgeNet out(net.box);
  for (int d = 0; d < net.box.dim(); ++d) {
    for (long ei = 0; ei < net.box.edge_count(d); ++ei) {
      std::vector<int> x = net.box.edge_coords(d, ei);
      std::vector<int> xd = x;
      xd[d] += 1;
      out.set(d, x, Value(net.vec_at(xd) * net.vec_at(x)));
    }
  }
  lattice::QuadResidual r = lattice::max_quad_residual(out);
  if (r.max() > std::sqrt(tol))
    fail(Err::Degenerate, "product reduction violates the quad equations, residual " +
                              std::to_string(r.max()));
  return out;
}

MoutardFamily moutard_family(const QuadricNet& net, const lax::SpectralPath& path, double t,
                             double tol) {
  if (std::abs(net.kappa) <= tol) fail(Err::Validation, "family needs kappa != 0");
  EdgeNet p = product_reduction(net, tol);
  Value one = Value(Clifford::scalar(net.p, net.q, 1.0));
  lax::Frame fr = lax::propagate_frame(p, path, t, one, tol);

  MoutardFamily fam;
  fam.net.p = net.p;
  fam.net.q = net.q;
  fam.net.kappa = net.kappa;
  fam.net.box = net.box;
  fam.net.f.resize(net.box.vertex_count());
  for (long vi = 0; vi < net.box.vertex_count(); ++vi) {
    std::vector<int> x = net.box.vertex_coords(vi);
    Value ft = fr.phi_inv[vi] * Value(net.vec_at(x)) * fr.phi[vi];
    const Clifford& c = ft.cliff();
    double leak = (c - c.grade(1)).norm();
    fam.grade_dev = std::max(fam.grade_dev, leak / std::max(1.0, c.norm()));
    fam.net.f[vi] = c.vector_part();
  }
  if (fam.grade_dev > 1e-6)
    fail(Err::GradeViolation, "family member is not grade 1, deviation " +
                                  std::to_string(fam.grade_dev));

  // q_t^i = (f_t)_i f_t should equal r + s p_t^i with the closed-form constants
  Scalar lam = path.lambda(t), mu = path.mu(t), dlam = path.dlambda(t), dmu = path.dmu(t);
  double w = (dlam * mu - lam * dmu).real();
  double k2 = net.kappa * net.kappa;
  fam.r = (lam.real() * dlam.real() - mu.real() * dmu.real() * k2) / w;
  fam.s = (mu.real() * mu.real() * k2 - lam.real() * lam.real()) / w;
  EdgeNet pt = lax::associated_edges(p, fr, tol);
  EdgeNet qt = product_reduction(fam.net, tol);
  double dev = 0;
  qt.for_each_edge([&](int d, const std::vector<int>& x, const Value& qv) {
    Value expect = algebra::shift(Scalar(fam.r), algebra::scale(Scalar(fam.s), pt.at(d, x)));
    dev = std::max(dev, (qv - expect).norm() / std::max(1.0, qv.norm()));
  });
  fam.identity_dev = dev;
  return fam;
}

namespace {

QuadricNet random_moutard_attempt(int p, int q, double kappa, const std::vector<int>& extents,
                                  std::uint64_t seed, double tol) {
  QuadricNet net;
  net.p = p;
  net.q = q;
  net.kappa = kappa;
  net.box = LatticeBox(extents);
  net.f.assign(net.box.vertex_count(), {});

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int dim = p + q;

  // axis curves are orbits of small random isometries of the quadric:
  // R = exp(g W) with W antisymmetric satisfies R^T g R = g, so the axes stay
  // in the quadric with bounded, well separated steps
  using Matrix = std::vector<std::vector<double>>;
  auto random_isometry = [&](double eps) {
    Matrix a(dim, std::vector<double>(dim, 0.0));
    double fro = 0;
    for (int r = 0; r < dim; ++r)
      for (int c = r + 1; c < dim; ++c) {
        double w = gauss(rng);
        // indefinite rows act as boosts; keep them small
        double damp = (r >= p || c >= p) ? 0.3 : 1.0;
        a[r][c] = (r < p ? 1.0 : -1.0) * w * damp;
        a[c][r] = (c < p ? -1.0 : 1.0) * w * damp;
        fro += 2 * w * w * damp * damp;
      }
    // fixed generator norm: the truncated exponential stays exact to well
    // below roundoff and the steps have a predictable size
    double scale = eps / std::max(1e-9, std::sqrt(fro));
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) a[r][c] *= scale;
    Matrix expm(dim, std::vector<double>(dim, 0.0)), term = expm;
    for (int r = 0; r < dim; ++r) expm[r][r] = term[r][r] = 1.0;
    for (int k = 1; k <= 24; ++k) {
      Matrix next(dim, std::vector<double>(dim, 0.0));
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
          double acc = 0;
          for (int m = 0; m < dim; ++m) acc += term[r][m] * a[m][c];
          next[r][c] = acc / k;
        }
      term = next;
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) expm[r][c] += term[r][c];
    }
    return expm;
  };
  auto apply = [&](const Matrix& m, const std::vector<double>& v) {
    std::vector<double> out(dim, 0.0);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) out[r] += m[r][c] * v[c];
    return out;
  };

  // damp the coordinates whose metric sign opposes kappa, so the seed lands
  // on the right side of the cone
  std::vector<double> f0(dim, 0.0);
  for (int k = 0; k < dim; ++k)
    f0[k] = gauss(rng) * (((k < p) == (kappa > 0)) ? 1.0 : 0.25);
  {
    double n = 0;
    for (int k = 0; k < dim; ++k) n += (k < p ? 1.0 : -1.0) * f0[k] * f0[k];
    if (n * kappa <= 1e-3) fail(Err::Degenerate, "seed point off the quadric cone");
    double s = std::sqrt(kappa / n);
    for (double& c : f0) c *= s;
  }

  std::vector<int> origin(net.box.dim(), 0);
  net.f[net.box.vertex_index(origin)] = f0;
  for (int d = 0; d < net.box.dim(); ++d) {
    Matrix rot = random_isometry(1.0 + 0.25 * d);
    std::vector<int> x = origin;
    std::vector<double> cur = f0;
    for (int k = 1; k <= extents[d]; ++k) {
      cur = apply(rot, cur);
      x[d] = k;
      std::vector<double> prev = net.f[net.box.vertex_index([&] {
        std::vector<int> pv = x;
        pv[d] = k - 1;
        return pv;
      }())];
      double sep = 0;
      for (int c = 0; c < dim; ++c) sep += (cur[c] - prev[c]) * (cur[c] - prev[c]);
      if (sep < 2.5e-3) fail(Err::Degenerate, "axis step too small");
      net.f[net.box.vertex_index(x)] = cur;
    }
  }
  // bulk by Moutard completion, lexicographic; magnitudes are capped and
  // degenerate quads rejected so the absolute residuals of downstream
  // computations stay meaningful
  double cap = 100.0 * std::max(1.0, std::abs(kappa));
  for (long vi = 0; vi < net.box.vertex_count(); ++vi) {
    std::vector<int> x = net.box.vertex_coords(vi);
    for (int i = 0; i < net.box.dim(); ++i) {
      if (x[i] >= extents[i]) continue;
      for (int j = i + 1; j < net.box.dim(); ++j) {
        if (x[j] >= extents[j]) continue;
        std::vector<int> xi = x, xj = x, xij = x;
        xi[i] += 1;
        xj[j] += 1;
        xij[i] += 1;
        xij[j] += 1;
        long ti = net.box.vertex_index(xij);
        if (!net.f[ti].empty()) continue;
        net.f[ti] = moutard_complete(net, net.at(x), net.at(xi), net.at(xj), tol);
        double n2 = 0, diag = 0, diag2 = 0;
        for (int c = 0; c < dim; ++c) {
          n2 += net.f[ti][c] * net.f[ti][c];
          double dd = net.f[ti][c] - net.f[net.box.vertex_index(x)][c];
          double d2 = net.at(xj)[c] - net.at(xi)[c];
          diag += dd * dd;
          diag2 += d2 * d2;
        }
        if (n2 > cap || diag < 2.5e-3 || diag2 < 2.5e-3)
          fail(Err::Degenerate, "completion left the bounded regime");
      }
    }
  }
  // edge separation: near-coincident neighbours make the product-reduction
  // Lax factors nearly singular along parts of the spectral path
  for (int d = 0; d < net.box.dim(); ++d) {
    for (long ei = 0; ei < net.box.edge_count(d); ++ei) {
      std::vector<int> x = net.box.edge_coords(d, ei), xd = x;
      xd[d] += 1;
      if (net.inner(net.at(x), net.at(xd)) > 0.95 * std::abs(kappa))
        fail(Err::Degenerate, "edge too close to its base point");
    }
  }
  return net;
}

}  // namespace

QuadricNet random_moutard_net(int p, int q, double kappa, const std::vector<int>& extents,
                              std::uint64_t seed, double tol) {
  if (std::abs(kappa) <= tol) fail(Err::Validation, "kappa must be nonzero");
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      return random_moutard_attempt(p, q, kappa, extents, seed + 7919 * attempt, tol);
    } catch (const Error& e) {
      if (e.kind() != Err::Degenerate) throw;
    }
  }
  fail(Err::Degenerate, "no bounded Moutard net found for this seed");
}

}  // namespace skewnet::moutard
