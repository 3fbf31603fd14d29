#include "skewnet/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skewnet::factor {

using algebra::Value;
using algebra::adjugate;
using algebra::mat2_identity;
using algebra::quat_to_mat2;

// ---------------------------------------------------------------------------
// Scalar polynomials

CPoly trim(CPoly p, double tol) {
  double scale = 0;
  for (Scalar c : p) scale = std::max(scale, std::abs(c));
  while (!p.empty() && std::abs(p.back()) <= tol * std::max(1.0, scale)) p.pop_back();
  return p;
}

int degree(const CPoly& p, double tol) { return int(trim(p, tol).size()) - 1; }

CPoly poly_add(const CPoly& a, const CPoly& b) {
  CPoly r(std::max(a.size(), b.size()), Scalar(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

CPoly poly_mul(const CPoly& a, const CPoly& b) {
  if (a.empty() || b.empty()) return {};
  CPoly r(a.size() + b.size() - 1, Scalar(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

CPoly poly_deriv(const CPoly& p) {
  CPoly r;
  for (size_t i = 1; i < p.size(); ++i) r.push_back(double(i) * p[i]);
  return r;
}

Scalar poly_eval(const CPoly& p, Scalar z) {
  Scalar acc(0);
  for (size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

CPoly to_cpoly(const RPoly& p) {
  CPoly r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[i] = Scalar(p[i]);
  return r;
}

std::vector<Scalar> polynomial_roots(const CPoly& poly, double tol) {
  CPoly p = trim(poly);
  if (p.empty()) fail(Err::ZeroPolynomial, "all coefficients vanish");
  int n = int(p.size()) - 1;
  if (n == 0) return {};
  if (n == 1) return {-p[0] / p[1]};

  // Aberth-Ehrlich simultaneous iteration, Cauchy-bound initialization.
  double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(p[i] / p[n]));
  double radius = 1.0 + bound;
  std::vector<Scalar> z(n);
  for (int k = 0; k < n; ++k) {
    double angle = 2.0 * M_PI * k / n + 0.4;
    z[k] = radius * std::exp(Scalar(0, angle)) * (0.5 + 0.5 * (k + 1.0) / n);
  }
  CPoly dp = poly_deriv(p);
  const int max_iter = 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    double worst = 0;
    for (int k = 0; k < n; ++k) {
      Scalar pv = poly_eval(p, z[k]);
      Scalar dv = poly_eval(dp, z[k]);
      Scalar ratio = (std::abs(dv) > 0) ? pv / dv : pv;
      Scalar sum(0);
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      Scalar w = ratio / (1.0 - ratio * sum);
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-14) break;
  }
  for (int k = 0; k < n; ++k) {  // one Newton polish
    Scalar dv = poly_eval(dp, z[k]);
    if (std::abs(dv) > 0) z[k] -= poly_eval(p, z[k]) / dv;
  }
  // residual check against the requested tolerance
  double scale = 0;
  for (Scalar c : p) scale = std::max(scale, std::abs(c));
  for (int k = 0; k < n; ++k) {
    double zb = std::max(1.0, std::abs(z[k]));
    double res = std::abs(poly_eval(p, z[k])) / (scale * std::pow(zb, n));
    if (res > std::sqrt(tol))
      fail(Err::ZeroPolynomial, "root finder failed to converge, residual " + std::to_string(res));
  }
  std::sort(z.begin(), z.end(), [](Scalar a, Scalar b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return z;
}

namespace {

RPoly rtrim(RPoly p, double tol, double scale) {
  while (!p.empty() && std::abs(p.back()) <= tol * std::max(1.0, scale)) p.pop_back();
  return p;
}

// remainder of a by b (b monic-normalized internally)
RPoly rpoly_mod(RPoly a, const RPoly& b) {
  int db = int(b.size()) - 1;
  double lead = b.back();
  while (int(a.size()) - 1 >= db) {
    double f = a.back() / lead;
    int shift = int(a.size()) - 1 - db;
    for (int i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
    a.pop_back();
  }
  return a;
}

RPoly monic(RPoly p) {
  if (p.empty()) return p;
  double lead = p.back();
  for (double& c : p) c /= lead;
  return p;
}

}  // namespace

RPoly rpoly_divide(const RPoly& p, const RPoly& g) {
  RPoly rem = p;
  int dg = int(g.size()) - 1;
  int dq = int(p.size()) - 1 - dg;
  if (dq < 0) return {};
  RPoly q(dq + 1, 0.0);
  for (int k = dq; k >= 0; --k) {
    double f = rem[k + dg] / g.back();
    q[k] = f;
    for (int i = 0; i <= dg; ++i) rem[k + i] -= f * g[i];
  }
  return q;
}

RPoly gcd_real_polys(const std::vector<RPoly>& ps, double tol) {
  double scale = 0;
  for (const RPoly& p : ps)
    for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0) fail(Err::AllZero, "all polynomials vanish");

  RPoly g;
  for (RPoly p : ps) {
    p = rtrim(std::move(p), tol, scale);
    if (p.empty()) continue;
    if (g.empty()) {
      g = monic(std::move(p));
      continue;
    }
    RPoly a = g, b = monic(std::move(p));
    while (!b.empty()) {
      double local = 0;
      for (double c : a) local = std::max(local, std::abs(c));
      for (double c : b) local = std::max(local, std::abs(c));
      RPoly r = rtrim(rpoly_mod(a, b), tol, local);
      a = std::move(b);
      b = r.empty() ? std::move(r) : monic(std::move(r));
    }
    g = std::move(a);
    if (int(g.size()) == 1) return {1.0};
  }
  return g.empty() ? RPoly{1.0} : g;
}

// ---------------------------------------------------------------------------
// MatPoly

Mat2 MatPoly::eval(Scalar mu) const {
  Mat2 acc{};
  for (size_t i = c.size(); i-- > 0;) acc = mu * acc + c[i];
  return acc;
}

Mat2 MatPoly::eval_right(const Mat2& u) const {
  Mat2 acc{};
  Mat2 upow = mat2_identity();
  for (size_t i = 0; i < c.size(); ++i) {
    acc = acc + c[i] * upow;
    upow = upow * u;
  }
  return acc;
}

double MatPoly::norm() const {
  double s = 0;
  for (const Mat2& m : c) s = std::max(s, m.norm());
  return s;
}

MatPoly MatPoly::trimmed(double tol) const {
  MatPoly r = *this;
  double s = norm();
  while (!r.c.empty() && r.c.back().norm() <= tol * std::max(1.0, s)) r.c.pop_back();
  return r;
}

MatPoly operator*(const MatPoly& a, const MatPoly& b) {
  if (a.c.empty() || b.c.empty()) return {};
  MatPoly r;
  r.c.assign(a.c.size() + b.c.size() - 1, Mat2{});
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
  return r;
}

MatPoly operator*(const Mat2& a, const MatPoly& b) {
  MatPoly r = b;
  for (Mat2& m : r.c) m = a * m;
  return r;
}

MatPoly mat_poly_linear(const Mat2& u) { return {{-u, mat2_identity()}}; }

MatPoly reverse_neg(const MatPoly& p) {
  int n = p.deg();
  MatPoly r;
  r.c.resize(p.c.size());
  for (int k = 0; k <= n; ++k) {
    double sign = ((n - k) % 2) ? -1.0 : 1.0;
    r.c[k] = sign * Scalar(1) * p.c[n - k];
  }
  return r;
}

namespace {

std::array<CPoly, 4> entry_polys(const MatPoly& p) {
  std::array<CPoly, 4> e;
  for (auto& q : e) q.resize(p.c.size(), Scalar(0));
  for (size_t k = 0; k < p.c.size(); ++k) {
    e[0][k] = p.c[k].a;
    e[1][k] = p.c[k].b;
    e[2][k] = p.c[k].c;
    e[3][k] = p.c[k].d;
  }
  return e;
}

}  // namespace

CPoly det_poly(const MatPoly& p) {
  auto e = entry_polys(p);
  CPoly ad = poly_mul(e[0], e[3]);
  CPoly bc = poly_mul(e[1], e[2]);
  for (Scalar& c : bc) c = -c;
  return poly_add(ad, bc);
}

CPoly trace_poly(const MatPoly& p) {
  auto e = entry_polys(p);
  return poly_add(e[0], e[3]);
}

MatPoly quat_poly_to_mat(const std::vector<Quaternion>& coeffs) {
  MatPoly r;
  for (const Quaternion& q : coeffs) r.c.push_back(quat_to_mat2(q));
  return r;
}

// ---------------------------------------------------------------------------
// Right factors

namespace {

void require_root(const MatPoly& p, const CPoly& dp, Scalar mu, double tol) {
  double scale = 0;
  for (Scalar c : dp) scale = std::max(scale, std::abs(c));
  double zb = std::pow(std::max(1.0, std::abs(mu)), std::max(1, int(dp.size()) - 1));
  double res = std::abs(poly_eval(dp, mu)) / std::max(1e-300, scale * zb);
  if (res > std::sqrt(tol))
    fail(Err::NotARoot, "mu is not a root of det P, residual " + std::to_string(res));
  (void)p;
}

// column of the adjugate spanning ker P(mu); empty-norm result means P(mu)=0
std::pair<std::array<Scalar, 2>, std::array<Scalar, 2>> adj_columns(const Mat2& m) {
  Mat2 a = adjugate(m);
  return {{a.a, a.c}, {a.b, a.d}};
}

double col_norm(const std::array<Scalar, 2>& c) { return std::hypot(std::abs(c[0]), std::abs(c[1])); }

}  // namespace

bool independent(const MatPoly& p, Scalar mu1, Scalar mu2, double tol) {
  CPoly dp = det_poly(p);
  require_root(p, dp, mu1, tol);
  require_root(p, dp, mu2, tol);
  double scale = std::max(1.0, p.norm());
  for (Scalar mu : {mu1, mu2}) {
    Mat2 m = p.eval(mu);
    auto [c1, c2] = adj_columns(m);
    // adj = 0 <=> P(mu) = 0: scalar root, dependent on every other root
    if (std::max(col_norm(c1), col_norm(c2)) <= tol * scale * scale) return false;
  }
  auto pick = [&](Scalar mu) {
    auto [c1, c2] = adj_columns(p.eval(mu));
    return (col_norm(c1) >= col_norm(c2)) ? c1 : c2;
  };
  auto y1 = pick(mu1);
  auto y2 = pick(mu2);
  Scalar det = y1[0] * y2[1] - y1[1] * y2[0];
  return std::abs(det) > 1e-8 * col_norm(y1) * col_norm(y2);
}

RightFactor right_factor(const MatPoly& p, Scalar mu1, Scalar mu2, double tol, int force_col1,
                         int force_col2) {
  CPoly dp = det_poly(p);
  require_root(p, dp, mu1, tol);
  require_root(p, dp, mu2, tol);
  double scale = std::max(1.0, p.norm());

  auto pick = [&](Scalar mu, int force) -> std::array<Scalar, 2> {
    auto [c1, c2] = adj_columns(p.eval(mu));
    if (std::max(col_norm(c1), col_norm(c2)) <= tol * scale * scale)
      fail(Err::DegenerateColumns, "adjugate columns vanish: scalar root");
    if (force == 0) return c1;
    if (force == 1) return c2;
    return (col_norm(c1) >= col_norm(c2)) ? c1 : c2;
  };
  auto y1 = pick(mu1, force_col1);
  auto y2 = pick(mu2, force_col2);
  if (col_norm(y1) <= tol * scale || col_norm(y2) <= tol * scale)
    fail(Err::DegenerateColumns, "chosen adjugate column vanishes");
  Mat2 Y{y1[0], y2[0], y1[1], y2[1]};
  if (std::abs(Y.det()) <= 1e-8 * col_norm(y1) * col_norm(y2))
    fail(Err::NotIndependent, "kernels of P(mu1) and P(mu2) intersect");
  Mat2 D{mu1, 0, 0, mu2};
  Mat2 u = Y * D * algebra::inverse(Y, tol);

  // divide P = Q (mu - u)
  int n = p.deg();
  if (n < 1) fail(Err::Validation, "cannot extract a factor from a constant");
  RightFactor rf;
  rf.u = u;
  rf.quotient.c.assign(n, Mat2{});
  rf.quotient.c[n - 1] = p.c[n];
  for (int i = n - 1; i >= 1; --i) rf.quotient.c[i - 1] = p.c[i] + rf.quotient.c[i] * u;
  Mat2 rem = p.c[0] + rf.quotient.c[0] * u;
  rf.residual = rem.norm() / std::max(1.0, p.norm());
  if (rf.residual > std::sqrt(tol))
    fail(Err::NotIndependent, "right-factor division left remainder " + std::to_string(rf.residual));
  return rf;
}

// ---------------------------------------------------------------------------
// Quaternionic factorization

std::vector<Quaternion> quat_poly_mul(const std::vector<Quaternion>& a,
                                      const std::vector<Quaternion>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Quaternion> r(a.size() + b.size() - 1, Quaternion{});
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  return r;
}

std::vector<Quaternion> reverse_neg(const std::vector<Quaternion>& p) {
  int n = int(p.size()) - 1;
  std::vector<Quaternion> r(p.size());
  for (int k = 0; k <= n; ++k) r[k] = (((n - k) % 2) ? -1.0 : 1.0) * p[n - k];
  return r;
}

RootPairing conjugate_pairing(const std::vector<Scalar>& roots, double tol) {
  std::vector<Scalar> upper, lower;
  for (Scalar r : roots) {
    if (r.imag() > tol)
      upper.push_back(r);
    else if (r.imag() < -tol)
      lower.push_back(r);
    else
      fail(Err::Degenerate, "real determinant root: no conjugate pairing");
  }
  if (upper.size() != lower.size())
    fail(Err::Degenerate, "determinant roots do not split into conjugate pairs");
  RootPairing pairs;
  std::vector<char> used(lower.size(), 0);
  for (Scalar up : upper) {
    int best = -1;
    double bestd = 0;
    for (size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(lower[j] - std::conj(up));
      if (best < 0 || d < bestd) {
        best = int(j);
        bestd = d;
      }
    }
    used[best] = 1;
    pairs.emplace_back(up, lower[best]);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  });
  return pairs;
}

namespace {

struct QuatComponents {
  RPoly a, b, c, d;  // P = a 1 + b i + c j + d k
};

QuatComponents components(const std::vector<Quaternion>& p) {
  QuatComponents q;
  for (const Quaternion& coeff : p) {
    q.a.push_back(coeff.w);
    q.b.push_back(coeff.x);
    q.c.push_back(coeff.y);
    q.d.push_back(coeff.z);
  }
  return q;
}

// quaternionic eigenvector basis: the first column of adj P(mu0) paired with
// the second column of adj P(conj mu0), or the second paired with minus the
// first; both candidates land in the quaternion pattern and one is nonzero
// unless mu0 is a scalar root
Mat2 quaternion_basis(const MatPoly& pm, Scalar mu0, double scale, double tol) {
  Mat2 a0 = adjugate(pm.eval(mu0));
  Mat2 a1 = adjugate(pm.eval(std::conj(mu0)));
  Mat2 y1{a0.a, a1.b, a0.c, a1.d};
  Mat2 y2{a0.b, -a1.a, a0.d, -a1.c};
  Mat2 y = (y1.norm() >= y2.norm()) ? y1 : y2;
  if (y.norm() <= tol * std::max(1.0, scale))
    fail(Err::DegenerateColumns, "both adjugate columns vanish: scalar root remains");
  if (algebra::quaternion_pattern_residual(y) > 1e-8)
    fail(Err::Degenerate, "adjugate basis is not quaternionic; coefficients not quaternionic");
  return y;
}

std::vector<Quaternion> divide_right(const std::vector<Quaternion>& p, const Quaternion& u,
                                     double& residual) {
  int n = int(p.size()) - 1;
  std::vector<Quaternion> q(n, Quaternion{});
  q[n - 1] = p[n];
  for (int i = n - 1; i >= 1; --i) q[i - 1] = p[i] + q[i] * u;
  Quaternion rem = p[0] + q[0] * u;
  double scale = 0;
  for (const Quaternion& c : p) scale = std::max(scale, c.norm());
  residual = rem.norm() / std::max(1.0, scale);
  return q;
}

}  // namespace

QuatFactorization factorize_quaternionic(const std::vector<Quaternion>& coeffs, double tol) {
  QuatFactorization out;
  std::vector<Quaternion> work = coeffs;
  while (!work.empty() && work.back().norm() <= 1e-12) work.pop_back();
  if (work.empty()) fail(Err::ZeroPolynomial, "zero polynomial");

  QuatComponents comp = components(work);
  out.real_factor = gcd_real_polys({comp.a, comp.b, comp.c, comp.d});
  if (out.real_factor.size() > 1) {
    std::vector<Quaternion> reduced(work.size() - out.real_factor.size() + 1);
    RPoly qa = rpoly_divide(comp.a, out.real_factor);
    RPoly qb = rpoly_divide(comp.b, out.real_factor);
    RPoly qc = rpoly_divide(comp.c, out.real_factor);
    RPoly qd = rpoly_divide(comp.d, out.real_factor);
    for (size_t k = 0; k < reduced.size(); ++k) {
      auto get = [&](const RPoly& p) { return k < p.size() ? p[k] : 0.0; };
      reduced[k] = Quaternion{get(qa), get(qb), get(qc), get(qd)};
    }
    work = std::move(reduced);
  }

  // pair the remaining determinant roots by conjugation and peel factors
  while (work.size() > 1) {
    MatPoly pm = quat_poly_to_mat(work);
    CPoly dp = det_poly(pm);
    std::vector<Scalar> roots = polynomial_roots(dp, tol);
    RootPairing pairs = conjugate_pairing(roots, 1e-7);
    Scalar mu0 = pairs.front().first;
    double scale = 0;
    for (const Quaternion& c : work) scale = std::max(scale, c.norm());
    Mat2 y = quaternion_basis(pm, mu0, scale, tol);
    Mat2 D{mu0, 0, 0, std::conj(mu0)};
    Mat2 umat = y * D * algebra::inverse(y, tol);
    if (algebra::quaternion_pattern_residual(umat) > 1e-8)
      fail(Err::Degenerate, "extracted factor is not quaternionic");
    Quaternion u = algebra::mat2_to_quat(umat);
    double res = 0;
    work = divide_right(work, u, res);
    out.residual = std::max(out.residual, res);
    out.roots.push_back(u);
  }
  out.leading = work.front();

  // reconstruction residual
  std::vector<Quaternion> recon{out.leading};
  for (size_t k = out.roots.size(); k-- > 0;)
    recon = quat_poly_mul(recon, {-out.roots[k], Quaternion{1, 0, 0, 0}});
  std::vector<Quaternion> rf;
  for (double c : out.real_factor) rf.push_back(Quaternion{c, 0, 0, 0});
  std::vector<Quaternion> full = quat_poly_mul(recon, rf);
  double scale = 0, dev = 0;
  for (const Quaternion& c : coeffs) scale = std::max(scale, c.norm());
  for (size_t k = 0; k < coeffs.size(); ++k) {
    Quaternion fk = k < full.size() ? full[k] : Quaternion{};
    dev = std::max(dev, (coeffs[k] - fk).norm());
  }
  out.residual = std::max(out.residual, dev / std::max(1.0, scale));
  return out;
}

UnitFactorization factorize_unit_quaternionic(const std::vector<Quaternion>& coeffs, double tol) {
  QuatFactorization qf = factorize_quaternionic(reverse_neg(coeffs), tol);
  UnitFactorization out;
  out.leading = qf.leading;
  out.vs = qf.roots;
  out.real_factor = qf.real_factor;
  out.residual = qf.residual;
  return out;
}

// ---------------------------------------------------------------------------
// Cubes

FactorizationCube factorize_cube(const MatPoly& p, const RootPairing& pairing, double tol) {
  MatPoly poly = p.trimmed();
  int n = poly.deg();
  if (n < 1) fail(Err::Validation, "constant polynomial");
  if (int(pairing.size()) != n) fail(Err::Validation, "pairing must list one pair per degree");

  lattice::LatticeBox box(std::vector<int>(n, 1));
  lattice::EdgeNet cube(box);

  // staircase extraction in pairing order
  MatPoly cur = poly;
  std::vector<int> x(n, 0);
  for (int k = 0; k < n; ++k) {
    RightFactor rf = right_factor(cur, pairing[k].first, pairing[k].second, tol);
    cube.set(k, x, Value(rf.u));
    cur = rf.quotient;
    x[k] = 1;
  }
  Mat2 leading = cur.c.at(0);

  // complete the cube from the staircase
  bool changed = true;
  while (changed && !cube.complete()) {
    changed = false;
    for (long vi = 0; vi < box.vertex_count(); ++vi) {
      std::vector<int> base = box.vertex_coords(vi);
      for (int i = 0; i < n; ++i) {
        if (base[i] >= 1) continue;
        for (int j = i + 1; j < n; ++j) {
          if (base[j] >= 1) continue;
          std::vector<int> bi = base, bj = base;
          bi[i] = 1;
          bj[j] = 1;
          bool h_i = cube.has(i, base), h_j = cube.has(j, base);
          bool h_ij = cube.has(i, bj), h_ji = cube.has(j, bi);
          if (h_i && h_j && h_ij && h_ji) continue;
          try {
            if (h_i && h_j) {
              auto [pij, pji] = lattice::evolve_quad(cube.at(i, base), cube.at(j, base), tol);
              if (!h_ij) cube.set(i, bj, pij);
              if (!h_ji) cube.set(j, bi, pji);
              changed = true;
            } else if (h_ij && h_ji) {
              auto [pi, pj] = lattice::evolve_backward(cube.at(i, bj), cube.at(j, bi), tol);
              if (!h_i) cube.set(i, base, pi);
              if (!h_j) cube.set(j, base, pj);
              changed = true;
            } else if (h_j && h_ij) {
              auto [pi, pji] = lattice::evolve_sideways(cube.at(j, base), cube.at(i, bj), tol);
              if (!h_i) cube.set(i, base, pi);
              if (!h_ji) cube.set(j, bi, pji);
              changed = true;
            } else if (h_i && h_ji) {
              auto [pj, pij] = lattice::evolve_sideways_mirror(cube.at(i, base), cube.at(j, bi), tol);
              if (!h_j) cube.set(j, base, pj);
              if (!h_ij) cube.set(i, bj, pij);
              changed = true;
            }
          } catch (const Error& e) {
            if (e.kind() != Err::NotEvolvable) throw;
            fail(Err::NotIndependent, std::string("cube quad not evolvable: ") + e.what());
          }
        }
      }
    }
  }
  if (!cube.complete()) fail(Err::NotIndependent, "cube could not be completed");

  FactorizationCube out;
  out.quad_residual = lattice::max_quad_residual(cube).max();

  // verify all monotone path products
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double scale = std::max(1.0, poly.norm());
  do {
    MatPoly prod{{mat2_identity()}};
    std::vector<int> pos(n, 0);
    for (int step = 0; step < n; ++step) {
      int d = perm[step];
      prod = mat_poly_linear(cube.at(d, pos).mat()) * prod;
      pos[d] = 1;
    }
    prod = leading * prod;
    double dev = 0;
    for (int k = 0; k <= n; ++k) dev = std::max(dev, (prod.c[k] - poly.c[k]).norm());
    out.path_residual = std::max(out.path_residual, dev / scale);
  } while (std::next_permutation(perm.begin(), perm.end()));

  out.roots = std::move(cube);
  out.leading = leading;
  return out;
}

}  // namespace skewnet::factor
