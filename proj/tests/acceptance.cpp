// Acceptance suite: one criterion per function, one pass/fail line each.
// Run via ctest or directly; exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "skewnet/curves.hpp"
#include "skewnet/json_io.hpp"
#include "skewnet/moutard.hpp"
#include "skewnet/surfaces.hpp"

using namespace skewnet;
using namespace skewnet::algebra;
using namespace skewnet::lattice;

namespace {

struct Criterion {
  int id;
  const char* name;
  std::function<double()> run;  // returns the worst observed residual
  double limit;
  double time_limit_s = 0;  // 0: no runtime requirement
};

std::mt19937_64 g_rng(20240815);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g_rng);
}

Quaternion random_quat() {
  return {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
}

Quaternion random_imaginary() { return {0, uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}; }

Quaternion random_unit_imaginary() {
  for (;;) {
    Quaternion q = random_imaginary();
    if (q.norm() > 0.2) return (1.0 / q.norm()) * q;
  }
}

Quaternion random_off_sphere() {
  for (;;) {
    Quaternion q = random_quat();
    if (q.norm() > 0.3 && std::abs(q.norm() - 1.0) > 0.15) return q;
  }
}

EdgeNet random_quat_net(int m, int n, bool imaginary) {
  for (;;) {
    try {
      std::vector<std::vector<Value>> axes(2);
      for (int k = 0; k < m; ++k)
        axes[0].push_back(Value(imaginary ? random_imaginary() : random_quat()));
      for (int k = 0; k < n; ++k)
        axes[1].push_back(Value(imaginary ? random_imaginary() : random_quat()));
      return fill_box(axes);
    } catch (const Error&) {
      // degenerate draw; retry
    }
  }
}

surfaces::CrossRatioLattice square_grid(int m, int n, Scalar a1, Scalar a2) {
  LatticeBox box({m, n});
  std::vector<Scalar> f(box.vertex_count());
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) f[box.vertex_index({i, j})] = Scalar(i, j);
  std::vector<std::vector<Scalar>> alpha{std::vector<Scalar>(m, a1), std::vector<Scalar>(n, a2)};
  return surfaces::make_cross_ratio_lattice(std::move(box), std::move(f), std::move(alpha));
}

// --------------------------------------------------------------------------
// 1. parallelogram core

double crit_parallelogram_core() {
  double worst = 0;
  EdgeNet net = random_quat_net(20, 20, false);
  worst = std::max(worst, max_quad_residual(net).max());
  for (int it = 0; it < 50; ++it) {
    std::vector<std::vector<Value>> axes(3);
    for (int d = 0; d < 3; ++d) axes[d] = {Value(random_quat())};
    EdgeNet cube = [&]() -> EdgeNet {
      try {
        return fill_box(axes);
      } catch (const Error&) {
        return EdgeNet{};
      }
    }();
    if (cube.box().dim() == 0) continue;
    // five faces are produced by the construction; the residual over all six
    // faces certifies the consistency of the sixth
    worst = std::max(worst, max_quad_residual(cube).max());
  }
  return worst;
}

// --------------------------------------------------------------------------
// 2. exact factorizations of the worked example polynomial

double crit_factor_example() {
  factor::MatPoly poly{{mat2_identity(), Mat2{0, 2, -2, 0}, Scalar(-2) * mat2_identity()}};
  factor::MatPoly rev = factor::reverse_neg(poly);
  double worst = 0;

  auto check_factor = [&](const Mat2& got, const Mat2& expect) {
    worst = std::max(worst, (got - expect).norm());
  };

  // quaternionic: conjugate pairing in canonical (sorted) order
  factor::RootPairing conj_pairs =
      factor::conjugate_pairing(factor::polynomial_roots(factor::det_poly(rev)));
  factor::FactorizationCube qcube = factor::factorize_cube(rev, conj_pairs);
  std::vector<int> pos{0, 0};
  check_factor(qcube.roots.at(0, pos).mat(), Mat2{-1, 1, -1, -1});
  pos[0] = 1;
  check_factor(qcube.roots.at(1, pos).mat(), Mat2{1, 1, -1, 1});
  worst = std::max(worst, qcube.path_residual);

  // zero-folded: explicit cross pairing
  factor::RootPairing cross{{Scalar(1, 1), Scalar(-1, -1)}, {Scalar(-1, 1), Scalar(1, -1)}};
  factor::FactorizationCube zcube = factor::factorize_cube(rev, cross);
  pos = {0, 0};
  check_factor(zcube.roots.at(0, pos).mat(), Mat2{0, Scalar(1, -1), Scalar(-1, 1), 0});
  pos[0] = 1;
  check_factor(zcube.roots.at(1, pos).mat(), Mat2{0, Scalar(1, 1), Scalar(-1, -1), 0});
  worst = std::max(worst, zcube.path_residual);
  return worst;
}

// --------------------------------------------------------------------------
// 3. degree-5 refactorization cube

double crit_cube_degree5() {
  for (;;) {
    std::vector<Quaternion> qs;
    for (int k = 0; k < 5; ++k) qs.push_back(random_quat());
    factor::MatPoly p{{mat2_identity()}};
    for (const Quaternion& q : qs) p = p * factor::mat_poly_linear(quat_to_mat2(q));
    std::vector<Scalar> roots = factor::polynomial_roots(factor::det_poly(p));
    double sep = 1e9;
    for (size_t a = 0; a < roots.size(); ++a)
      for (size_t b = a + 1; b < roots.size(); ++b)
        sep = std::min(sep, std::abs(roots[a] - roots[b]));
    if (sep < 0.05) continue;  // draw again: distinct roots required
    factor::RootPairing pairs = factor::conjugate_pairing(roots);
    factor::FactorizationCube cube = factor::factorize_cube(p, pairs);
    // both bounds are reported through one number: scale the quad residual
    // into the 1e-8 budget of the path bound
    return std::max(cube.path_residual, cube.quad_residual * 10.0);
  }
}

// --------------------------------------------------------------------------
// 4. right-factor uniqueness

double crit_right_factor() {
  double worst = 0;
  int done = 0;
  while (done < 1000) {
    Mat2 u0{Scalar(uniform(-1, 1), uniform(-1, 1)), Scalar(uniform(-1, 1), uniform(-1, 1)),
            Scalar(uniform(-1, 1), uniform(-1, 1)), Scalar(uniform(-1, 1), uniform(-1, 1))};
    Mat2 w0{Scalar(uniform(-1, 1), uniform(-1, 1)), Scalar(uniform(-1, 1), uniform(-1, 1)),
            Scalar(uniform(-1, 1), uniform(-1, 1)), Scalar(uniform(-1, 1), uniform(-1, 1))};
    factor::MatPoly p = factor::mat_poly_linear(u0) * factor::mat_poly_linear(w0);
    std::vector<Scalar> ev = factor::polynomial_roots(factor::det_poly(factor::mat_poly_linear(w0)));
    if (std::abs(ev[0] - ev[1]) < 0.2) continue;
    factor::RightFactor rf = [&]() {
      try {
        return factor::right_factor(p, ev[0], ev[1]);
      } catch (const Error&) {
        return factor::RightFactor{{}, Mat2{}, -1};
      }
    }();
    if (rf.residual < 0) continue;
    worst = std::max(worst, (rf.u - w0).norm() / std::max(1.0, w0.norm()));
    for (int c1 = 0; c1 < 2; ++c1) {
      for (int c2 = 0; c2 < 2; ++c2) {
        try {
          factor::RightFactor alt = factor::right_factor(p, ev[0], ev[1], kDefaultTol, c1, c2);
          worst = std::max(worst, (alt.u - rf.u).norm() / std::max(1.0, rf.u.norm()));
        } catch (const Error&) {
          // a vanishing adjugate column was forced; the free choice is tested
        }
      }
    }
    ++done;
  }
  return worst;
}

// --------------------------------------------------------------------------
// 5. curves: elastic rods and the n-invariant hierarchy

double crit_curves() {
  double worst = 0;
  int rods = 0;
  while (rods < 25) {
    Quaternion E = random_quat(), b0 = random_quat(), u0 = random_unit_imaginary();
    if (E.norm() < 0.3 || b0.norm() < 0.3) continue;
    if (std::hypot((b0 * u0).re(), b0.re()) < 0.15) continue;
    curves::ElasticResult rod = curves::elastic_construct(E, b0, u0, 100);
    // arc length and imaginarity
    for (const Quaternion& u : rod.curve.edges) {
      worst = std::max(worst, std::abs(u.norm() - 1.0) * 1e4);  // 1e-12 budget in 1e-8 units
      worst = std::max(worst, std::abs(u.re()) * 1e4);
    }
    worst = std::max(worst, curves::elastic_verify(rod.curve).residual);
    curves::BacklundPair pair = curves::recover_backlund_pair_auto(rod, 7 + rods);
    worst = std::max(worst, pair.conjugacy_residual);
    ++rods;
  }

  for (int n : {1, 3, 4}) {
    for (;;) {
      std::vector<Quaternion> vs;
      for (int l = 0; l < n; ++l) vs.push_back(random_off_sphere());
      Quaternion E = random_off_sphere();
      curves::ABMatrix m = curves::compose_chain(E, vs);
      if (std::abs(m.det_vec()) < 5e-2) continue;
      curves::NInvariantResult r = [&]() {
        try {
          return curves::ninvariant_construct(E, vs, +1, 50);
        } catch (const Error&) {
          return curves::NInvariantResult{{}, {}, {}, -1};
        }
      }();
      if (r.invariance_residual < 0) continue;
      auto [tr0, det0] = curves::chain_invariants(E, r.vs.front());
      for (const auto& chain : r.vs) {
        auto [trk, detk] = curves::chain_invariants(E, chain);
        for (size_t c = 0; c < tr0.size(); ++c)
          worst = std::max(worst, std::abs(trk[c] - tr0[c]));
        for (size_t c = 0; c < det0.size(); ++c)
          worst = std::max(worst, std::abs(detk[c] - det0[c]));
      }
      break;
    }
  }

  // planar reduction stays planar (1e-10 budget in the shared 1e-8 scale)
  std::vector<Quaternion> vs{Quaternion{0, 1.3, 0, 0}, Quaternion{0, 0.7, 0.9, 0},
                             Quaternion{0, 0, -1.1, 0}};
  curves::NInvariantResult planar =
      curves::ninvariant_construct(Quaternion{1, 0, 0, 0.4}, vs, +1, 50);
  for (const Quaternion& u : planar.curve.edges)
    worst = std::max(worst, std::abs(u.z) * 100.0);
  return worst;
}

// --------------------------------------------------------------------------
// 6. unfolding and the folding parameter

double crit_folding() {
  EdgeNet net = random_quat_net(5, 5, /*imaginary=*/true);
  double worst_det = 0, worst_sigma = 0;
  for (double t : {-1.0, -0.3, 0.5, 1.0}) {
    lax::FamilyMember member = lax::unfold_zero_folded(net, t);
    member.p.for_each_edge([&](int, const std::vector<int>&, const Value& v) {
      worst_det = std::max(worst_det, std::abs(v.det_invariant() - Scalar(1)));
    });
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        lax::FoldingParameter fp = lax::folding_parameter(
            member.f.at({i, j}).quat(), member.f.at({i + 1, j}).quat(),
            member.f.at({i, j + 1}).quat(), member.f.at({i + 1, j + 1}).quat());
        worst_sigma = std::max(worst_sigma, std::abs(std::abs(fp.sigma) - 1.0));
      }
    }
  }
  // det budget 1e-9, sigma budget 1e-8: report in the 1e-8 scale
  return std::max(worst_det * 10.0, worst_sigma);
}

// --------------------------------------------------------------------------
// 7. associated-family geometry

double crit_family_geometry() {
  EdgeNet net = random_quat_net(4, 4, false);
  double worst = 0;
  std::vector<std::vector<double>> ref_angles;
  for (double t : {-0.9, -0.6, -0.3, 0.1, 0.4, 0.8, 1.2, 1.6}) {
    lax::Frame fr = lax::propagate_frame(net, lax::SpectralPath::trig(), t,
                                         net.first_edge().one());
    EdgeNet member = lax::associated_edges(net, fr);
    std::vector<std::vector<double>> angles;
    for (int i = 1; i < 4; ++i) {
      for (int j = 1; j < 4; ++j) {
        std::vector<Quaternion> dirs;
        for (int d = 0; d < 2; ++d) {
          std::vector<int> out{i, j}, in{i, j};
          in[d] -= 1;
          Quaternion a = member.at(d, out).quat().vec();
          Quaternion b = member.at(d, in).quat().vec();
          dirs.push_back((1.0 / a.norm()) * a);
          dirs.push_back((-1.0 / b.norm()) * b);
        }
        std::vector<double> local;
        for (size_t a = 0; a < dirs.size(); ++a)
          for (size_t b = a + 1; b < dirs.size(); ++b) local.push_back(dot(dirs[a], dirs[b]));
        angles.push_back(std::move(local));
      }
    }
    // edge-length labels at this t
    for (int d = 0; d < 2; ++d) {
      for (long ei = 0; ei < member.box().edge_count(d); ++ei) {
        std::vector<int> x = member.box().edge_coords(d, ei);
        std::vector<int> ax(2, 0);
        ax[d] = x[d];
        worst = std::max(worst, std::abs(member.at(d, x).quat().vec().norm() -
                                         member.at(d, ax).quat().vec().norm()));
      }
    }
    if (ref_angles.empty()) {
      ref_angles = std::move(angles);
    } else {
      for (size_t v = 0; v < angles.size(); ++v)
        for (size_t k = 0; k < angles[v].size(); ++k)
          worst = std::max(worst, std::abs(angles[v][k] - ref_angles[v][k]));
    }
  }
  return worst;
}

// --------------------------------------------------------------------------
// 8. DPW pipeline

double crit_dpw() {
  double worst = 0;
  const Scalar I1(0, 1);

  // C+ from a 10x10 grid with unit labels; the frame
  // degenerates only at t in pi/4 + pi/2 Z, which the samples avoid
  surfaces::CrossRatioLattice pseed = square_grid(10, 10, 1, I1);
  surfaces::Lattice4D p4 = surfaces::extend_to_4d(pseed, surfaces::Mode4D::CPlus, {10, 10, 10, 10});
  surfaces::Lattice4D p4b = surfaces::extend_to_4d(pseed, surfaces::Mode4D::CPlus, {10, 10, 10, 10});
  for (size_t k = 0; k < p4.lat.s.size(); ++k)
    if (p4.lat.s[k] != p4b.lat.s[k] || p4.lat.f[k] != p4b.lat.f[k]) return 1.0;  // not bit-stable
  surfaces::ModeReport prep = surfaces::mode_invariants(p4);
  worst = std::max(worst, prep.reality_dev * 10.0);  // 1e-10 budget at the 1e-9 scale
  worst = std::max(worst, prep.dpw_dev);

  std::vector<Scalar> beta1 = surfaces::beta_branch(p4, 0);
  for (double tv : {0.3, 0.8, 1.9}) {
    Scalar lambda = std::exp(I1 * tv);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        surfaces::DiagLax L = surfaces::diagonal_lax(p4, i, j, 0);
        std::vector<int> x = p4.diag_vertex(i, j), xab = x;
        xab[0] += 1;
        xab[2] += 1;
        surfaces::DiagLax Lt =
            surfaces::cplus_gauge(L, beta1[i], p4.lat.s_at(x), p4.lat.s_at(xab));
        worst = std::max(worst, quaternion_pattern_residual(Lt.eval(lambda)));
      }
    }
  }

  // C- with alpha^1 = e^{i pi/4}
  surfaces::CrossRatioLattice mseed =
      square_grid(10, 10, std::exp(I1 * (M_PI / 4)), std::exp(I1 * (3 * M_PI / 4)));
  surfaces::Lattice4D m4 =
      surfaces::extend_to_4d(mseed, surfaces::Mode4D::CMinus, {10, 10, 10, 10});
  surfaces::ModeReport mrep = surfaces::mode_invariants(m4);
  worst = std::max(worst, mrep.reality_dev * 10.0);
  worst = std::max(worst, mrep.dpw_dev);
  for (double lv : {0.6, 1.0, 1.5}) {
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j <= 10; ++j)
        worst = std::max(worst, quaternion_pattern_residual(
                                    surfaces::diagonal_lax(m4, i, j, 0).eval(Scalar(lv))));
  }

  // extracted diagonal surfaces carry Chebyshev edge labels
  for (const surfaces::DiagonalSurface& surf :
       {surfaces::surface_extract(m4, 0.4), surfaces::surface_extract(p4, 0.25)}) {
    for (int i = 0; i < surf.m; ++i)
      for (int j = 0; j <= surf.n; ++j)
        worst = std::max(worst, std::abs(dist(surf.point(i, j), surf.point(i + 1, j)) -
                                         dist(surf.point(i, 0), surf.point(i + 1, 0))));
    for (int i = 0; i <= surf.m; ++i)
      for (int j = 0; j < surf.n; ++j)
        worst = std::max(worst, std::abs(dist(surf.point(i, j), surf.point(i, j + 1)) -
                                         dist(surf.point(0, j), surf.point(0, j + 1))));
  }
  return worst;
}

// --------------------------------------------------------------------------
// 9. breather dual factorization

double crit_breather_dual() {
  const Scalar I1(0, 1);
  surfaces::CrossRatioLattice seed =
      square_grid(6, 6, std::exp(I1 * (M_PI / 4)), std::exp(I1 * (3 * M_PI / 4)));
  surfaces::Lattice4D l4 = surfaces::extend_to_4d(seed, surfaces::Mode4D::CMinus, {6, 6, 6, 6});
  EdgeNet net = surfaces::cr_to_parallelogram(l4.lat);
  double worst = 0;
  for (int i = 1; i < 4; ++i) {
    std::vector<int> x = l4.diag_vertex(i, i), x1 = x;
    x1[0] += 1;
    Mat2 p1 = net.at(0, x).mat();
    Mat2 p31 = net.at(2, x1).mat();
    // cross-ratio splitting: N(nu) = (nu + p^3_1)(nu + p^1)
    factor::MatPoly cross =
        factor::mat_poly_linear(Mat2{} - p31) * factor::mat_poly_linear(Mat2{} - p1);
    std::vector<Quaternion> coeffs;
    for (const Mat2& c : cross.c) {
      if (quaternion_pattern_residual(c) > 1e-10) return 1.0;
      coeffs.push_back(mat2_to_quat(c));
    }
    // quaternionic splitting of the same polynomial
    factor::QuatFactorization qf = factor::factorize_quaternionic(coeffs);
    worst = std::max(worst, qf.residual);
    // cross-ratio splitting reconstructs trivially; re-multiply to confirm
    factor::MatPoly recon =
        factor::mat_poly_linear(Mat2{} - p31) * factor::mat_poly_linear(Mat2{} - p1);
    for (size_t k = 0; k < cross.c.size(); ++k)
      worst = std::max(worst, (recon.c[k] - cross.c[k]).norm());
  }
  return worst;
}

// --------------------------------------------------------------------------
// 10. Appendix A cube gauge on synthetic CMC data

double crit_cmc_cube() {
  const Scalar I1(0, 1);
  surfaces::CrossRatioLattice seed = square_grid(6, 6, 1.2, 1.2 * I1);
  surfaces::Lattice4D l4 = surfaces::extend_to_4d(seed, surfaces::Mode4D::CPlus, {6, 6, 6, 6});
  surfaces::CmcLaxData data = surfaces::cmc_data_from_cplus(l4);
  surfaces::CmcCubeResult cube =
      surfaces::cmc_cube_gauge(data, {0.5, 0.25, 0.75, 1.0, 1.3, 2.0});
  double worst = std::max({cube.form_residual, cube.quad_residual, cube.w_norm_dev});
  // zero-folded: all extracted edges imaginary
  EdgeNet net = surfaces::cmc_cube_net(cube);
  net.for_each_edge([&](int, const std::vector<int>&, const Value& v) {
    worst = std::max(worst, std::abs(v.quat().w));
  });
  return worst;
}

// --------------------------------------------------------------------------
// 11. Moutard families in quadrics

double crit_moutard() {
  double worst = 0;
  std::uint64_t seed = 3001;
  for (auto [p, q, kappa] : {std::tuple{3, 0, 1.0}, {3, 1, -1.0}, {4, 1, 1.0}}) {
    // The Lax factor lambda + mu f_i f has reversal scalar
    // 1 - sin(2t) <f_i, f>; draws with an inner product near 1/sin(2t) make
    // the frame (nearly) singular at a sampled t and are resampled.
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 32) return 1.0;
      moutard::QuadricNet net = moutard::random_moutard_net(p, q, kappa, {8, 8}, seed++);
      double worst_inner = -1e9;
      for (int d = 0; d < 2; ++d)
        for (long ei = 0; ei < net.box.edge_count(d); ++ei) {
          std::vector<int> x = net.box.edge_coords(d, ei), xd = x;
          xd[d] += 1;
          worst_inner = std::max(worst_inner, net.inner(net.at(x), net.at(xd)));
        }
      if (worst_inner > 0.97) continue;
      try {
        double local = 0;
        for (double t : {0.2, 0.5, 0.9, 1.3}) {
          moutard::MoutardFamily fam = moutard::moutard_family(net, lax::SpectralPath::trig(), t);
          local = std::max(local, fam.net.quadric_residual());
          local = std::max(local, fam.net.moutard_residual());
          local = std::max(local, fam.identity_dev);
        }
        worst = std::max(worst, local);
        break;
      } catch (const Error& e) {
        if (e.kind() != Err::FrameSingular && e.kind() != Err::NotInvertible) throw;
      }
    }
  }
  return worst;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "parallelogram core (20x20 fill + 50 consistency cubes)", crit_parallelogram_core,
       1e-9, 1.0},
      {2, "exact factorizations of the worked example", crit_factor_example, 1e-9},
      {3, "degree-5 refactorization cube, 120 paths", crit_cube_degree5, 1e-8, 5.0},
      {4, "right-factor uniqueness, 1000 instances", crit_right_factor, 1e-9},
      {5, "elastic rods and n-invariant curves", crit_curves, 1e-8},
      {6, "unfolding: det 1 and |sigma| = 1", crit_folding, 1e-8},
      {7, "associated-family vertex stars and labels", crit_family_geometry, 1e-9},
      {8, "DPW pipeline (C+ and C- from 10x10 seeds)", crit_dpw, 1e-9, 10.0},
      {9, "breather polynomial dual factorization", crit_breather_dual, 1e-8},
      {10, "CMC cube gauge on synthetic data", crit_cmc_cube, 1e-8},
      {11, "Moutard families in quadrics", crit_moutard, 1e-9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    double residual;
    bool threw = false;
    std::string what;
    try {
      residual = c.run();
    } catch (const std::exception& e) {
      threw = true;
      what = e.what();
      residual = 1e300;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = !threw && residual <= c.limit && (c.time_limit_s == 0 || secs <= c.time_limit_s);
    if (!ok) ++failures;
    if (threw) {
      std::printf("[FAIL] %2d: %s — threw %s\n", c.id, c.name, what.c_str());
    } else {
      std::printf("[%s] %2d: %s — residual %.3g (limit %.1g)%s in %.2f s\n",
                  ok ? "PASS" : "FAIL", c.id, c.name, residual, c.limit,
                  (c.time_limit_s > 0 && secs > c.time_limit_s) ? " TIME LIMIT EXCEEDED" : "",
                  secs);
    }
  }
  if (failures) std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
