#include <doctest.h>

#include <cmath>

#include "skewnet/lax.hpp"
#include "test_support.hpp"

using namespace skewnet;
using namespace skewnet::algebra;
using namespace skewnet::lattice;
using namespace skewnet::lax;
using testsup::Rng;

namespace {

EdgeNet random_quat_net(Rng& rng, int m, int n, bool imaginary = false) {
  std::vector<std::vector<Value>> axes(2);
  for (int k = 0; k < m; ++k)
    axes[0].push_back(Value(imaginary ? rng.quat().vec() : rng.quat()));
  for (int k = 0; k < n; ++k)
    axes[1].push_back(Value(imaginary ? rng.quat().vec() : rng.quat()));
  return fill_box(axes);
}

EdgeNet scalar_zero_net(int m, int n) {
  EdgeNet net{LatticeBox({m, n})};
  for (int d = 0; d < 2; ++d)
    for (long ei = 0; ei < net.box().edge_count(d); ++ei)
      net.set(d, net.box().edge_coords(d, ei), Value(Quaternion{}));
  return net;
}

}  // namespace

TEST_CASE("lax_matrix basics and compatibility on a quad") {
  CHECK((lax_matrix(Value(quat_k()), 1, 0) - Value(quat_scalar(1))).norm() == doctest::Approx(0));
  CHECK((lax_matrix(Value(quat_i()), 0, 1) - Value(quat_i())).norm() == doctest::Approx(0));

  // P^j_i P^i = P^i_j P^j on (i, j, -j, -i) at (lambda, mu) = (2, 3)
  Value pi{quat_i()}, pj{quat_j()}, pij{-quat_j()}, pji{-quat_i()};
  Value lhs = lax_matrix(pji, 2, 3) * lax_matrix(pi, 2, 3);
  Value rhs = lax_matrix(pij, 2, 3) * lax_matrix(pj, 2, 3);
  CHECK((lhs - rhs).norm() <= 1e-14);
}

TEST_CASE("frame on the zero net is t^{|x|}") {
  EdgeNet net = scalar_zero_net(2, 2);
  double t = 1.7;
  Frame fr = propagate_frame(net, SpectralPath::linear(), t, Value(quat_scalar(1)));
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      int s = a + b;
      CHECK((fr.at({a, b}).quat() - quat_scalar(std::pow(t, s))).norm() <= 1e-12);
      CHECK((fr.deriv_at({a, b}).quat() - quat_scalar(s * std::pow(t, s - 1))).norm() <= 1e-12);
    }
  }
  // Sym: f_t(x) = |x| / t
  VertexNet f = sym_points(fr);
  CHECK((f.at({2, 1}).quat() - quat_scalar(3.0 / t)).norm() <= 1e-12);
}

TEST_CASE("frame at a mu-zero of the path is lambda^{|x|}") {
  Rng rng(31);
  EdgeNet net = random_quat_net(rng, 2, 2);
  // (cos t, sin t) has mu = 0 at t = 0
  Frame fr = propagate_frame(net, SpectralPath::trig(), 0.0, net.first_edge().one());
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      CHECK((fr.at({a, b}).quat() - quat_scalar(1.0)).norm() <= 1e-14);

  // there the family member is (lambda'/lambda) + (mu'/lambda) p = p
  EdgeNet member = associated_edges(net, fr);
  net.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    CHECK((member.at(d, x) - v).norm() <= 1e-12);
  });
}

TEST_CASE("frame derivative matches finite differences") {
  Rng rng(30);
  EdgeNet net = random_quat_net(rng, 2, 2);
  double t = 0.6, h = 1e-6;
  Frame mid = propagate_frame(net, SpectralPath::trig(), t, net.first_edge().one());
  Frame plus = propagate_frame(net, SpectralPath::trig(), t + h, net.first_edge().one());
  Frame minus = propagate_frame(net, SpectralPath::trig(), t - h, net.first_edge().one());
  for (long vi = 0; vi < mid.box.vertex_count(); ++vi) {
    Value fd = scale(Scalar(0.5 / h), plus.phi[vi] - minus.phi[vi]);
    CHECK((fd - mid.dphi[vi]).norm() <= 1e-8 * std::max(1.0, mid.dphi[vi].norm()));
  }
}

TEST_CASE("frame compatibility: both paths to the far corner agree") {
  Rng rng(32);
  EdgeNet net = random_quat_net(rng, 1, 1);
  Frame fr = propagate_frame(net, SpectralPath::trig(), 0.7, net.first_edge().one());
  Value via1 = lax_matrix(net.at(1, {1, 0}), fr.lambda, fr.mu) *
               lax_matrix(net.at(0, {0, 0}), fr.lambda, fr.mu);
  Value via2 = lax_matrix(net.at(0, {0, 1}), fr.lambda, fr.mu) *
               lax_matrix(net.at(1, {0, 0}), fr.lambda, fr.mu);
  CHECK((via1 - via2).norm() <= 1e-10 * std::max(1.0, via1.norm()));
  CHECK((fr.at({1, 1}) - via1 * fr.at({0, 0})).norm() <= 1e-12);
}

TEST_CASE("associated family members satisfy the quad equations") {
  Rng rng(33);
  EdgeNet net = random_quat_net(rng, 3, 3);
  for (double t : {-0.8, 0.3, 0.7, 1.4}) {
    Frame fr = propagate_frame(net, SpectralPath::trig(), t, net.first_edge().one());
    EdgeNet member = associated_edges(net, fr);
    CHECK(max_quad_residual(member).max() <= 1e-9);
    // Sym differences reproduce the member edges
    VertexNet f = sym_points(fr);
    member.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
      std::vector<int> xd = x;
      xd[d] += 1;
      CHECK((f.at(xd) - f.at(x) - v).norm() <= 1e-10 * std::max(1.0, v.norm()));
    });
  }
}

TEST_CASE("members with equal ratio are primarily equivalent") {
  Rng rng(34);
  EdgeNet net = random_quat_net(rng, 2, 3);
  double r = 1.9;
  Frame fa = propagate_frame(net, SpectralPath::linear(), r, net.first_edge().one());
  // exponential path: ratio lambda/mu = e^{2t} equals r at t = log(r)/2
  Frame fb =
      propagate_frame(net, SpectralPath::exponential(), 0.5 * std::log(r), net.first_edge().one());
  EdgeNet ma = associated_edges(net, fa);
  EdgeNet mb = associated_edges(net, fb);
  EdgeNet na = normalize_primary(ma);
  EdgeNet nb = normalize_primary(mb);
  CHECK(net_distance(na, nb) <= 1e-8);
}

TEST_CASE("vertex stars rotate rigidly through the family") {
  Rng rng(35);
  EdgeNet net = random_quat_net(rng, 2, 2);
  std::vector<int> x{1, 1};  // interior vertex

  auto star_angles = [&](const EdgeNet& p) {
    std::vector<Quaternion> dirs;
    for (int d = 0; d < 2; ++d) {
      std::vector<int> out = x, in = x;
      in[d] -= 1;
      Quaternion a = p.at(d, out).quat().vec();
      Quaternion b = p.at(d, in).quat().vec();
      dirs.push_back((1.0 / a.norm()) * a);
      dirs.push_back((-1.0 / b.norm()) * b);
    }
    std::vector<double> angles;
    for (size_t a = 0; a < dirs.size(); ++a)
      for (size_t b = a + 1; b < dirs.size(); ++b) angles.push_back(dot(dirs[a], dirs[b]));
    return angles;
  };

  std::vector<double> ref;
  for (double t : {0.1, 0.4, 0.9, 1.5}) {
    Frame fr = propagate_frame(net, SpectralPath::trig(), t, net.first_edge().one());
    EdgeNet member = associated_edges(net, fr);
    std::vector<double> angles = star_angles(member);
    if (ref.empty()) {
      ref = angles;
    } else {
      for (size_t k = 0; k < angles.size(); ++k) CHECK(std::abs(angles[k] - ref[k]) <= 1e-9);
    }
  }
}

TEST_CASE("classify_folding") {
  Rng rng(36);
  // unit imaginary edges: both zero-folded and equally folded
  EdgeNet unit{LatticeBox({2})};
  unit.set(0, {0}, Value(rng.unit_imaginary()));
  unit.set(0, {1}, Value(rng.unit_imaginary()));
  FoldingReport rep = classify_folding(unit);
  CHECK(rep.zero_folded);
  CHECK(rep.equally_folded);

  // scaled imaginary edges: zero-folded only
  EdgeNet two{LatticeBox({1})};
  two.set(0, {0}, Value(2.0 * quat_i()));
  rep = classify_folding(two);
  CHECK(rep.zero_folded);
  CHECK_FALSE(rep.equally_folded);

  // 1 + i has trace 2 and determinant 2: neither
  EdgeNet nei{LatticeBox({1})};
  nei.set(0, {0}, Value(Quaternion{1, 1, 0, 0}));
  rep = classify_folding(nei);
  CHECK_FALSE(rep.zero_folded);
  CHECK_FALSE(rep.equally_folded);
}

TEST_CASE("unfolding a zero-folded net gives det 1") {
  Rng rng(37);
  EdgeNet net = random_quat_net(rng, 3, 3, /*imaginary=*/true);
  CHECK(classify_folding(net).zero_folded);
  for (double t : {-0.5, 0.4, 0.8}) {
    FamilyMember member = unfold_zero_folded(net, t);
    FoldingReport rep = classify_folding(member.p, 1e-9);
    CHECK(rep.equally_folded);
    CHECK(rep.dev_equal <= 1e-9);
  }
  // at t = 0 the member of a unit-imaginary net is -p
  EdgeNet unit = [&] {
    std::vector<std::vector<Value>> axes(2);
    axes[0] = {Value(rng.unit_imaginary())};
    axes[1] = {Value(rng.unit_imaginary())};
    return fill_box(axes);
  }();
  FamilyMember at0 = unfold_zero_folded(unit, 0.0);
  unit.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    CHECK((at0.p.at(d, x) + v).norm() <= 1e-12);
  });

  EdgeNet notzf{LatticeBox({1})};
  notzf.set(0, {0}, Value(Quaternion{1, 1, 0, 0}));
  CHECK_THROWS_AS((void)unfold_zero_folded(notzf, 0.3), Error);
}

TEST_CASE("folding parameter") {
  // planar quad: sigma = 0 and the planar flag is set
  Quaternion f{}, fi{0, 1, 0, 0}, fj{0, 0, 1, 0}, fij{0, 1, 1, 0};
  FoldingParameter fp = folding_parameter(f, fi, fj, fij);
  CHECK(fp.planar);
  CHECK(std::abs(fp.sigma) <= 1e-8);

  // random skew parallelograms: both defining ratios agree
  Rng rng(38);
  int tested = 0;
  for (int it = 0; it < 80 && tested < 50; ++it) {
    Value pi{rng.quat()}, pj{rng.quat()};
    if ((pj - pi).norm() < 0.3) continue;
    auto [pij, pji] = evolve_quad(pi, pj);
    Quaternion g{};
    Quaternion gi = pi.quat().vec();
    Quaternion gj = pj.quat().vec();
    Quaternion gij = (pi.quat() + pji.quat()).vec();
    FoldingParameter p = [&]() {
      try {
        return folding_parameter(g, gi, gj, gij);
      } catch (const Error&) {
        return FoldingParameter{0, true, 0};
      }
    }();
    if (p.planar) continue;
    CHECK(p.mismatch <= 1e-10 * std::max(1.0, std::abs(p.sigma)));
    ++tested;
  }
  CHECK(tested >= 40);

  // equally folded quads have |sigma| = 1
  EdgeNet net = random_quat_net(rng, 2, 2, /*imaginary=*/true);
  FamilyMember member = unfold_zero_folded(net, 0.6);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      FoldingParameter p = folding_parameter(
          member.f.at({a, b}).quat(), member.f.at({a + 1, b}).quat(),
          member.f.at({a, b + 1}).quat(), member.f.at({a + 1, b + 1}).quat());
      CHECK(std::abs(std::abs(p.sigma) - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("gauge of a general linear representation") {
  Rng rng(39);
  EdgeNet p = random_quat_net(rng, 2, 2);
  // disguise p behind a vertex gauge H: A^i = H_i H^{-1}, B^i = H_i p^i H^{-1}
  VertexNet H(p.box());
  for (long vi = 0; vi < p.box().vertex_count(); ++vi)
    H.set(p.box().vertex_coords(vi), Value(rng.off_sphere()));
  H.set({0, 0}, p.first_edge().one());  // fixes the residual global conjugation
  EdgeNet A(p.box()), B(p.box());
  p.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    std::vector<int> xd = x;
    xd[d] += 1;
    Value hi = H.at(xd), hinv = algebra::inverse(H.at(x));
    A.set(d, x, hi * hinv);
    B.set(d, x, hi * v * hinv);
  });
  EdgeNet g = gauge_linear_lax(A, B);
  CHECK(net_distance(g, p) <= 1e-9);
  CHECK(max_quad_residual(g).max() <= 1e-9);
}

TEST_CASE("frame errors") {
  EdgeNet bad{LatticeBox({1, 1})};
  bad.set(0, {0, 0}, Value(quat_i()));
  bad.set(1, {0, 0}, Value(quat_j()));
  bad.set(0, {0, 1}, Value(quat_i()));
  bad.set(1, {1, 0}, Value(quat_j()));  // violates the multiplicative equation
  CHECK_THROWS_AS(
      (void)propagate_frame(bad, SpectralPath::linear(), 0.5, Value(quat_scalar(1))), Error);

  EdgeNet net{LatticeBox({1})};
  net.set(0, {0}, Value(quat_i()));
  CHECK_THROWS_AS(
      (void)propagate_frame(net, SpectralPath::linear(), 0.5, Value(Quaternion{})), Error);
}
