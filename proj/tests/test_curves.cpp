#include <doctest.h>

#include <cmath>

#include "skewnet/curves.hpp"
#include "test_support.hpp"

using namespace skewnet;
using namespace skewnet::algebra;
using namespace skewnet::curves;
using testsup::Rng;

namespace {

DiscreteCurve straight_line(int n) {
  DiscreteCurve c;
  c.edges.assign(n, quat_i());
  return c;
}

DiscreteCurve random_curve(Rng& rng, int n) {
  DiscreteCurve c;
  Quaternion prev{};
  for (int k = 0; k < n; ++k) {
    Quaternion u = rng.unit_imaginary();
    while ((u + prev).norm() < 0.3) u = rng.unit_imaginary();
    c.edges.push_back(u);
    prev = u;
  }
  return c;
}

// 4x4 complex representation of [[A, B], [-B, A]] for an independent product
// check of compose_chain
struct Mat4 {
  std::array<std::array<Scalar, 4>, 4> m{};
};

Mat4 to_mat4(const ABMatrix& ab) {
  Mat2 A = quat_to_mat2(ab.A), B = quat_to_mat2(ab.B), nB = quat_to_mat2(-ab.B);
  Mat4 r;
  auto put = [&](int bi, int bj, const Mat2& blk) {
    r.m[2 * bi][2 * bj] = blk.a;
    r.m[2 * bi][2 * bj + 1] = blk.b;
    r.m[2 * bi + 1][2 * bj] = blk.c;
    r.m[2 * bi + 1][2 * bj + 1] = blk.d;
  };
  put(0, 0, A);
  put(0, 1, B);
  put(1, 0, nB);
  put(1, 1, A);
  return r;
}

Mat4 mul(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Scalar acc = 0;
      for (int k = 0; k < 4; ++k) acc += a.m[i][k] * b.m[k][j];
      r.m[i][j] = acc;
    }
  return r;
}

double dist4(const Mat4& a, const Mat4& b) {
  double d = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d = std::max(d, std::abs(a.m[i][j] - b.m[i][j]));
  return d;
}

}  // namespace

TEST_CASE("backlund_map") {
  // real v acts as the identity
  Quaternion u = Quaternion{0, 0, 1, 0};
  CHECK((backlund_map(quat_scalar(3), u) - u).norm() <= 1e-14);
  // fixed point of T_{2k}
  CHECK((backlund_map(2.0 * quat_k(), quat_k()) - quat_k()).norm() <= 1e-14);
  // v = j + 2 on u = i: unit imaginary output, the quad closes with the
  // induced v shift
  Quaternion v{2, 0, 1, 0};
  Quaternion ut = backlund_map(v, quat_i());
  CHECK(std::abs(ut.norm() - 1.0) <= 1e-14);
  CHECK(std::abs(ut.re()) <= 1e-14);
  Quaternion vt = v + ut - quat_i();
  lattice::QuadResidual r =
      lattice::quad_residual(Value(quat_i()), Value(v), Value(ut), Value(vt));
  CHECK(r.max() <= 1e-14);

  CHECK_THROWS_AS((void)backlund_map(quat_k(), quat_i()), Error);  // v on S^2
}

TEST_CASE("backlund_curve propagates labels") {
  // straight line with v0 = 2k
  BacklundResult r = backlund_curve(straight_line(10), 2.0 * quat_k());
  for (const Quaternion& v : r.v) {
    CHECK(std::abs(v.norm() - 2.0) <= 1e-12);
    CHECK(std::abs(v.re()) <= 1e-12);
  }
  r.curve.validate();

  // real v0: identity transformation, translated curve
  Rng rng(51);
  DiscreteCurve c = random_curve(rng, 12);
  BacklundResult ident = backlund_curve(c, quat_scalar(0.7));
  for (size_t k = 0; k < c.edges.size(); ++k)
    CHECK((ident.curve.edges[k] - c.edges[k]).norm() <= 1e-13);

  // random curve: norm and real part of v are constant along the curve
  Quaternion v0 = rng.off_sphere();
  BacklundResult rr = backlund_curve(c, v0, /*anchor=*/5);
  for (const Quaternion& v : rr.v) {
    CHECK(std::abs(v.norm() - v0.norm()) <= 1e-10);
    CHECK(std::abs(v.re() - v0.re()) <= 1e-10);
  }
  rr.curve.validate();
  // backward propagation closes the same quads the forward recursion defines
  for (size_t k = 0; k + 1 < rr.v.size(); ++k) {
    Quaternion forward = rr.v[k] + backlund_map(rr.v[k], c.edges[k]) - c.edges[k];
    CHECK((rr.v[k + 1] - forward).norm() <= 1e-10);
  }
}

TEST_CASE("compose_chain matches the block-matrix product") {
  ABMatrix empty = compose_chain(quat_scalar(2), {});
  CHECK((empty.A - quat_scalar(2)).norm() <= 1e-14);
  CHECK(empty.B.norm() <= 1e-14);

  ABMatrix tv = compose_chain(quat_scalar(1), {2.0 * quat_k()});
  CHECK((tv.A - 2.0 * quat_k()).norm() <= 1e-14);
  CHECK((tv.B - quat_scalar(1)).norm() <= 1e-14);

  Rng rng(52);
  for (int it = 0; it < 30; ++it) {
    Quaternion v = rng.off_sphere(), w = rng.off_sphere();
    ABMatrix chain = compose_chain(quat_scalar(1), {v, w});
    Mat4 oracle = mul(to_mat4(ABMatrix{w, quat_scalar(1)}), to_mat4(ABMatrix{v, quat_scalar(1)}));
    CHECK(dist4(to_mat4(chain), oracle) <= 1e-12);
  }
}

TEST_CASE("fixed points") {
  // M from E = 1, vs = [2k]: det vec M = -4, fixed points +-k
  ABMatrix m = compose_chain(quat_scalar(1), {2.0 * quat_k()});
  CHECK(std::abs(m.det_vec() - Scalar(-4)) <= 1e-14);
  FixedPoints fp = fixed_points(m);
  CHECK(fp.alpha == doctest::Approx(0));
  CHECK(std::abs(fp.beta) == doctest::Approx(2));
  CHECK((fp.plus - quat_k()).norm() <= 1e-13);
  CHECK((fp.minus + quat_k()).norm() <= 1e-13);

  // pure rotation about i
  FixedPoints rot = fixed_points(ABMatrix{quat_i(), Quaternion{}});
  CHECK((rot.plus - quat_i()).norm() <= 1e-13);
  CHECK((rot.minus + quat_i()).norm() <= 1e-13);

  // random chains: outputs are genuine unit imaginary fixed points
  Rng rng(53);
  for (int it = 0; it < 50; ++it) {
    ABMatrix rm = compose_chain(rng.off_sphere(), {rng.off_sphere(), rng.off_sphere()});
    if (std::abs(rm.det_vec()) < 1e-3) continue;
    FixedPoints rfp = fixed_points(rm);
    for (const Quaternion& u : {rfp.plus, rfp.minus}) {
      CHECK(std::abs(u.norm() - 1.0) <= 1e-10);
      CHECK(std::abs(u.re()) <= 1e-10);
      CHECK((rm.apply(u) - u).norm() <= 1e-10);
    }
  }

  CHECK_THROWS_AS((void)fixed_points(ABMatrix{quat_scalar(1), Quaternion{}}), Error);
}

TEST_CASE("1-invariant curves are helices") {
  Quaternion E{1, 0, 0, 1};
  NInvariantResult r = ninvariant_construct(E, {Quaternion{2, 0, 1, 0}}, +1, 30);
  r.curve.validate();
  CHECK(r.invariance_residual <= 1e-10);

  // constant turning angle and constant angle against the rotation axis
  Quaternion axis = quat_k();
  double turn0 = dot(r.curve.edges[0], r.curve.edges[1]);
  double incl0 = dot(r.curve.edges[0], axis);
  for (size_t k = 0; k + 1 < r.curve.edges.size(); ++k) {
    CHECK(std::abs(dot(r.curve.edges[k], r.curve.edges[k + 1]) - turn0) <= 1e-9);
    CHECK(std::abs(dot(r.curve.edges[k], axis) - incl0) <= 1e-9);
  }

  // tr P and det P coefficients are constant along the curve
  auto [tr0, det0] = chain_invariants(E, r.vs.front());
  for (const auto& chain : r.vs) {
    auto [trk, detk] = chain_invariants(E, chain);
    for (size_t c = 0; c < tr0.size(); ++c) CHECK(std::abs(trk[c] - tr0[c]) <= 1e-9);
    for (size_t c = 0; c < det0.size(); ++c) CHECK(std::abs(detk[c] - det0[c]) <= 1e-9);
  }
}

TEST_CASE("planar reduction stays planar") {
  // odd n, all v in span(i, j), E in span(1, k), det vec M < 0
  std::vector<Quaternion> vs{Quaternion{0, 1.3, 0, 0}, Quaternion{0, 0.7, 0.9, 0},
                             Quaternion{0, 0, -1.1, 0}};
  Quaternion E{1, 0, 0, 0.4};
  ABMatrix m = compose_chain(E, vs);
  CHECK(std::abs(m.det_vec().imag()) <= 1e-12);
  REQUIRE(m.det_vec().real() < 0);
  NInvariantResult r = ninvariant_construct(E, vs, +1, 50);
  for (const Quaternion& u : r.curve.edges) CHECK(std::abs(u.z) <= 1e-10);
}

TEST_CASE("n-invariant curves keep their invariants") {
  Rng rng(54);
  for (int n : {3, 4}) {
    std::vector<Quaternion> vs;
    for (int l = 0; l < n; ++l) vs.push_back(rng.off_sphere());
    Quaternion E = rng.off_sphere();
    ABMatrix m = compose_chain(E, vs);
    if (std::abs(m.det_vec()) < 1e-3) continue;
    NInvariantResult r = ninvariant_construct(E, vs, +1, 50);
    r.curve.validate();
    CHECK(r.invariance_residual <= 1e-8);
    // branch discipline: consecutive edges are never antipodal
    for (size_t k = 0; k + 1 < r.curve.edges.size(); ++k)
      CHECK((r.curve.edges[k] + r.curve.edges[k + 1]).norm() > 1e-6);
    auto [tr0, det0] = chain_invariants(E, r.vs.front());
    for (const auto& chain : r.vs) {
      auto [trk, detk] = chain_invariants(E, chain);
      for (size_t c = 0; c < tr0.size(); ++c) CHECK(std::abs(trk[c] - tr0[c]) <= 1e-8);
      for (size_t c = 0; c < det0.size(); ++c) CHECK(std::abs(detk[c] - det0[c]) <= 1e-8);
    }
  }
}

TEST_CASE("elastic construction reproduces the hand-computed steps") {
  ElasticResult r = elastic_construct(quat_k(), quat_scalar(1), quat_i(), 3);
  CHECK((r.curve.edges[0] - quat_i()).norm() <= 1e-14);
  CHECK((r.bhat[1] - Quaternion{1, 0, -2, 0}).norm() <= 1e-14);
  // u(1) = hat B(1)^{-1} i hat B(1) = (-3i - 4k)/5
  Quaternion u1{0, -3.0 / 5, 0, -4.0 / 5};
  CHECK((r.curve.edges[1] - u1).norm() <= 1e-13);
  // hat B(2) = 1 - (4/5) j, u(2) = (-187 i + 84 k)/205
  CHECK((r.bhat[2] - Quaternion{1, 0, -4.0 / 5, 0}).norm() <= 1e-13);
  Quaternion u2{0, -187.0 / 205, 0, 84.0 / 205};
  CHECK((r.curve.edges[2] - u2).norm() <= 1e-13);

  // real E: hat B is constant; with vec(hat B) parallel to u0 the rod is a
  // straight line, otherwise a circle of constant turning angle
  ElasticResult line = elastic_construct(quat_scalar(1.5), Quaternion{1, 0, 0.2, 0},
                                         quat_j(), 10);
  for (size_t k = 1; k < line.curve.edges.size(); ++k)
    CHECK((line.curve.edges[k] - quat_j()).norm() <= 1e-13);
  ElasticResult circle = elastic_construct(quat_scalar(1.5), Quaternion{1, 0.2, 0, 0},
                                           quat_j(), 10);
  double turn = dot(circle.curve.edges[0], circle.curve.edges[1]);
  for (size_t k = 0; k + 1 < circle.curve.edges.size(); ++k) {
    CHECK((circle.bhat[k] - Quaternion{1, 0.2, 0, 0}).norm() <= 1e-13);
    CHECK(std::abs(dot(circle.curve.edges[k], circle.curve.edges[k + 1]) - turn) <= 1e-13);
  }

  // (Re(hat B u), Re(hat B)) = (0, 0) is rejected
  CHECK_THROWS_AS((void)elastic_construct(quat_k(), quat_j(), quat_i(), 5), Error);
}

TEST_CASE("alpha and beta are conserved along elastic rods") {
  Rng rng(55);
  for (int it = 0; it < 10; ++it) {
    Quaternion E = rng.quat(), b0 = rng.quat(), u0 = rng.unit_imaginary();
    double alpha = (b0 * u0).re(), beta = b0.re();
    if (std::hypot(alpha, beta) < 0.1 || E.norm() < 0.2 || b0.norm() < 0.2) continue;
    ElasticResult r = elastic_construct(E, b0, u0, 40);
    for (size_t k = 0; k < r.bhat.size(); ++k) {
      CHECK(std::abs((r.bhat[k] * r.curve.edges[k]).re() - alpha) <= 1e-9);
      CHECK(std::abs(r.bhat[k].re() - beta) <= 1e-9);
    }
  }
}

TEST_CASE("elastic_verify certifies constructed rods") {
  Rng rng(56);
  ElasticResult r = elastic_construct(Quaternion{0.3, 0.2, -0.4, 1.1},
                                      Quaternion{0.8, 0.5, -0.2, 0.6}, rng.unit_imaginary(), 60);
  ElasticVerification v = elastic_verify(r.curve);
  CHECK(v.residual <= 1e-8);
  // e is parallel to 4 vec E
  Quaternion e4 = 4.0 * r.E.vec();
  double cosang = dot(v.e, e4) / (v.e.norm() * e4.norm());
  CHECK(std::abs(std::abs(cosang) - 1.0) <= 1e-6);

  // straight line: residual 0 with e = 0 in the reported family
  ElasticVerification line = elastic_verify(straight_line(10));
  CHECK(line.residual <= 1e-10);
  CHECK(line.e.norm() <= 1e-8);

  // noise at 1e-3 is detected
  DiscreteCurve noisy = r.curve;
  for (size_t k = 0; k + 1 < noisy.edges.size(); ++k) {
    Quaternion bent = noisy.edges[k] + 1e-3 * rng.unit_imaginary();
    noisy.edges[k] = (1.0 / bent.vec().norm()) * bent.vec();
  }
  ElasticVerification nv = elastic_verify(noisy);
  CHECK(nv.residual > 1e-5);

  CHECK_THROWS_AS((void)elastic_verify(straight_line(3)), Error);
}

TEST_CASE("orthogonality for alpha = 0 rods") {
  // hat B0 = 1 + c j and u0 = i gives alpha = 0, beta = 1
  Quaternion b0{1, 0, 0.8, 0};
  ElasticResult r = elastic_construct(Quaternion{0.2, 0.3, 0.1, 0.9}, b0, quat_i(), 30);
  CHECK(std::abs((b0 * quat_i()).re()) <= 1e-14);
  for (size_t k = 1; k < r.bhat.size(); ++k) {
    Quaternion bvec = r.bhat[k].vec();
    Quaternion ahat = r.bhat[k] * r.curve.edges[k];
    CHECK(std::abs(dot(r.curve.edges[k - 1], bvec)) <= 1e-9 * bvec.norm());
    CHECK(std::abs(dot(r.curve.edges[k], bvec)) <= 1e-9 * bvec.norm());
    CHECK(std::abs(dot(ahat.vec(), bvec)) <= 1e-9 * bvec.norm());
  }
}

TEST_CASE("recover_backlund_pair maps the rod to its E-conjugate") {
  ElasticResult rod = elastic_construct(quat_k(), quat_scalar(1), quat_i(), 25);
  BacklundPair pair = recover_backlund_pair(rod, 1.0, 0.0);
  CHECK(pair.conjugacy_residual <= 1e-8);
  CHECK_FALSE(on_sphere(pair.v0));
  CHECK_FALSE(on_sphere(pair.v1));

  // straight line: E = i rotates about the line axis, hat B stays 1, and the
  // recovered pair maps the line to a translate of itself
  ElasticResult line = elastic_construct(quat_i(), quat_scalar(1), quat_i(), 12);
  for (const Quaternion& u : line.curve.edges) CHECK((u - quat_i()).norm() <= 1e-14);
  BacklundPair lp = recover_backlund_pair_auto(line, 3);
  CHECK(lp.conjugacy_residual <= 1e-8);

  // degenerate (a, b): det M = 0 for a = 0, b = 0 on this rod
  CHECK_THROWS_AS((void)recover_backlund_pair(rod, 0.0, 0.0), Error);
}

TEST_CASE("random rods recover their transformation pairs") {
  Rng rng(57);
  int done = 0;
  for (int it = 0; it < 12 && done < 6; ++it) {
    Quaternion E = rng.quat(), b0 = rng.quat(), u0 = rng.unit_imaginary();
    if (E.norm() < 0.3 || b0.norm() < 0.3) continue;
    if (std::hypot((b0 * u0).re(), b0.re()) < 0.15) continue;
    ElasticResult rod = elastic_construct(E, b0, u0, 30);
    BacklundPair pair = recover_backlund_pair_auto(rod, 17 + it);
    CHECK(pair.conjugacy_residual <= 1e-8);
    ++done;
  }
  CHECK(done >= 6);
}
