#include "skewnet/lax.hpp"

#include <cmath>

namespace skewnet::lax {

using algebra::Mat2;
using algebra::Quaternion;
using algebra::Tag;
using algebra::cross;
using algebra::dot;

SpectralPath SpectralPath::linear() {
  return {[](double t) { return Scalar(t); }, [](double) { return Scalar(1); },
          [](double) { return Scalar(1); }, [](double) { return Scalar(0); }, true};
}

SpectralPath SpectralPath::exponential() {
  return {[](double t) { return Scalar(std::exp(t)); }, [](double t) { return Scalar(std::exp(-t)); },
          [](double t) { return Scalar(std::exp(t)); },
          [](double t) { return Scalar(-std::exp(-t)); }, true};
}

SpectralPath SpectralPath::trig() {
  return {[](double t) { return Scalar(std::cos(t)); }, [](double t) { return Scalar(std::sin(t)); },
          [](double t) { return Scalar(-std::sin(t)); },
          [](double t) { return Scalar(std::cos(t)); }, true};
}

SpectralPath SpectralPath::unit_circle() {
  const Scalar iu(0, 1);
  return {[](double t) { return std::exp(Scalar(0, t)); },
          [](double t) { return std::exp(Scalar(0, -t)); },
          [iu](double t) { return iu * std::exp(Scalar(0, t)); },
          [iu](double t) { return -iu * std::exp(Scalar(0, -t)); }, false};
}

Scalar SpectralPath::wronskian(double t) const {
  return dlambda(t) * mu(t) - lambda(t) * dmu(t);
}

Value lax_matrix(const Value& pi, Scalar lambda, Scalar mu) {
  return algebra::shift(lambda, algebra::scale(mu, pi));
}

Frame propagate_frame(const EdgeNet& p, const SpectralPath& path, double t, const Value& phi0,
                      double tol) {
  lattice::QuadResidual qr = lattice::max_quad_residual(p);
  if (qr.max() > std::sqrt(tol))
    fail(Err::Incompatible, "net violates the quad equations, residual " + std::to_string(qr.max()));
  if (std::abs(path.wronskian(t)) <= tol)
    fail(Err::Degenerate, "spectral path has lambda' mu - lambda mu' = 0");

  Frame fr;
  fr.box = p.box();
  fr.t = t;
  fr.lambda = path.lambda(t);
  fr.mu = path.mu(t);
  fr.dlambda = path.dlambda(t);
  fr.dmu = path.dmu(t);
  fr.phi.assign(fr.box.vertex_count(), phi0.zero());
  fr.dphi.assign(fr.box.vertex_count(), phi0.zero());
  fr.phi_inv.assign(fr.box.vertex_count(), phi0.zero());

  std::vector<int> origin(fr.box.dim(), 0);
  long oi = fr.box.vertex_index(origin);
  fr.phi[oi] = phi0;
  try {
    fr.phi_inv[oi] = algebra::inverse(phi0, tol);
  } catch (const Error&) {
    fail(Err::FrameSingular, "initial frame value not invertible");
  }
  std::vector<char> done(fr.box.vertex_count(), 0);
  done[oi] = 1;

  for (long vi = 0; vi < fr.box.vertex_count(); ++vi) {
    std::vector<int> x = fr.box.vertex_coords(vi);
    if (!done[vi]) fail(Err::MissingEdge, "frame propagation hit a gap");
    for (int d = 0; d < fr.box.dim(); ++d) {
      if (x[d] >= fr.box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      long ti = fr.box.vertex_index(xd);
      if (done[ti]) continue;
      const Value& edge = p.at(d, x);
      Value P = lax_matrix(edge, fr.lambda, fr.mu);
      Value dP = lax_matrix(edge, fr.dlambda, fr.dmu);
      fr.phi[ti] = P * fr.phi[vi];
      fr.dphi[ti] = P * fr.dphi[vi] + dP * fr.phi[vi];
      try {
        fr.phi_inv[ti] = fr.phi_inv[vi] * algebra::inverse(P, tol);
      } catch (const Error&) {
        fail(Err::FrameSingular, "frame not invertible at a vertex");
      }
      done[ti] = 1;
    }
  }
  return fr;
}

EdgeNet associated_edges(const EdgeNet& p, const Frame& frame, double tol) {
  (void)tol;
  EdgeNet out(p.box());
  p.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    std::vector<int> xd = x;
    xd[d] += 1;
    Value dP = lax_matrix(v, frame.dlambda, frame.dmu);
    out.set(d, x, frame.inv_at(xd) * dP * frame.at(x));
  });
  return out;
}

VertexNet sym_points(const Frame& frame, double tol) {
  (void)tol;
  VertexNet f(frame.box);
  for (long vi = 0; vi < frame.box.vertex_count(); ++vi) {
    std::vector<int> x = frame.box.vertex_coords(vi);
    f.set(x, frame.phi_inv[vi] * frame.dphi[vi]);
  }
  return f;
}

FoldingReport classify_folding(const EdgeNet& p, double tol) {
  FoldingReport rep;
  bool any = false;
  p.for_each_edge([&](int, const std::vector<int>&, const Value& v) {
    any = true;
    rep.dev_zero = std::max(rep.dev_zero, std::abs(v.trace_invariant()));
    rep.dev_equal = std::max(rep.dev_equal, std::abs(v.det_invariant() - Scalar(1)));
  });
  if (!any) fail(Err::MissingEdge, "empty net");
  rep.zero_folded = rep.dev_zero <= tol;
  rep.equally_folded = rep.dev_equal <= tol;
  return rep;
}

FamilyMember unfold_zero_folded(const EdgeNet& p, double t, double tol) {
  FoldingReport rep = classify_folding(p, std::sqrt(tol));
  if (!rep.zero_folded)
    fail(Err::NotZeroFolded, "net has tr p^i deviation " + std::to_string(rep.dev_zero));
  SpectralPath path = SpectralPath::exponential();
  Frame fr = propagate_frame(p, path, t, p.first_edge().one(), tol);
  FamilyMember member;
  member.t = t;
  member.p = associated_edges(p, fr, tol);
  member.f = sym_points(fr, tol);
  return member;
}

FoldingParameter folding_parameter(const Quaternion& f, const Quaternion& fi, const Quaternion& fj,
                                   const Quaternion& fij, double tol) {
  Quaternion pi = (fi - f).vec();
  Quaternion pj = (fj - f).vec();
  Quaternion qi = (fij - f).vec();  // diagonal to the far vertex
  if (pi.norm() <= tol || pj.norm() <= tol)
    fail(Err::Degenerate, "folding parameter needs nonzero edges");

  // dihedral angle at edge (f, f_i): faces (f, f_i, f_j) and (f, f_i, f_ij)
  auto sin_dihedral = [&](const Quaternion& edge, const Quaternion& r1, const Quaternion& r2,
                          double& sinv) {
    Quaternion n1 = cross(edge, r1);
    Quaternion n2 = cross(edge, r2);
    double s = n1.norm() * n2.norm();
    if (s <= tol * tol) return false;
    sinv = cross(n1, n2).norm() / s;
    return true;
  };

  double sin_i = 0, sin_j = 0;
  bool ok_i = sin_dihedral(pi, pj, qi, sin_i);
  bool ok_j = sin_dihedral(pj, pi, qi, sin_j);
  if (!ok_i || !ok_j) fail(Err::Degenerate, "flat triangle in the quad tetrahedron");

  FoldingParameter out;
  double si = sin_i / pi.norm();
  double sj = sin_j / pj.norm();
  out.sigma = si;
  out.mismatch = std::abs(si - sj);
  out.planar = std::abs(sin_i) <= 1e-8 && std::abs(sin_j) <= 1e-8;
  return out;
}

EdgeNet gauge_linear_lax(const EdgeNet& A, const EdgeNet& B, double tol) {
  const LatticeBox& box = A.box();
  // Psi at (lambda, mu) = (1, 0) solves Psi_i = A^i Psi; G = Psi^{-1}.
  VertexNet G(box);
  std::vector<int> origin(box.dim(), 0);
  G.set(origin, A.first_edge().one());
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    for (int d = 0; d < box.dim(); ++d) {
      if (x[d] >= box.extents()[d]) continue;
      std::vector<int> xd = x;
      xd[d] += 1;
      if (!G.has(xd)) G.set(xd, G.at(x) * algebra::inverse(A.at(d, x), tol));
    }
  }
  EdgeNet p(box);
  A.for_each_edge([&](int d, const std::vector<int>& x, const Value& a) {
    p.set(d, x, G.at(x) * algebra::inverse(a, tol) * B.at(d, x) * algebra::inverse(G.at(x), tol));
  });
  return p;
}

namespace {

Mat2 as_mat(const Value& v) {
  if (v.tag() == Tag::Mat) return v.mat();
  if (v.tag() == Tag::Quat) return algebra::quat_to_mat2(v.quat());
  fail(Err::AlgebraMismatch, "matrix or quaternion net expected");
}

}  // namespace

EdgeNet normalize_primary(const EdgeNet& p, double tol) {
  // trace-free parts
  EdgeNet hat(p.box());
  p.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    Mat2 m = as_mat(v);
    hat.set(d, x, Value(m - (0.5 * m.trace()) * algebra::mat2_identity()));
  });
  // global scale from the first edge with a usable trace-free part
  Scalar scale_det(0);
  hat.for_each_edge([&](int, const std::vector<int>&, const Value& v) {
    if (scale_det == Scalar(0) && v.norm() > tol && std::abs(v.mat().det()) > tol)
      scale_det = v.mat().det();
  });
  if (std::abs(scale_det) <= tol)
    fail(Err::Degenerate, "no edge with invertible trace-free part, no canonical form");
  Scalar s = 1.0 / std::sqrt(scale_det);
  EdgeNet out = lattice::scale_net(hat, s);
  // global sign from the first sizable entry of the first edge
  const Mat2 m = out.first_edge().mat();
  for (Scalar e : {m.b, m.c, m.a, m.d}) {
    if (std::abs(e) > tol) {
      double lead = (std::abs(e.real()) >= std::abs(e.imag())) ? e.real() : e.imag();
      if (lead < 0) out = lattice::scale_net(out, Scalar(-1));
      break;
    }
  }
  return out;
}

double net_distance(const EdgeNet& a, const EdgeNet& b) {
  double worst = 0, scale = 0;
  a.for_each_edge([&](int d, const std::vector<int>& x, const Value& v) {
    scale = std::max(scale, v.norm());
    worst = std::max(worst, (v - b.at(d, x)).norm());
  });
  return worst / std::max(1.0, scale);
}

}  // namespace skewnet::lax
