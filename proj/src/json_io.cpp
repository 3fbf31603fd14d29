#include "skewnet/json_io.hpp"

#include <fstream>

namespace skewnet::io {

using algebra::Clifford;
using algebra::Mat2;
using algebra::Quaternion;
using algebra::Value;

namespace {

json cplx(Scalar z) { return json::array({z.real(), z.imag()}); }

Scalar cplx_from(const json& j) {
  if (!j.is_array() || j.size() != 2) fail(Err::Validation, "complex scalar must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) fail(Err::Validation, std::string("missing field '") + name + "'");
  return *it;
}

}  // namespace

json value_to_json(const Value& v) {
  switch (v.tag()) {
    case algebra::Tag::Quat: {
      const Quaternion& q = v.quat();
      return {{"alg", "quat"}, {"w", q.w}, {"x", q.x}, {"y", q.y}, {"z", q.z}};
    }
    case algebra::Tag::Mat: {
      const Mat2& m = v.mat();
      return {{"alg", "mat2"}, {"a", cplx(m.a)}, {"b", cplx(m.b)}, {"c", cplx(m.c)},
              {"d", cplx(m.d)}};
    }
    case algebra::Tag::Cliff: {
      const Clifford& c = v.cliff();
      return {{"alg", "clifford"}, {"p", c.p()}, {"q", c.q()}, {"coeffs", c.coeffs()}};
    }
  }
  fail(Err::Validation, "corrupt value");
}

Value value_from_json(const json& j) {
  std::string alg = field(j, "alg").get<std::string>();
  if (alg == "quat") {
    return Value(Quaternion{field(j, "w").get<double>(), field(j, "x").get<double>(),
                            field(j, "y").get<double>(), field(j, "z").get<double>()});
  }
  if (alg == "mat2") {
    return Value(Mat2{cplx_from(field(j, "a")), cplx_from(field(j, "b")),
                      cplx_from(field(j, "c")), cplx_from(field(j, "d"))});
  }
  if (alg == "clifford") {
    return Value(Clifford(field(j, "p").get<int>(), field(j, "q").get<int>(),
                          field(j, "coeffs").get<std::vector<double>>()));
  }
  fail(Err::Validation, "unknown algebra tag '" + alg + "'");
}

json net_to_json(const lattice::EdgeNet& net) {
  const lattice::LatticeBox& box = net.box();
  json edges = json::object();
  std::string alg = "empty";
  for (int d = 0; d < box.dim(); ++d) {
    json arr = json::array();
    for (long ei = 0; ei < box.edge_count(d); ++ei) {
      std::vector<int> x = box.edge_coords(d, ei);
      if (net.has(d, x)) {
        json v = value_to_json(net.at(d, x));
        alg = v["alg"];
        arr.push_back(std::move(v));
      } else {
        arr.push_back(nullptr);
      }
    }
    edges[std::to_string(d + 1)] = std::move(arr);
  }
  return {{"dim", box.dim()}, {"extents", box.extents()}, {"algebra", alg},
          {"edges", std::move(edges)}};
}

lattice::EdgeNet net_from_json(const json& j) {
  int dim = field(j, "dim").get<int>();
  std::vector<int> extents = field(j, "extents").get<std::vector<int>>();
  if (int(extents.size()) != dim) fail(Err::Validation, "extents must list one entry per dimension");
  lattice::EdgeNet net{lattice::LatticeBox(extents)};
  const json& edges = field(j, "edges");
  for (int d = 0; d < dim; ++d) {
    auto it = edges.find(std::to_string(d + 1));
    if (it == edges.end()) continue;
    const json& arr = *it;
    if (long(arr.size()) != net.box().edge_count(d))
      fail(Err::Validation, "edge array length mismatch in direction " + std::to_string(d + 1));
    for (long ei = 0; ei < long(arr.size()); ++ei) {
      if (arr[ei].is_null()) continue;
      net.set(d, net.box().edge_coords(d, ei), value_from_json(arr[ei]));
    }
  }
  return net;
}

json vertex_net_to_json(const lattice::VertexNet& net) {
  const lattice::LatticeBox& box = net.box();
  json vals = json::array();
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    std::vector<int> x = box.vertex_coords(vi);
    vals.push_back(net.has(x) ? value_to_json(net.at(x)) : json(nullptr));
  }
  return {{"dim", box.dim()}, {"extents", box.extents()}, {"vertices", std::move(vals)}};
}

json curve_to_json(const curves::DiscreteCurve& c) {
  json edges = json::array();
  for (const Quaternion& u : c.edges) edges.push_back(json::array({u.x, u.y, u.z}));
  return {{"base", json::array({c.base.x, c.base.y, c.base.z})}, {"edges", std::move(edges)}};
}

curves::DiscreteCurve curve_from_json(const json& j) {
  curves::DiscreteCurve c;
  const json& b = field(j, "base");
  c.base = Quaternion{0, b[0].get<double>(), b[1].get<double>(), b[2].get<double>()};
  for (const json& e : field(j, "edges"))
    c.edges.push_back(Quaternion{0, e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
  return c;
}

json mat_poly_to_json(const factor::MatPoly& p) {
  json coeffs = json::array();
  for (const Mat2& m : p.c) coeffs.push_back(value_to_json(Value(m)));
  return {{"coeffs", std::move(coeffs)}};
}

factor::MatPoly mat_poly_from_json(const json& j) {
  factor::MatPoly p;
  for (const json& c : field(j, "coeffs")) {
    Value v = value_from_json(c);
    p.c.push_back(v.tag() == algebra::Tag::Quat ? algebra::quat_to_mat2(v.quat()) : v.mat());
  }
  if (p.c.empty()) fail(Err::Validation, "polynomial needs at least one coefficient");
  return p;
}

json seed_to_json(const surfaces::CrossRatioLattice& lat) {
  json f = json::array();
  for (Scalar z : lat.f) f.push_back(cplx(z));
  json alpha = json::array();
  for (const auto& dir : lat.alpha) {
    json a = json::array();
    for (Scalar z : dir) a.push_back(cplx(z));
    alpha.push_back(std::move(a));
  }
  json s = json::array();
  for (Scalar z : lat.s) s.push_back(cplx(z));
  return {{"dim", lat.box.dim()}, {"extents", lat.box.extents()}, {"f", std::move(f)},
          {"alpha", std::move(alpha)}, {"s", std::move(s)}};
}

surfaces::CrossRatioLattice seed_from_json(const json& j) {
  std::vector<int> extents = field(j, "extents").get<std::vector<int>>();
  lattice::LatticeBox box(extents);
  std::vector<Scalar> f;
  for (const json& z : field(j, "f")) f.push_back(cplx_from(z));
  std::vector<std::vector<Scalar>> alpha;
  for (const json& dir : field(j, "alpha")) {
    std::vector<Scalar> a;
    for (const json& z : dir) a.push_back(cplx_from(z));
    alpha.push_back(std::move(a));
  }
  return surfaces::make_cross_ratio_lattice(std::move(box), std::move(f), std::move(alpha));
}

json quadric_to_json(const moutard::QuadricNet& net) {
  json verts = json::array();
  for (const auto& v : net.f) verts.push_back(v);
  return {{"p", net.p}, {"q", net.q}, {"kappa", net.kappa}, {"extents", net.box.extents()},
          {"vertices", std::move(verts)}};
}

moutard::QuadricNet quadric_from_json(const json& j) {
  moutard::QuadricNet net;
  net.p = field(j, "p").get<int>();
  net.q = field(j, "q").get<int>();
  net.kappa = field(j, "kappa").get<double>();
  net.box = lattice::LatticeBox(field(j, "extents").get<std::vector<int>>());
  for (const json& v : field(j, "vertices")) net.f.push_back(v.get<std::vector<double>>());
  if (long(net.f.size()) != net.box.vertex_count())
    fail(Err::Validation, "vertex count mismatch");
  return net;
}

json surface_to_json(const surfaces::DiagonalSurface& s) {
  json pts = json::array();
  for (const Quaternion& p : s.points) pts.push_back(json::array({p.x, p.y, p.z}));
  json out = {{"m", s.m},
              {"n", s.n},
              {"t", s.t},
              {"mode", s.mode == surfaces::Mode4D::CPlus ? "cplus" : "cminus"},
              {"points", std::move(pts)},
              {"pattern_residual", s.pattern_residual},
              {"compat_residual", s.compat_residual}};
  if (!s.normals.empty()) {
    json ns = json::array();
    for (const Quaternion& nq : s.normals) ns.push_back(json::array({nq.x, nq.y, nq.z}));
    out["normals"] = std::move(ns);
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot read '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(Err::Validation, "malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(Err::Io, "cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) fail(Err::Io, "write failed for '" + path + "'");
}

}  // namespace skewnet::io
