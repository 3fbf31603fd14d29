#include "skewnet/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace skewnet::io {

using algebra::Quaternion;

namespace {

struct ObjWriter {
  std::ofstream out;

  explicit ObjWriter(const std::string& path) : out(path) {
    if (!out) fail(Err::Io, "cannot write '" + path + "'");
  }

  void vertex(double x, double y, double z) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", x, y, z);
    out << buf;
  }
};

Quaternion point_of(const algebra::Value& v) {
  if (v.tag() == algebra::Tag::Quat) return v.quat().vec();
  if (v.tag() == algebra::Tag::Mat) {
    if (algebra::quaternion_pattern_residual(v.mat()) > 1e-6)
      fail(Err::NotEmbeddable, "matrix value has no quaternionic interpretation");
    return algebra::mat2_to_quat(v.mat()).vec();
  }
  fail(Err::NotEmbeddable, "value is not 3D-interpretable");
}

}  // namespace

void export_obj(const lattice::VertexNet& net, const std::string& path) {
  const lattice::LatticeBox& box = net.box();
  if (box.dim() != 2) fail(Err::NotEmbeddable, "OBJ mesh export needs a 2D net");
  ObjWriter w(path);
  int m = box.extents()[0], n = box.extents()[1];
  for (long vi = 0; vi < box.vertex_count(); ++vi) {
    Quaternion p = point_of(net.at(box.vertex_coords(vi)));
    w.vertex(p.x, p.y, p.z);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      long a = box.vertex_index({i, j}) + 1;
      long b = box.vertex_index({i + 1, j}) + 1;
      long c = box.vertex_index({i + 1, j + 1}) + 1;
      long d = box.vertex_index({i, j + 1}) + 1;
      w.out << "f " << a << " " << b << " " << c << " " << d << "\n";
    }
  }
}

void export_obj(const std::vector<curves::DiscreteCurve>& curves, const std::string& path) {
  ObjWriter w(path);
  long base = 1;
  std::vector<std::pair<long, long>> ranges;
  for (const curves::DiscreteCurve& c : curves) {
    Quaternion g = c.base;
    w.vertex(g.x, g.y, g.z);
    for (const Quaternion& u : c.edges) {
      g = g + u;
      w.vertex(g.x, g.y, g.z);
    }
    ranges.emplace_back(base, base + c.vertex_count() - 1);
    base += c.vertex_count();
  }
  for (auto [lo, hi] : ranges) {
    w.out << "l";
    for (long k = lo; k <= hi; ++k) w.out << " " << k;
    w.out << "\n";
  }
}

void export_obj(const surfaces::DiagonalSurface& surf, const std::string& path) {
  ObjWriter w(path);
  int m = surf.m, n = surf.n;
  for (const Quaternion& p : surf.points) w.vertex(p.x, p.y, p.z);
  auto idx = [&](int i, int j) { return long(i) * (n + 1) + j + 1; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      w.out << "f " << idx(i, j) << " " << idx(i + 1, j) << " " << idx(i + 1, j + 1) << " "
            << idx(i, j + 1) << "\n";
}

ObjData import_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Io, "cannot read '" + path + "'");
  ObjData data;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    std::string kind;
    is >> kind;
    if (kind == "v") {
      std::array<double, 3> v{};
      is >> v[0] >> v[1] >> v[2];
      data.vertices.push_back(v);
    } else if (kind == "f" || kind == "l") {
      std::vector<int> ids;
      int id;
      while (is >> id) ids.push_back(id - 1);
      (kind == "f" ? data.faces : data.lines).push_back(std::move(ids));
    }
  }
  return data;
}

}  // namespace skewnet::io
