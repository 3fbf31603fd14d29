#pragma once

#include <string>

#include "skewnet/curves.hpp"
#include "skewnet/surfaces.hpp"

namespace skewnet::io {

/// OBJ quad mesh of a 2D quaternionic vertex net: "v" lines in lattice-lex
/// order, consistently oriented "f" quads, 1-based indices. Points are the
/// imaginary parts.
void export_obj(const lattice::VertexNet& net, const std::string& path);

/// OBJ polylines: one "l" element per curve.
void export_obj(const std::vector<curves::DiscreteCurve>& curves, const std::string& path);

void export_obj(const surfaces::DiagonalSurface& surf, const std::string& path);

struct ObjData {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::vector<int>> faces;  // 0-based
  std::vector<std::vector<int>> lines;  // 0-based
};

ObjData import_obj(const std::string& path);

}  // namespace skewnet::io
