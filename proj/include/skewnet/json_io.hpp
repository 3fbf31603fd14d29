#pragma once

#include <string>

#include <json.hpp>

#include "skewnet/curves.hpp"
#include "skewnet/moutard.hpp"
#include "skewnet/surfaces.hpp"

namespace skewnet::io {

using nlohmann::json;

json value_to_json(const algebra::Value& v);
algebra::Value value_from_json(const json& j);

json net_to_json(const lattice::EdgeNet& net);
lattice::EdgeNet net_from_json(const json& j);

json vertex_net_to_json(const lattice::VertexNet& net);

json curve_to_json(const curves::DiscreteCurve& c);
curves::DiscreteCurve curve_from_json(const json& j);

json mat_poly_to_json(const factor::MatPoly& p);
factor::MatPoly mat_poly_from_json(const json& j);

json seed_to_json(const surfaces::CrossRatioLattice& lat);
surfaces::CrossRatioLattice seed_from_json(const json& j);

json quadric_to_json(const moutard::QuadricNet& net);
moutard::QuadricNet quadric_from_json(const json& j);

json surface_to_json(const surfaces::DiagonalSurface& s);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace skewnet::io
