#include "skewnet/jobs.hpp"

#include <cstdlib>
#include <iostream>
#include <set>

#include "skewnet/json_io.hpp"
#include "skewnet/obj_io.hpp"

namespace skewnet::jobs {

using nlohmann::json;
using algebra::Quaternion;
using algebra::Value;

namespace {

bool log_enabled() {
  const char* v = std::getenv("SKEWNET_LOG");
  return v && *v && std::string(v) != "0";
}

void log(const std::string& msg) {
  if (log_enabled()) std::cerr << "[skewnet] " << msg << "\n";
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(Err::Validation, "unknown field '" + where + it.key() + "'");
}

double get_tol(const json& cfg) { return cfg.value("tol", kDefaultTol); }

std::string require_str(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string())
    fail(Err::Validation, std::string("missing string field '") + name + "'");
  return it->get<std::string>();
}

Quaternion quat_param(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_array() || it->size() != 4)
    fail(Err::Validation, std::string("field '") + name + "' must be [w, x, y, z]");
  return {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(),
          (*it)[3].get<double>()};
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---------------------------------------------------------------------------

json run_verify(const json& cfg, const json& params, int& status) {
  check_keys(params, {}, "params.");
  lattice::EdgeNet net = io::net_from_json(io::read_json_file(require_str(cfg, "input")));
  double tol = get_tol(cfg);
  lattice::QuadResidual qr = lattice::max_quad_residual(net);
  json rep = {{"additive_residual", qr.additive}, {"multiplicative_residual", qr.multiplicative}};
  if (net.complete()) {
    lattice::LabelReport lr = lattice::labelling_check(net, tol);
    rep["labelling_deviation"] = lr.max_deviation;
    rep["labelling_pass"] = lr.pass;
    if (!lr.pass && lr.worst_dir >= 0) {
      rep["labelling_worst_dir"] = lr.worst_dir + 1;
      rep["labelling_worst_edge"] = lr.worst_edge;
    }
    if (!lr.pass) status = 3;
  }
  if (qr.max() > tol) status = 3;
  return rep;
}

json run_evolve(const json& cfg, const json& params, int& status) {
  check_keys(params, {}, "params.");
  lattice::EdgeNet net = io::net_from_json(io::read_json_file(require_str(cfg, "input")));
  double tol = get_tol(cfg);
  double res = lattice::complete_net(net, tol);
  if (cfg.contains("emit")) io::write_json_file(cfg["emit"].get<std::string>(), io::net_to_json(net));
  if (res > tol) status = 3;
  return {{"quad_residual", res}, {"edges", net.edge_total()}};
}

json run_factor(const json& cfg, const json& params, int& status) {
  check_keys(params, {"pairing", "pairs", "form"}, "params.");
  factor::MatPoly input = io::mat_poly_from_json(io::read_json_file(require_str(cfg, "input")));
  double tol = get_tol(cfg);
  std::string form = params.value("form", "unit");
  std::string pairing_kind = params.value("pairing", "conjugate");

  factor::MatPoly work = (form == "unit") ? factor::reverse_neg(input.trimmed()) : input.trimmed();
  if (form != "unit" && form != "linear") fail(Err::Validation, "form must be unit or linear");

  factor::RootPairing pairing;
  if (pairing_kind == "conjugate") {
    pairing = factor::conjugate_pairing(factor::polynomial_roots(factor::det_poly(work), tol), 1e-7);
  } else if (pairing_kind == "explicit") {
    auto it = params.find("pairs");
    if (it == params.end()) fail(Err::Validation, "explicit pairing needs 'pairs'");
    for (const json& pr : *it) {
      if (!pr.is_array() || pr.size() != 2)
        fail(Err::Validation, "each pair must be [[re,im],[re,im]]");
      pairing.emplace_back(Scalar(pr[0][0].get<double>(), pr[0][1].get<double>()),
                           Scalar(pr[1][0].get<double>(), pr[1][1].get<double>()));
    }
  } else {
    fail(Err::Validation, "pairing must be conjugate or explicit");
  }

  factor::FactorizationCube cube = factor::factorize_cube(work, pairing, tol);
  json factors = json::array();
  {
    // the staircase path in extraction order; rightmost factor first
    std::vector<int> pos(work.deg(), 0);
    for (int k = 0; k < work.deg(); ++k) {
      Value u = cube.roots.at(k, pos);
      factors.push_back(io::value_to_json(u));
      pos[k] = 1;
    }
  }
  if (cfg.contains("emit")) {
    json dump = io::net_to_json(cube.roots);
    dump["leading"] = io::value_to_json(Value(cube.leading));
    dump["form"] = form;
    io::write_json_file(cfg["emit"].get<std::string>(), dump);
  }
  if (cube.path_residual > 1e-8 || cube.quad_residual > tol) status = 3;
  return {{"form", form},
          {"factors", std::move(factors)},
          {"leading", io::value_to_json(Value(cube.leading))},
          {"path_residual", cube.path_residual},
          {"quad_residual", cube.quad_residual}};
}

void emit_curves(const json& cfg, const std::vector<curves::DiscreteCurve>& cs) {
  if (!cfg.contains("emit")) return;
  std::string path = cfg["emit"].get<std::string>();
  if (ends_with(path, ".obj")) {
    io::export_obj(cs, path);
  } else {
    json j = io::curve_to_json(cs.front());
    if (cs.size() > 1) {
      json stages = json::array();
      for (size_t k = 1; k < cs.size(); ++k) stages.push_back(io::curve_to_json(cs[k]));
      j["stages"] = std::move(stages);
    }
    io::write_json_file(path, j);
  }
}

json run_curve(const json& cfg, const std::string& sub, const json& params, int& status) {
  double tol = get_tol(cfg);
  if (sub == "backlund") {
    check_keys(params, {"v0", "anchor"}, "params.");
    curves::DiscreteCurve c = io::curve_from_json(io::read_json_file(require_str(cfg, "input")));
    c.validate(std::sqrt(tol));
    curves::BacklundResult r =
        curves::backlund_curve(c, quat_param(params, "v0"), params.value("anchor", 0), tol);
    emit_curves(cfg, {r.curve, c});
    double label_dev = 0;
    for (const Quaternion& v : r.v)
      label_dev = std::max({label_dev, std::abs(v.norm() - r.v[0].norm()),
                            std::abs(v.re() - r.v[0].re())});
    if (label_dev > std::sqrt(tol)) status = 3;
    return {{"label_deviation", label_dev}};
  }
  if (sub == "ninvariant") {
    check_keys(params, {"E", "vs", "steps", "branch"}, "params.");
    Quaternion E = quat_param(params, "E");
    std::vector<Quaternion> vs;
    for (const json& v : params.at("vs"))
      vs.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()});
    int steps = params.value("steps", 30);
    curves::NInvariantResult r =
        curves::ninvariant_construct(E, vs, params.value("branch", 1), steps, tol);
    // invariant polynomial constancy along the curve
    auto [tr0, det0] = curves::chain_invariants(E, r.vs.front());
    double dev = 0;
    for (const auto& chain : r.vs) {
      auto [trk, detk] = curves::chain_invariants(E, chain);
      for (size_t c = 0; c < tr0.size(); ++c) dev = std::max(dev, std::abs(trk[c] - tr0[c]));
      for (size_t c = 0; c < det0.size(); ++c) dev = std::max(dev, std::abs(detk[c] - det0[c]));
    }
    std::vector<curves::DiscreteCurve> stages{r.curve};
    {
      curves::DiscreteCurve stage = r.curve;
      for (size_t l = 0; l < vs.size(); ++l) {
        std::vector<Quaternion> vl;
        for (const auto& chain : r.vs) vl.push_back(chain[l]);
        curves::DiscreteCurve next;
        next.base = (stage.base + vl[0]).vec();
        for (size_t k = 0; k < stage.edges.size(); ++k)
          next.edges.push_back(curves::backlund_map(vl[k], stage.edges[k], tol));
        stages.push_back(next);
        stage = stages.back();
      }
    }
    emit_curves(cfg, stages);
    if (dev > 1e-8 || r.invariance_residual > std::sqrt(tol)) status = 3;
    return {{"invariant_deviation", dev}, {"invariance_residual", r.invariance_residual}};
  }
  if (sub == "elastic") {
    check_keys(params, {"E", "bhat0", "u0", "steps"}, "params.");
    curves::ElasticResult r =
        curves::elastic_construct(quat_param(params, "E"), quat_param(params, "bhat0"),
                                  quat_param(params, "u0"), params.value("steps", 50), tol);
    curves::ElasticVerification v = curves::elastic_verify(r.curve, tol);
    emit_curves(cfg, {r.curve});
    if (v.residual > 1e-8) status = 3;
    return {{"flow_residual", v.residual}, {"alpha", v.alpha}, {"beta", v.beta}};
  }
  if (sub == "elastic-verify") {
    check_keys(params, {}, "params.");
    curves::DiscreteCurve c = io::curve_from_json(io::read_json_file(require_str(cfg, "input")));
    curves::ElasticVerification v = curves::elastic_verify(c, tol);
    return {{"flow_residual", v.residual},
            {"alpha", v.alpha},
            {"beta", v.beta},
            {"e", json::array({v.e.x, v.e.y, v.e.z})},
            {"x", json::array({v.x.x, v.x.y, v.x.z})}};
  }
  fail(Err::Validation, "unknown curve subcommand '" + sub + "'");
}

json run_surface(const json& cfg, const std::string& sub, const json& params, int& status) {
  double tol = get_tol(cfg);
  if (sub == "knet") {
    check_keys(params, {"t", "t_samples"}, "params.");
    lattice::EdgeNet net = io::net_from_json(io::read_json_file(require_str(cfg, "input")));
    if (params.contains("t_samples")) {
      // family sampling: an array of edge-net dumps indexed by t
      json samples = json::array();
      for (double t : params["t_samples"].get<std::vector<double>>()) {
        lax::Frame fr = lax::propagate_frame(net, lax::SpectralPath::exponential(), t,
                                             net.first_edge().one(), tol);
        lattice::EdgeNet member = lax::associated_edges(net, fr, tol);
        samples.push_back({{"t", t}, {"net", io::net_to_json(member)}});
      }
      if (cfg.contains("emit")) io::write_json_file(cfg["emit"].get<std::string>(), samples);
      return {{"samples", samples.size()}};
    }
    auto [f, frame] = surfaces::knet_family(net, params.value("t", 0.5), tol);
    if (cfg.contains("emit")) {
      std::string path = cfg["emit"].get<std::string>();
      if (ends_with(path, ".obj"))
        io::export_obj(f, path);
      else
        io::write_json_file(path, io::vertex_net_to_json(f));
    }
    return {{"vertices", f.box().vertex_count()}};
  }
  if (sub == "dpw") {
    check_keys(params, {"mode", "extents", "t"}, "params.");
    surfaces::CrossRatioLattice seed =
        io::seed_from_json(io::read_json_file(require_str(cfg, "seed")));
    std::string mode_s = require_str(params, "mode");
    surfaces::Mode4D mode;
    if (mode_s == "cplus")
      mode = surfaces::Mode4D::CPlus;
    else if (mode_s == "cminus")
      mode = surfaces::Mode4D::CMinus;
    else
      fail(Err::Validation, "mode must be cplus or cminus");
    std::array<int, 4> extents{};
    {
      auto it = params.find("extents");
      if (it == params.end() || it->size() != 4)
        fail(Err::Validation, "extents must list four integers");
      for (int k = 0; k < 4; ++k) extents[k] = (*it)[k].get<int>();
    }
    surfaces::Lattice4D l4 = surfaces::extend_to_4d(seed, mode, extents, tol);
    surfaces::ModeReport mr = surfaces::mode_invariants(l4);
    surfaces::DiagonalSurface surf = surfaces::surface_extract(l4, params.value("t", 0.0), tol);
    if (cfg.contains("emit")) {
      std::string path = cfg["emit"].get<std::string>();
      if (ends_with(path, ".obj"))
        io::export_obj(surf, path);
      else {
        json dump = io::surface_to_json(surf);
        dump["lattice"] = io::seed_to_json(l4.lat);
        io::write_json_file(path, dump);
      }
    }
    double worst = std::max({mr.dpw_dev, mr.reality_dev, surf.pattern_residual});
    if (worst > std::sqrt(tol)) status = 3;
    return {{"dpw_deviation", mr.dpw_dev},
            {"reality_deviation", mr.reality_dev},
            {"pattern_residual", surf.pattern_residual},
            {"compat_residual", surf.compat_residual}};
  }
  if (sub == "cmc-cube") {
    check_keys(params, {"extents", "t_samples"}, "params.");
    surfaces::CrossRatioLattice seed =
        io::seed_from_json(io::read_json_file(require_str(cfg, "seed")));
    std::array<int, 4> extents{};
    {
      auto it = params.find("extents");
      if (it == params.end() || it->size() != 4)
        fail(Err::Validation, "extents must list four integers");
      for (int k = 0; k < 4; ++k) extents[k] = (*it)[k].get<int>();
    }
    std::vector<double> ts = params.value("t_samples", std::vector<double>{0.5, 0.25, 1.0});
    surfaces::Lattice4D l4 = surfaces::extend_to_4d(seed, surfaces::Mode4D::CPlus, extents, tol);
    surfaces::CmcLaxData data = surfaces::cmc_data_from_cplus(l4, tol);
    surfaces::CmcCubeResult cube = surfaces::cmc_cube_gauge(data, ts, tol);
    if (cfg.contains("emit"))
      io::write_json_file(cfg["emit"].get<std::string>(),
                          io::net_to_json(surfaces::cmc_cube_net(cube)));
    double worst = std::max({cube.form_residual, cube.quad_residual, cube.w_norm_dev});
    if (worst > 1e-8) status = 3;
    return {{"form_residual", cube.form_residual},
            {"quad_residual", cube.quad_residual},
            {"w_norm_deviation", cube.w_norm_dev},
            {"compat_residual", cube.compat_residual}};
  }
  fail(Err::Validation, "unknown surface subcommand '" + sub + "'");
}

json run_moutard(const json& cfg, const std::string& sub, const json& params, int& status) {
  double tol = get_tol(cfg);
  if (sub == "complete") {
    check_keys(params, {"p", "q", "kappa", "f", "fi", "fj"}, "params.");
    moutard::QuadricNet net;
    net.p = params.value("p", 3);
    net.q = params.value("q", 0);
    net.kappa = params.value("kappa", 1.0);
    auto f = params.at("f").get<std::vector<double>>();
    auto fi = params.at("fi").get<std::vector<double>>();
    auto fj = params.at("fj").get<std::vector<double>>();
    std::vector<double> fij = moutard_complete(net, f, fi, fj, tol);
    return {{"fij", fij}, {"quadric_residual", std::abs(net.inner(fij, fij) - net.kappa)}};
  }
  if (sub == "family") {
    check_keys(params, {"t", "path"}, "params.");
    moutard::QuadricNet net = io::quadric_from_json(io::read_json_file(require_str(cfg, "input")));
    std::string path_name = params.value("path", "trig");
    lax::SpectralPath path;
    if (path_name == "trig")
      path = lax::SpectralPath::trig();
    else if (path_name == "linear")
      path = lax::SpectralPath::linear();
    else if (path_name == "exponential")
      path = lax::SpectralPath::exponential();
    else
      fail(Err::Validation, "path must be trig, linear or exponential");
    moutard::MoutardFamily fam = moutard::moutard_family(net, path, params.value("t", 0.3), tol);
    if (cfg.contains("emit"))
      io::write_json_file(cfg["emit"].get<std::string>(), io::quadric_to_json(fam.net));
    double worst = std::max({fam.net.quadric_residual(), fam.net.moutard_residual(),
                             fam.identity_dev});
    if (worst > std::sqrt(tol)) status = 3;
    return {{"quadric_residual", fam.net.quadric_residual()},
            {"moutard_residual", fam.net.moutard_residual()},
            {"identity_deviation", fam.identity_dev},
            {"r", fam.r},
            {"s", fam.s}};
  }
  fail(Err::Validation, "unknown moutard subcommand '" + sub + "'");
}

json run_export(const json& cfg, const json& params, int& status) {
  check_keys(params, {}, "params.");
  json input = io::read_json_file(require_str(cfg, "input"));
  std::string path = require_str(cfg, "emit");
  if (input.contains("edges") && input.contains("base")) {
    std::vector<curves::DiscreteCurve> cs{io::curve_from_json(input)};
    if (input.contains("stages"))
      for (const json& st : input["stages"]) cs.push_back(io::curve_from_json(st));
    io::export_obj(cs, path);
  } else if (input.contains("points")) {
    surfaces::DiagonalSurface surf;
    surf.m = input.at("m").get<int>();
    surf.n = input.at("n").get<int>();
    for (const json& p : input.at("points"))
      surf.points.push_back(Quaternion{0, p[0].get<double>(), p[1].get<double>(),
                                       p[2].get<double>()});
    io::export_obj(surf, path);
  } else if (input.contains("vertices") && input.contains("extents")) {
    lattice::LatticeBox box(input.at("extents").get<std::vector<int>>());
    lattice::VertexNet net(box);
    long vi = 0;
    for (const json& v : input.at("vertices")) {
      if (!v.is_null()) net.set(box.vertex_coords(vi), io::value_from_json(v));
      ++vi;
    }
    io::export_obj(net, path);
  } else {
    fail(Err::NotEmbeddable, "input is not an exportable geometry");
  }
  (void)status;
  return {{"written", path}};
}

}  // namespace

RunResult run(const json& config) {
  RunResult result;
  try {
    if (!config.is_object()) fail(Err::Validation, "config must be a JSON object");
    check_keys(config, {"command", "subcommand", "input", "seed", "emit", "report", "tol", "params"},
               "");
    std::string command = require_str(config, "command");
    std::string sub = config.value("subcommand", "");
    json params = config.value("params", json::object());
    log("running " + command + (sub.empty() ? "" : " " + sub));

    int status = 0;
    json rep;
    if (command == "verify")
      rep = run_verify(config, params, status);
    else if (command == "evolve")
      rep = run_evolve(config, params, status);
    else if (command == "factor")
      rep = run_factor(config, params, status);
    else if (command == "curve")
      rep = run_curve(config, sub, params, status);
    else if (command == "surface")
      rep = run_surface(config, sub, params, status);
    else if (command == "moutard")
      rep = run_moutard(config, sub, params, status);
    else if (command == "export")
      rep = run_export(config, params, status);
    else
      fail(Err::Validation, "unknown command '" + command + "'");

    rep["command"] = command;
    if (!sub.empty()) rep["subcommand"] = sub;
    rep["status"] = status;
    result.status = status;
    result.report = rep;
    if (config.contains("report"))
      io::write_json_file(config["report"].get<std::string>(), rep);
  } catch (const Error& e) {
    result.error = e.what();
    switch (e.kind()) {
      case Err::Validation: result.status = 2; break;
      case Err::Io: result.status = 4; break;
      default: result.status = 3; break;
    }
    result.report = {{"error", e.what()}, {"status", result.status}};
  } catch (const std::exception& e) {
    result.error = e.what();
    result.status = 2;
    result.report = {{"error", e.what()}, {"status", 2}};
  }
  return result;
}

RunResult run_json_text(const std::string& config_text) {
  json cfg = json::parse(config_text, nullptr, false);
  if (cfg.is_discarded()) {
    RunResult r;
    r.status = 2;
    r.error = "config is not valid JSON";
    r.report = {{"error", r.error}, {"status", 2}};
    return r;
  }
  return run(cfg);
}

}  // namespace skewnet::jobs
