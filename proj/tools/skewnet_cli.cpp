// skewnet command line tool. Builds a job config from the flags and runs it
// through the C API of the shared library.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewnet/skewnet_c.h"

using nlohmann::json;

namespace {

json parse_quat(const std::string& s) {
  json arr = json::array();
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      arr.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) arr.push_back(std::stod(cur));
  if (arr.size() == 3) arr.insert(arr.begin(), 0.0);  // imaginary shorthand x,y,z
  if (arr.size() != 4) throw CLI::ValidationError("expected w,x,y,z (or x,y,z)");
  return arr;
}

json parse_quat_list(const std::string& s) {
  json list = json::array();
  std::string cur;
  for (char c : s + ";") {
    if (c == ';') {
      if (!cur.empty()) list.push_back(parse_quat(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return list;
}

int run_config(const json& cfg, bool print_report) {
  skewnet_job* job = skewnet_job_run(cfg.dump().c_str());
  int status = skewnet_job_status(job);
  if (print_report) std::printf("%s\n", skewnet_job_report(job));
  if (status != SKEWNET_OK) std::fprintf(stderr, "error: %s\n", skewnet_job_error(job));
  skewnet_job_free(job);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skew parallelogram nets: evolution, factorization, curves and surfaces"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string emit, report;
  app.add_option("--tol", tol, "numerical tolerance")->capture_default_str();
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--emit", emit, "artifact output path (.json or .obj)");
  app.add_option("--report", report, "sidecar report path");

  auto base_config = [&](const std::string& cmd) {
    json cfg{{"command", cmd}, {"tol", tol}, {"seed", seed}};
    if (!emit.empty()) cfg["emit"] = emit;
    if (!report.empty()) cfg["report"] = report;
    return cfg;
  };

  // verify
  std::string verify_net;
  CLI::App* verify = app.add_subcommand("verify", "check the quad equations of a net");
  verify->add_option("--net", verify_net, "net JSON")->required();

  // evolve
  std::string evolve_net;
  CLI::App* evolve = app.add_subcommand("evolve", "fill a box from axis data");
  evolve->add_option("--net", evolve_net, "partial net JSON")->required();

  // factor
  std::string factor_in, factor_pairing = "conjugate", factor_form = "unit", factor_pairs;
  CLI::App* factor = app.add_subcommand("factor", "factorize a matrix polynomial");
  factor->add_option("--input", factor_in, "polynomial JSON")->required();
  factor->add_option("--pairing", factor_pairing, "conjugate|explicit")->capture_default_str();
  factor->add_option("--form", factor_form, "unit|linear")->capture_default_str();
  factor->add_option("--pairs", factor_pairs,
                     "explicit pairs re,im,re,im;... (one pair per ';' group)");

  // curve
  CLI::App* curve = app.add_subcommand("curve", "discrete curve constructions");
  curve->require_subcommand(1);
  std::string curve_in, curve_E = "1,0,0,0", curve_vs, curve_v0, curve_bhat0, curve_u0;
  int curve_steps = 30, curve_branch = 1, curve_anchor = 0;
  CLI::App* backlund = curve->add_subcommand("backlund", "Bäcklund transform of a curve");
  backlund->add_option("--input", curve_in, "curve JSON")->required();
  backlund->add_option("--v0", curve_v0, "seed edge w,x,y,z")->required();
  backlund->add_option("--anchor", curve_anchor, "anchor vertex")->capture_default_str();
  CLI::App* ninv = curve->add_subcommand("ninvariant", "n-invariant curve from Bäcklund data");
  ninv->add_option("--E", curve_E, "rotation witness w,x,y,z")->required();
  ninv->add_option("--vs", curve_vs, "chain seeds w,x,y,z;w,x,y,z;...")->required();
  ninv->add_option("--steps", curve_steps, "curve length")->capture_default_str();
  ninv->add_option("--branch", curve_branch, "+1 or -1 fixed point at k=0")->capture_default_str();
  CLI::App* elastic = curve->add_subcommand("elastic", "2-invariant curve (elastic rod)");
  elastic->add_option("--E", curve_E, "rotation witness w,x,y,z")->required();
  elastic->add_option("--bhat0", curve_bhat0, "hat B(0) w,x,y,z")->required();
  elastic->add_option("--u0", curve_u0, "first edge x,y,z (unit)")->required();
  elastic->add_option("--steps", curve_steps, "curve length")->capture_default_str();
  CLI::App* everify = curve->add_subcommand("elastic-verify", "tangent/Hashimoto flow check");
  everify->add_option("--input", curve_in, "curve JSON")->required();

  // surface
  CLI::App* surface = app.add_subcommand("surface", "surface constructions");
  surface->require_subcommand(1);
  std::string surf_in, surf_seed, surf_mode = "cplus";
  std::vector<int> surf_extents;
  double surf_t = 0.0;
  std::vector<double> surf_ts;
  CLI::App* knet = surface->add_subcommand("knet", "K-net associated family member");
  knet->add_option("--net", surf_in, "planar quaternionic net JSON")->required();
  knet->add_option("--t", surf_t, "family parameter")->capture_default_str();
  knet->add_option("--t-samples", surf_ts, "sample the family: emit net dumps indexed by t");
  CLI::App* dpw = surface->add_subcommand("dpw", "constant curvature surface from a seed");
  dpw->add_option("--seed", surf_seed, "2D cross-ratio seed JSON")->required();
  dpw->add_option("--mode", surf_mode, "cplus|cminus")->capture_default_str();
  dpw->add_option("--extents", surf_extents, "four box extents")->expected(4)->required();
  dpw->add_option("--t", surf_t, "family parameter")->capture_default_str();
  CLI::App* cmccube = surface->add_subcommand("cmc-cube", "two-layer CMC cube gauge");
  cmccube->add_option("--seed", surf_seed, "2D cross-ratio seed JSON")->required();
  cmccube->add_option("--extents", surf_extents, "four box extents")->expected(4)->required();
  cmccube->add_option("--t-samples", surf_ts, "sample parameters");

  // moutard
  CLI::App* mout = app.add_subcommand("moutard", "Moutard nets in quadrics");
  mout->require_subcommand(1);
  std::string mout_in, mout_path = "trig";
  double mout_t = 0.3, mout_kappa = 1.0;
  int mout_p = 3, mout_q = 0;
  std::vector<double> mout_f, mout_fi, mout_fj;
  CLI::App* mcomplete = mout->add_subcommand("complete", "fourth quad point in the quadric");
  mcomplete->add_option("--p", mout_p, "positive signature")->capture_default_str();
  mcomplete->add_option("--q", mout_q, "negative signature")->capture_default_str();
  mcomplete->add_option("--kappa", mout_kappa, "quadric constant")->capture_default_str();
  mcomplete->add_option("--f", mout_f, "base point")->required();
  mcomplete->add_option("--fi", mout_fi, "i-neighbour")->required();
  mcomplete->add_option("--fj", mout_fj, "j-neighbour")->required();
  CLI::App* mfamily = mout->add_subcommand("family", "geometric associated family member");
  mfamily->add_option("--net", mout_in, "quadric net JSON")->required();
  mfamily->add_option("--t", mout_t, "family parameter")->capture_default_str();
  mfamily->add_option("--path", mout_path, "trig|linear|exponential")->capture_default_str();

  // export
  std::string export_in;
  CLI::App* exp = app.add_subcommand("export", "convert a geometry JSON to OBJ");
  exp->add_option("--input", export_in, "geometry JSON")->required();

  CLI11_PARSE(app, argc, argv);

  json cfg;
  try {
    if (verify->parsed()) {
      cfg = base_config("verify");
      cfg["input"] = verify_net;
    } else if (evolve->parsed()) {
      cfg = base_config("evolve");
      cfg["input"] = evolve_net;
    } else if (factor->parsed()) {
      cfg = base_config("factor");
      cfg["input"] = factor_in;
      cfg["params"] = {{"pairing", factor_pairing}, {"form", factor_form}};
      if (!factor_pairs.empty()) {
        json pairs = json::array();
        for (const json& grp : parse_quat_list(factor_pairs))
          pairs.push_back(json::array({json::array({grp[0], grp[1]}),
                                       json::array({grp[2], grp[3]})}));
        cfg["params"]["pairs"] = pairs;
      }
    } else if (curve->parsed()) {
      cfg = base_config("curve");
      if (backlund->parsed()) {
        cfg["subcommand"] = "backlund";
        cfg["input"] = curve_in;
        cfg["params"] = {{"v0", parse_quat(curve_v0)}, {"anchor", curve_anchor}};
      } else if (ninv->parsed()) {
        cfg["subcommand"] = "ninvariant";
        cfg["params"] = {{"E", parse_quat(curve_E)},
                         {"vs", parse_quat_list(curve_vs)},
                         {"steps", curve_steps},
                         {"branch", curve_branch}};
      } else if (elastic->parsed()) {
        cfg["subcommand"] = "elastic";
        cfg["params"] = {{"E", parse_quat(curve_E)},
                         {"bhat0", parse_quat(curve_bhat0)},
                         {"u0", parse_quat(curve_u0)},
                         {"steps", curve_steps}};
      } else {
        cfg["subcommand"] = "elastic-verify";
        cfg["input"] = curve_in;
      }
    } else if (surface->parsed()) {
      cfg = base_config("surface");
      if (knet->parsed()) {
        cfg["subcommand"] = "knet";
        cfg["input"] = surf_in;
        cfg["params"] = {{"t", surf_t}};
        if (!surf_ts.empty()) cfg["params"]["t_samples"] = surf_ts;
      } else if (dpw->parsed()) {
        cfg["subcommand"] = "dpw";
        cfg["seed"] = surf_seed;
        cfg["params"] = {{"mode", surf_mode}, {"extents", surf_extents}, {"t", surf_t}};
      } else {
        cfg["subcommand"] = "cmc-cube";
        cfg["seed"] = surf_seed;
        cfg["params"] = {{"extents", surf_extents}};
        if (!surf_ts.empty()) cfg["params"]["t_samples"] = surf_ts;
      }
    } else if (mout->parsed()) {
      cfg = base_config("moutard");
      if (mcomplete->parsed()) {
        cfg["subcommand"] = "complete";
        cfg["params"] = {{"p", mout_p}, {"q", mout_q}, {"kappa", mout_kappa},
                         {"f", mout_f},  {"fi", mout_fi}, {"fj", mout_fj}};
      } else {
        cfg["subcommand"] = "family";
        cfg["input"] = mout_in;
        cfg["params"] = {{"t", mout_t}, {"path", mout_path}};
      }
    } else if (exp->parsed()) {
      cfg = base_config("export");
      cfg["input"] = export_in;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return SKEWNET_E_VALIDATION;
  }

  return run_config(cfg, true);
}
