// Exercises the C API surface of the shared library and the CLI binary
// end to end (job configs, exit codes, artifacts, determinism).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "skewnet/json_io.hpp"
#include "skewnet/skewnet_c.h"

using nlohmann::json;

namespace {

std::string tmp(const char* name) { return std::string("/tmp/skewnet_capi_") + name; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// the (i, j, -j, -i) quad as a net JSON
json quad_net() {
  json qi = {{"alg", "quat"}, {"w", 0}, {"x", 1}, {"y", 0}, {"z", 0}};
  json qj = {{"alg", "quat"}, {"w", 0}, {"x", 0}, {"y", 1}, {"z", 0}};
  json mqi = {{"alg", "quat"}, {"w", 0}, {"x", -1}, {"y", 0}, {"z", 0}};
  json mqj = {{"alg", "quat"}, {"w", 0}, {"x", 0}, {"y", -1}, {"z", 0}};
  return {{"dim", 2},
          {"extents", {1, 1}},
          {"algebra", "quat"},
          {"edges", {{"1", {qi, mqj}}, {"2", {qj, mqi}}}}};
}

struct JobResult {
  int status;
  json report;
  std::string error;
};

JobResult run(const json& cfg) {
  skewnet_job* job = skewnet_job_run(cfg.dump().c_str());
  JobResult r{skewnet_job_status(job), json::parse(skewnet_job_report(job), nullptr, false),
              skewnet_job_error(job)};
  skewnet_job_free(job);
  return r;
}

}  // namespace

TEST_CASE("verify job on the model quad") {
  std::string net_path = tmp("quad.json");
  write_file(net_path, quad_net().dump());
  JobResult r = run({{"command", "verify"}, {"input", net_path}});
  CHECK(r.status == SKEWNET_OK);
  CHECK(r.report["additive_residual"].get<double>() <= 1e-14);
  CHECK(r.report["multiplicative_residual"].get<double>() <= 1e-14);
  CHECK(r.report["labelling_pass"].get<bool>());
  std::remove(net_path.c_str());
}

TEST_CASE("verify flags a corrupted quad with exit 3") {
  json net = quad_net();
  net["edges"]["1"][1]["x"] = -0.9;  // break the multiplicative equation
  std::string net_path = tmp("bad_quad.json");
  write_file(net_path, net.dump());
  JobResult r = run({{"command", "verify"}, {"input", net_path}});
  CHECK(r.status == SKEWNET_E_NUMERICAL);
  std::remove(net_path.c_str());
}

TEST_CASE("factor job reproduces the printed factorizations") {
  json poly = {{"coeffs",
                json::array({json{{"alg", "mat2"}, {"a", {1, 0}}, {"b", {0, 0}}, {"c", {0, 0}}, {"d", {1, 0}}},
                             json{{"alg", "mat2"}, {"a", {0, 0}}, {"b", {2, 0}}, {"c", {-2, 0}}, {"d", {0, 0}}},
                             json{{"alg", "mat2"}, {"a", {-2, 0}}, {"b", {0, 0}}, {"c", {0, 0}}, {"d", {-2, 0}}}})}};
  std::string poly_path = tmp("example.json");
  std::string cube_path = tmp("cube.json");
  write_file(poly_path, poly.dump());

  JobResult r = run({{"command", "factor"},
                     {"input", poly_path},
                     {"emit", cube_path},
                     {"params", {{"pairing", "conjugate"}, {"form", "unit"}}}});
  REQUIRE(r.status == SKEWNET_OK);
  CHECK(r.report["path_residual"].get<double>() <= 1e-9);
  const json& f0 = r.report["factors"][0];  // rightmost: [[-1, 1], [-1, -1]]
  CHECK(f0["a"][0].get<double>() == doctest::Approx(-1));
  CHECK(f0["b"][0].get<double>() == doctest::Approx(1));
  CHECK(f0["c"][0].get<double>() == doctest::Approx(-1));
  CHECK(f0["d"][0].get<double>() == doctest::Approx(-1));
  const json& f1 = r.report["factors"][1];  // leftmost: [[1, 1], [-1, 1]]
  CHECK(f1["a"][0].get<double>() == doctest::Approx(1));
  CHECK(f1["d"][0].get<double>() == doctest::Approx(1));

  // explicit cross pairing gives the zero-folded factors
  json pairs = json::array({json::array({json::array({1, 1}), json::array({-1, -1})}),
                            json::array({json::array({-1, 1}), json::array({1, -1})})});
  JobResult z = run({{"command", "factor"},
                     {"input", poly_path},
                     {"params", {{"pairing", "explicit"}, {"pairs", pairs}, {"form", "unit"}}}});
  REQUIRE(z.status == SKEWNET_OK);
  const json& z0 = z.report["factors"][0];  // [[0, 1 - i], [-1 + i, 0]]
  CHECK(z0["a"][0].get<double>() == doctest::Approx(0));
  CHECK(z0["b"][0].get<double>() == doctest::Approx(1));
  CHECK(z0["b"][1].get<double>() == doctest::Approx(-1));
  CHECK(z0["c"][0].get<double>() == doctest::Approx(-1));
  CHECK(z0["c"][1].get<double>() == doctest::Approx(1));

  std::remove(poly_path.c_str());
  std::remove(cube_path.c_str());
}

TEST_CASE("evolve job fills a partial net") {
  json qi = {{"alg", "quat"}, {"w", 0}, {"x", 1}, {"y", 0}, {"z", 0}};
  json qj = {{"alg", "quat"}, {"w", 0}, {"x", 0}, {"y", 1}, {"z", 0}};
  json qk2 = {{"alg", "quat"}, {"w", 0}, {"x", 0}, {"y", 0}, {"z", 2}};
  json net = {{"dim", 2},
              {"extents", {2, 2}},
              {"algebra", "quat"},
              {"edges",
               {{"1", {qi, nullptr, nullptr, qi, nullptr, nullptr}},
                {"2", {qj, qk2, nullptr, nullptr, nullptr, nullptr}}}}};
  std::string in = tmp("axes.json"), out = tmp("filled.json");
  write_file(in, net.dump());
  JobResult r = run({{"command", "evolve"}, {"input", in}, {"emit", out}});
  REQUIRE(r.status == SKEWNET_OK);
  CHECK(r.report["edges"].get<int>() == 12);
  CHECK(r.report["quad_residual"].get<double>() <= 1e-12);
  json filled = json::parse(read_file(out));
  for (const json& e : filled["edges"]["1"]) CHECK(!e.is_null());
  std::remove(in.c_str());
  std::remove(out.c_str());
}

TEST_CASE("knet job emits a surface") {
  // flat planar net: straight asymptotic lines i and cos(a) i + sin(a) j
  using skewnet::algebra::Quaternion;
  skewnet::lattice::EdgeNet net{skewnet::lattice::LatticeBox({4, 4})};
  Quaternion u = skewnet::algebra::quat_i();
  Quaternion v{0, std::cos(0.9), std::sin(0.9), 0};
  std::vector<std::vector<skewnet::lattice::Value>> axes(2);
  axes[0].assign(4, skewnet::lattice::Value(u));
  axes[1].assign(4, skewnet::lattice::Value(v));
  net = skewnet::lattice::fill_box(axes);
  std::string in = tmp("planar.json"), out = tmp("knet.obj");
  skewnet::io::write_json_file(in, skewnet::io::net_to_json(net));
  JobResult r = run({{"command", "surface"},
                     {"subcommand", "knet"},
                     {"input", in},
                     {"emit", out},
                     {"params", {{"t", 0.7}}}});
  REQUIRE(r.status == SKEWNET_OK);
  CHECK(!read_file(out).empty());
  std::remove(in.c_str());
  std::remove(out.c_str());
}

TEST_CASE("surface and moutard jobs") {
  using skewnet::Scalar;
  // 2D cross-ratio seed with unitary labels for the C- pipeline
  skewnet::lattice::LatticeBox box({5, 5});
  std::vector<Scalar> f(box.vertex_count());
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j <= 5; ++j) f[box.vertex_index({i, j})] = Scalar(i, j);
  Scalar a1 = std::exp(Scalar(0, M_PI / 4)), a2 = std::exp(Scalar(0, 3 * M_PI / 4));
  skewnet::surfaces::CrossRatioLattice seed = skewnet::surfaces::make_cross_ratio_lattice(
      box, f, {std::vector<Scalar>(5, a1), std::vector<Scalar>(5, a2)});
  std::string seed_path = tmp("seed.json");
  skewnet::io::write_json_file(seed_path, skewnet::io::seed_to_json(seed));

  std::string mesh_path = tmp("mesh.obj");
  JobResult r = run({{"command", "surface"},
                     {"subcommand", "dpw"},
                     {"seed", seed_path},
                     {"emit", mesh_path},
                     {"params", {{"mode", "cminus"}, {"extents", {5, 5, 5, 5}}, {"t", 0.4}}}});
  REQUIRE(r.status == SKEWNET_OK);
  CHECK(r.report["pattern_residual"].get<double>() <= 1e-9);
  CHECK(!read_file(mesh_path).empty());

  // cmc-cube on a non-unitary C+ seed
  skewnet::surfaces::CrossRatioLattice pseed = skewnet::surfaces::make_cross_ratio_lattice(
      box, f, {std::vector<Scalar>(5, Scalar(1.2)), std::vector<Scalar>(5, Scalar(0, 1.2))});
  std::string pseed_path = tmp("pseed.json");
  skewnet::io::write_json_file(pseed_path, skewnet::io::seed_to_json(pseed));
  r = run({{"command", "surface"},
           {"subcommand", "cmc-cube"},
           {"seed", pseed_path},
           {"params", {{"extents", {5, 5, 5, 5}}}}});
  REQUIRE(r.status == SKEWNET_OK);
  CHECK(r.report["form_residual"].get<double>() <= 1e-8);
  CHECK(r.report["w_norm_deviation"].get<double>() <= 1e-9);

  // moutard family on a generated quadric net
  skewnet::moutard::QuadricNet qnet = skewnet::moutard::random_moutard_net(3, 0, 1.0, {4, 4}, 11);
  std::string net_path = tmp("quadric.json");
  skewnet::io::write_json_file(net_path, skewnet::io::quadric_to_json(qnet));
  r = run({{"command", "moutard"},
           {"subcommand", "family"},
           {"input", net_path},
           {"params", {{"t", 0.4}, {"path", "trig"}}}});
  REQUIRE(r.status == SKEWNET_OK);
  CHECK(r.report["quadric_residual"].get<double>() <= 1e-9);

  std::remove(seed_path.c_str());
  std::remove(pseed_path.c_str());
  std::remove(mesh_path.c_str());
  std::remove(net_path.c_str());
}

TEST_CASE("validation failures") {
  JobResult r = run(json{{"command", "frobnicate"}});
  CHECK(r.status == SKEWNET_E_VALIDATION);
  r = run(json{{"command", "verify"}, {"input", tmp("quad.json")}, {"wrong_field", 1}});
  CHECK(r.status == SKEWNET_E_VALIDATION);
  CHECK(r.error.find("wrong_field") != std::string::npos);

  skewnet_job* job = skewnet_job_run("{ not json");
  CHECK(skewnet_job_status(job) == SKEWNET_E_VALIDATION);
  skewnet_job_free(job);

  r = run(json{{"command", "verify"}, {"input", "/nonexistent/net.json"}});
  CHECK(r.status == SKEWNET_E_IO);
}

#ifdef SKEWNET_CLI_PATH
TEST_CASE("CLI end to end") {
  std::string net_path = tmp("cli_quad.json");
  write_file(net_path, quad_net().dump());
  std::string cmd = std::string(SKEWNET_CLI_PATH) + " verify --net " + net_path + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);

  // helix construction, OBJ artifact, determinism across runs
  std::string obj1 = tmp("helix1.obj"), obj2 = tmp("helix2.obj");
  std::string base = std::string(SKEWNET_CLI_PATH) +
                     " curve ninvariant --E 1,0,0,1 --vs 2,0,1,0 --steps 20 --emit ";
  CHECK(std::system((base + obj1 + " > /dev/null").c_str()) == 0);
  CHECK(std::system((base + obj2 + " > /dev/null").c_str()) == 0);
  std::string a = read_file(obj1), b = read_file(obj2);
  CHECK(!a.empty());
  CHECK(a == b);

  // sidecar report and exit 2 on an unknown flag value
  std::string rep = tmp("report.json");
  std::string cmd2 = std::string(SKEWNET_CLI_PATH) + " verify --net " + net_path +
                     " --report " + rep + " > /dev/null";
  CHECK(std::system(cmd2.c_str()) == 0);
  json sidecar = json::parse(read_file(rep), nullptr, false);
  REQUIRE(!sidecar.is_discarded());
  CHECK(sidecar["command"] == "verify");

  std::string bad = std::string(SKEWNET_CLI_PATH) + " verify --net /nonexistent.json 2> /dev/null > /dev/null";
  int code = std::system(bad.c_str());
  CHECK(WEXITSTATUS(code) == SKEWNET_E_IO);

  std::remove(net_path.c_str());
  std::remove(obj1.c_str());
  std::remove(obj2.c_str());
  std::remove(rep.c_str());
}
#endif
