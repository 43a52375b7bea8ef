#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "convpot/capi.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONVPOT_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("convpot_cli_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("handles round-trip through JSON") {
  cp_domain* d = nullptr;
  REQUIRE(cp_domain_from_json(R"({"kind": "regular_polygon", "n": 5})", &d) == CP_OK);
  int loc = -1;
  CHECK(cp_domain_contains(d, 0.0, 0.0, &loc) == CP_OK);
  CHECK(loc == CP_INTERIOR);
  CHECK(cp_domain_contains(d, 1.0, 0.0, &loc) == CP_OK);
  CHECK(loc == CP_BOUNDARY);

  cp_exterior_map* m = nullptr;
  REQUIRE(cp_exterior_map_build(d, &m) == CP_OK);
  char* text = nullptr;
  REQUIRE(cp_exterior_map_to_json(m, &text) == CP_OK);
  cp_exterior_map* m2 = nullptr;
  REQUIRE(cp_exterior_map_from_json(text, &m2) == CP_OK);
  cp_string_free(text);
  double a[2], b[2], c1, c2;
  CHECK(cp_exterior_map_eval(m, 2.0, 1.0, &a[0], &a[1]) == CP_OK);
  CHECK(cp_exterior_map_eval(m2, 2.0, 1.0, &b[0], &b[1]) == CP_OK);
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
  double z[2];
  CHECK(cp_exterior_map_eval_inverse(m, a[0], a[1], &z[0], &z[1]) == CP_OK);
  CHECK(std::abs(z[0] - 2.0) + std::abs(z[1] - 1.0) < 1e-9);
  CHECK(cp_exterior_map_capacity(m, &c1) == CP_OK);
  CHECK(cp_exterior_map_capacity(m2, &c2) == CP_OK);
  CHECK(c1 == c2);

  cp_interior_map* im = nullptr;
  REQUIRE(cp_interior_map_build(d, &im) == CP_OK);
  CHECK(cp_interior_map_eval(im, 0.0, 0.0, &z[0], &z[1]) == CP_OK);
  CHECK(std::abs(z[0]) + std::abs(z[1]) < 1e-14);

  cp_ortho* s = nullptr;
  REQUIRE(cp_ortho_build(d, 0.0, 10, 0, &s) == CP_OK);
  REQUIRE(cp_ortho_to_json(s, &text) == CP_OK);
  cp_ortho* s2 = nullptr;
  REQUIRE(cp_ortho_from_json(text, &s2) == CP_OK);
  cp_string_free(text);
  int deg = 0;
  CHECK(cp_ortho_degree(s2, &deg) == CP_OK);
  CHECK(deg == 10);
  double l1, l2;
  CHECK(cp_ortho_log_lambda(s, 10, &l1) == CP_OK);
  CHECK(cp_ortho_log_lambda(s2, 10, &l2) == CP_OK);
  CHECK(l1 == l2);

  cp_zeros* zs = nullptr;
  REQUIRE(cp_zeros_compute(s, d, 7, &zs) == CP_OK);
  CHECK(cp_zeros_count(zs) == 7);
  for (size_t i = 0; i < 7; ++i) {
    double re, imv;
    CHECK(cp_zeros_get(zs, i, &re, &imv, &loc) == CP_OK);
    CHECK(loc != CP_EXTERIOR);
    double q[2];
    CHECK(cp_ortho_eval(s, 7, re, imv, &q[0], &q[1]) == CP_OK);
    CHECK(std::hypot(q[0], q[1]) < 1e-8);
  }
  CHECK(cp_zeros_get(zs, 7, nullptr, nullptr, nullptr) == CP_INVALID_ARGUMENT);

  cp_zeros_free(zs);
  cp_ortho_free(s);
  cp_ortho_free(s2);
  cp_interior_map_free(im);
  cp_exterior_map_free(m);
  cp_exterior_map_free(m2);
  cp_domain_free(d);
}

TEST_CASE("error codes and messages") {
  cp_domain* d = nullptr;
  CHECK(cp_domain_from_json("{oops", &d) == CP_CONFIG_ERROR);
  CHECK(std::string(cp_last_error()).size() > 0);
  CHECK(cp_domain_from_json(R"({"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0.9,0.5],[0,1]]})", &d) ==
        CP_NON_CONVEX);
  CHECK(cp_domain_from_json(R"({"kind": "disk", "center": [0,0], "radius": 0})", &d) == CP_DEGENERATE);
  CHECK(cp_exterior_map_build(nullptr, nullptr) == CP_INVALID_ARGUMENT);
  CHECK(std::string(cp_status_name(CP_LAWSON_STALL)) == "LawsonStall");
  CHECK(std::string(cp_status_name(CP_INTERNAL)) == "Internal");
  CHECK(std::string(cp_version()).size() > 0);

  char* summary = nullptr;
  char* stage = nullptr;
  CHECK(cp_run("sweep", "{\"bogus\": 1}", nullptr, &summary, &stage) == CP_CONFIG_ERROR);
  REQUIRE(stage != nullptr);
  CHECK(std::string(stage) == "config");
  CHECK(summary == nullptr);
  cp_string_free(stage);
}

TEST_CASE("cp_run applies the overrides") {
  const fs::path out = fs::temp_directory_path() / "convpot_capi_run";
  fs::remove_all(out);
  cp_run_options o{};
  const std::string dir = out.string();
  o.out_dir = dir.c_str();
  o.n_max = 3;
  o.no_cache = 1;
  char* summary = nullptr;
  char* stage = nullptr;
  REQUIRE(cp_run("orthopoly", R"({"domain": {"kind": "regular_polygon", "n": 4, "label": "sq"}, "n_max": 30})", &o,
                 &summary, &stage) == CP_OK);
  CHECK(stage == nullptr);
  CHECK(std::string(summary).find("\"orthopoly\"") != std::string::npos);
  cp_string_free(summary);
  std::ifstream in(out / "orthopoly.csv");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 1 + 3);  // header and n = 1..3
  CHECK_FALSE(fs::exists(out / "cache"));
}

TEST_CASE("command-line exit codes") {
  const auto ok = write("ok.json", R"({"domain": {"kind": "regular_polygon", "n": 4}, "n_max": 3})");
  const auto bad_key = write("bad.json", R"({"domain": {"kind": "regular_polygon", "n": 4}, "bogus": 1})");
  const auto nonconvex = write("nc.json", R"({"domain": {"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0.9,0.5],[0,1]]}})");
  const auto numeric = write("num.json", R"({"domain": {"kind": "ellipse", "center": [0,0], "a": 2, "b": 1},
                                           "weight": {"type": "dist-power", "m": 1}, "n_max": 3})");
  const std::string out = (fs::temp_directory_path() / "convpot_cli_out").string();
  CHECK(run_cli("validate --config " + ok.string() + " --out " + out) == 0);
  CHECK(run_cli("zeros --config " + ok.string() + " --out " + out + " --n-max 4 --jobs 2 --no-cache") == 0);
  CHECK(run_cli("example1 --out " + out) == 0);
  CHECK(run_cli("validate --config " + bad_key.string()) == 2);
  CHECK(run_cli("validate --config " + nonconvex.string()) == 2);
  CHECK(run_cli("sweep --config /nonexistent/file.json") == 2);
  CHECK(run_cli("sweep") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("sweep --config " + ok.string() + " --jobs 0") == 2);
  CHECK(run_cli("orthopoly --config " + numeric.string() + " --out " + out) == 3);
  CHECK(run_cli("--version") == 0);
}
