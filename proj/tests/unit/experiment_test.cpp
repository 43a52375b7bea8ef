#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "convpot/experiment.hpp"
#include "doctest.h"

using namespace convpot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("convpot_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig config(const std::string& text, const fs::path& out, int jobs = 1, bool cache = false) {
  ExperimentConfig c = ExperimentConfig::parse(text);
  c.output = out.string();
  c.jobs = jobs;
  c.cache = cache;
  return c;
}

const char* kSquare = R"({"domain": {"kind": "regular_polygon", "n": 4, "label": "square"}, "n_min": 1, "n_max": 12})";

ErrorCode parse_code(const std::string& text) {
  try {
    ExperimentConfig::parse(text).check();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("fit recovers planted constants") {
  std::vector<SweepRecord> recs;
  for (int n = 2; n <= 40; ++n) {
    SweepRecord r;
    r.n = n;
    r.D = 0.7 * std::sqrt(std::log(n) / n);
    r.eps = r.D * r.D;
    r.sup_norm = 3.0 * std::pow(n, 0.8);
    r.lambda_cap_n = 0.5 / (n * n);
    recs.push_back(r);
  }
  const auto f = fit_constants(recs);
  CHECK(f.thm1_c == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(f.thm1_residual < 1e-12);
  CHECK(f.thm1_ratio_spread == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.thm2_C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.c2 == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(f.c1 == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f.c3 == doctest::Approx(0.5).epsilon(1e-12));

  recs.resize(7);
  CHECK_THROWS_WITH_AS(fit_constants(recs), doctest::Contains("InsufficientData"), Error);
}

TEST_CASE("config validation names the offending key") {
  CHECK(parse_code(kSquare) == ErrorCode::Ok);
  CHECK(parse_code("{not json") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"domain": {"kind": "regular_polygon", "n": 4}, "bogus": 1})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"domain": {"kind": "regular_polygon", "n": 4}, "n_min": 5, "n_max": 3})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"domain": {"kind": "regular_polygon", "n": 4}, "n_max": 81})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"domain": {"kind": "polygon", "vertices": [[0,0],[1,0],[2,0],[0,1]]}})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"domain": {"kind": "disk", "center": [0,0], "radius": 1, "label": "a b"}})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"domain": {"kind": "regular_polygon", "n": 4}, "chebyshev": {"grid": 100}})") ==
        ErrorCode::ConfigError);
}

TEST_CASE("canonical form and hash follow the content") {
  const auto a = ExperimentConfig::parse(kSquare);
  auto b = ExperimentConfig::parse(kSquare);
  CHECK(a.hash() == b.hash());
  b.n_max = 13;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("unknown subcommands and missing domains fail at the config stage") {
  try {
    run_experiment("nope", config(kSquare, scratch("nope")));
    FAIL("expected a throw");
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
  }
  try {
    run_experiment("sweep", config("{}", scratch("empty")));
    FAIL("expected a throw");
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

TEST_CASE("numerical failures name their stage") {
  const char* text = R"({"domain": {"kind": "ellipse", "center": [0,0], "a": 2, "b": 1},
                         "weight": {"type": "dist-power", "m": 1}, "n_max": 4})";
  try {
    run_experiment("orthopoly", config(text, scratch("stage")));
    FAIL("expected a throw");
  } catch (const StageError& e) {
    CHECK(e.stage() == "quadrature");
  }
}

TEST_CASE("sweeps are identical across thread counts and with a warm cache") {
  const fs::path a = scratch("jobs1"), b = scratch("jobs3"), c = scratch("warm");
  run_experiment("sweep", config(kSquare, a, 1, false));
  run_experiment("sweep", config(kSquare, b, 3, false));
  CHECK(slurp(a / "sweep_square.csv") == slurp(b / "sweep_square.csv"));

  run_experiment("sweep", config(kSquare, c, 1, true));  // cold, fills the cache
  CHECK(fs::exists(c / "cache"));
  CHECK_FALSE(fs::is_empty(c / "cache"));
  const std::string cold = slurp(c / "sweep_square.csv");
  run_experiment("sweep", config(kSquare, c, 2, true));  // warm
  CHECK(slurp(c / "sweep_square.csv") == cold);
  CHECK(cold == slurp(a / "sweep_square.csv"));
}

TEST_CASE("square sweep keeps D_n / sqrt(eps_n) free of jumps") {
  const fs::path out = scratch("thm2");
  const auto r = run_experiment("theorem2", config(kSquare, out));
  std::ifstream in(out / "theorem2.csv");
  std::string line;
  std::getline(in, line);
  double prev = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const double ratio = std::stod(line.substr(line.rfind(',') + 1));
    if (prev > 0.0) {
      CHECK(ratio <= 3.0 * prev);
      CHECK(ratio >= prev / 3.0);
    }
    prev = ratio;
    ++rows;
  }
  CHECK(rows == 12);
  CHECK(r.summary.find("global_C") != std::string::npos);
  CHECK(fs::exists(out / "theorem2_summary.json"));
}

TEST_CASE("disk fit sits at the noise floor") {
  const fs::path out = scratch("diskfit");
  const char* text = R"({"domain": {"kind": "disk", "center": [0,0], "radius": 1, "label": "disk"}, "n_min": 1, "n_max": 12})";
  run_experiment("fit", config(text, out));
  std::ifstream in(out / "fit.csv");
  std::string line;
  bool seen = false;
  while (std::getline(in, line))
    if (line.rfind("disk,thm1_c,", 0) == 0) {
      CHECK(std::abs(std::stod(line.substr(12))) < 1e-12);
      seen = true;
    }
  CHECK(seen);
}

TEST_CASE("every subcommand writes its CSV and summary") {
  const char* text = R"({"domains": [{"kind": "regular_polygon", "n": 4, "label": "sq"},
                                     {"kind": "disk", "center": [0,0], "radius": 1, "label": "disk"}],
                         "n_min": 1, "n_max": 10})";
  const fs::path out = scratch("all");
  const std::pair<const char*, const char*> expected[] = {
      {"validate", "validate.csv"},   {"map", "map.csv"},           {"orthopoly", "orthopoly.csv"},
      {"zeros", "zeros.csv"},         {"sweep", "sweep_sq.csv"},    {"theorem2", "theorem2.csv"},
      {"example1", "example1.csv"},   {"faber", "faber.csv"},       {"chebyshev", "chebyshev.csv"},
      {"fit", "fit.csv"}};
  for (const auto& [cmd, file] : expected) {
    run_experiment(cmd, config(text, out, 1, true));
    CHECK_MESSAGE(fs::exists(out / file), cmd);
    CHECK_MESSAGE(fs::exists(out / (std::string(cmd) + "_summary.json")), cmd);
  }
  CHECK(fs::exists(out / "exterior_sq.json"));
  CHECK(fs::exists(out / "ortho_sq.json"));
  // zeros rows: domain, n, re, im, flag
  std::ifstream in(out / "zeros.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "domain,n,re,im,flag");
}
