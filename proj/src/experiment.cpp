#include "convpot/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "convpot/classical.hpp"
#include "convpot/conformal.hpp"
#include "convpot/measures.hpp"
#include "convpot/zeros.hpp"
#include "json_io.hpp"

namespace convpot {

namespace fs = std::filesystem;
using io::json;

namespace {

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.compare(0, prefix.size(), prefix) == 0) msg.erase(0, prefix.size());
    throw StageError(stage, e.code(), msg);
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorCode::InvalidArgument, e.what());
  }
}

std::string default_label(const DomainSpec& s, std::size_t index) {
  switch (s.kind) {
    case DomainKind::Disk: return "disk" + std::to_string(index);
    case DomainKind::Ellipse: return "ellipse" + std::to_string(index);
    case DomainKind::Polygon: return std::to_string(s.vertices.size()) + "gon" + std::to_string(index);
  }
  return "domain" + std::to_string(index);
}

json weight_json(const Weight& w) {
  if (w.is_unit()) return "unit";
  return {{"type", "dist-power"}, {"m", w.m}};
}

// ------------------------------------------------------------------ output

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row_strings(header); }

  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> v{cell(cells)...};
    if (v.size() != cols_) throw Error(ErrorCode::IoError, "csv row width mismatch");
    row_strings(v);
  }
  const std::string& text() const { return text_; }

 private:
  static std::string cell(double x) { return num(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }

  void row_strings(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) text_ += ',';
      text_ += v[i];
    }
    text_ += '\n';
  }
  std::size_t cols_;
  std::string text_;
};

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StageError("output", ErrorCode::IoError, "cannot create '" + dir + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw StageError("output", ErrorCode::IoError, "cannot write " + p.string());
    files_.push_back(p.string());
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

/// Maps and sequences as JSON under <output>/cache, keyed by content hash.
class Cache {
 public:
  Cache(const std::string& out, bool enabled) : dir_(fs::path(out) / "cache"), enabled_(enabled) {}

  std::optional<std::string> get(const std::string& key) const {
    if (!enabled_) return std::nullopt;
    std::ifstream f(dir_ / (key + ".json"), std::ios::binary);
    if (!f) return std::nullopt;
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  void put(const std::string& key, const std::string& text) const {
    if (!enabled_) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const fs::path tmp = dir_ / (key + ".tmp"), dst = dir_ / (key + ".json");
    {
      std::ofstream f(tmp, std::ios::binary);
      f << text;
      if (!f) return;  // a cache that cannot be written is not an error
    }
    fs::rename(tmp, dst, ec);
  }

 private:
  fs::path dir_;
  bool enabled_;
};

// ---------------------------------------------------------------- pipeline

/// Runs task(i) for i in [0, count) on `jobs` threads. Results land in slots,
/// so the output order never depends on scheduling. The lowest failing index
/// wins when several tasks throw.
template <class T, class F>
std::vector<T> parallel_map(int count, int jobs, F&& task) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> err(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[i] = task(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min(jobs, count));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

struct Context {
  const ExperimentConfig& cfg;
  Cache cache;
  Output out;
};

ExteriorMap exterior_map(Context& ctx, const ConvexDomain& d) {
  return staged("exterior_map", [&] {
    const std::string key = std::string("emap_") + kVersion + "_" + d.hash();
    if (auto text = ctx.cache.get(key)) return ExteriorMap::from_json(*text);
    ExteriorMap m = ExteriorMap::build(d);
    ctx.cache.put(key, m.to_json());
    return m;
  });
}

InteriorMap interior_map(Context& ctx, const ConvexDomain& d) {
  return staged("interior_map", [&] {
    const std::string key = std::string("imap_") + kVersion + "_" + d.hash();
    if (auto text = ctx.cache.get(key)) return InteriorMap::from_json(*text);
    InteriorMap m = InteriorMap::build(d);
    ctx.cache.put(key, m.to_json());
    return m;
  });
}

OrthoSequence ortho_sequence(Context& ctx, const ConvexDomain& d) {
  const auto& c = ctx.cfg;
  const std::string key = std::string("ortho_") + kVersion + "_" + d.hash() + "_" +
                          fnv1a(weight_json(c.weight).dump() + "/" + std::to_string(c.n_max) + "/" +
                                std::to_string(c.quadrature_extra));
  if (auto text = ctx.cache.get(key)) return staged("orthopoly", [&] { return OrthoSequence::from_json(*text); });
  const auto engine = staged("quadrature", [&] {
    return InnerProductEngine::build(d, c.weight, c.n_max, c.quadrature_extra);
  });
  OrthoSequence s = staged("orthopoly", [&] { return orthonormalize(engine, c.n_max); });
  ctx.cache.put(key, s.to_json());
  return s;
}

ConvexDomain make_domain(const LabeledDomain& ld) {
  return staged("domain[" + ld.label + "]", [&] { return ConvexDomain(ld.spec); });
}

std::vector<int> degrees(const ExperimentConfig& c, int lowest = 0) {
  std::vector<int> v;
  for (int n = std::max(c.n_min, lowest); n <= c.n_max; ++n) v.push_back(n);
  return v;
}

std::vector<SweepRecord> sweep_domain(Context& ctx, const ConvexDomain& d, const std::string& label) {
  const ExteriorMap emap = exterior_map(ctx, d);
  const InteriorMap imap = interior_map(ctx, d);
  const OrthoSequence seq = ortho_sequence(ctx, d);
  const BoundaryProbe probe = staged("potential_gap", [&] { return BoundaryProbe::build(emap); });
  const double cap = emap.capacity();
  const auto ns = degrees(ctx.cfg, 1);
  return parallel_map<SweepRecord>(static_cast<int>(ns.size()), ctx.cfg.jobs, [&](int i) {
    const int n = ns[i];
    const std::string tag = "[" + label + ", n=" + std::to_string(n) + "]";
    SweepRecord r;
    r.n = n;
    const ZeroSet zs = staged("zeros" + tag, [&] { return zeros_of(seq, n, d); });
    r.interior = zs.count(Location::Interior);
    r.boundary = zs.count(Location::Boundary);
    r.exterior = zs.count(Location::Exterior);
    r.D = staged("discrepancy" + tag, [&] {
      const auto grid = measure_grid(emap, &imap, &zs);
      const auto mu = equilibrium_boundary_measure(emap, grid);
      const auto tau = balayage_measure(imap, zs, grid);
      return discrepancy(mu, tau).D;
    });
    r.eps = staged("potential_gap" + tag, [&] { return potential_gap(seq, n, emap, probe).epsilon; });
    r.sup_norm = staged("sup_norm" + tag, [&] { return seq.sup_norm(n, d); });
    r.lambda_cap_n = seq.leading_product(n, cap);
    return r;
  });
}

std::string sweep_csv(const std::vector<SweepRecord>& recs) {
  Csv csv({"n", "D", "eps", "sup_norm", "lambda_cap_n", "ratio_thm1", "ratio_thm2", "interior", "boundary",
           "exterior"});
  for (const auto& r : recs) {
    const double x = r.n >= 2 ? std::sqrt(std::log(r.n) / r.n) : 0.0;
    csv.row(r.n, r.D, r.eps, r.sup_norm, r.lambda_cap_n, x > 0.0 ? r.D / x : 0.0,
            r.D / std::sqrt(std::max(r.eps, 1e-12)), r.interior, r.boundary, r.exterior);
  }
  return csv.text();
}

json fit_json(const FittedConstants& f) {
  return {{"thm1_c", f.thm1_c},           {"thm1_residual", f.thm1_residual},
          {"thm1_ratio_spread", f.thm1_ratio_spread}, {"thm2_C", f.thm2_C},
          {"c1", f.c1},                   {"c2", f.c2},
          {"c2_residual", f.c2_residual}, {"c3", f.c3},
          {"points", f.points}};
}

// ------------------------------------------------------------ subcommands

json cmd_validate(Context& ctx) {
  Csv csv({"label", "kind", "perimeter", "area", "diameter", "centroid_re", "centroid_im", "hash"});
  json doms = json::array();
  for (const auto& ld : ctx.cfg.domains) {
    const ConvexDomain d = make_domain(ld);
    const char* kind = d.kind() == DomainKind::Disk ? "disk" : d.kind() == DomainKind::Ellipse ? "ellipse" : "polygon";
    csv.row(ld.label, kind, d.perimeter(), d.area(), d.diameter(), d.centroid().real(), d.centroid().imag(), d.hash());
    doms.push_back({{"label", ld.label}, {"kind", kind}, {"hash", d.hash()}, {"valid", true}});
  }
  ctx.out.write("validate.csv", csv.text());
  return {{"domains", doms}};
}

json cmd_map(Context& ctx) {
  Csv csv({"domain", "map", "s", "theta"});
  json doms = json::array();
  for (const auto& ld : ctx.cfg.domains) {
    const ConvexDomain d = make_domain(ld);
    const ExteriorMap emap = exterior_map(ctx, d);
    ctx.out.write("exterior_" + ld.label + ".json", emap.to_json());
    for (std::size_t i = 0; i < emap.table().s.size(); ++i)
      csv.row(ld.label, "exterior", emap.table().s[i], emap.table().theta[i]);
    json entry = {{"label", ld.label}, {"capacity", emap.capacity()}, {"table_size", emap.table().s.size()}};
    if (d.kind() != DomainKind::Ellipse) {
      const InteriorMap imap = interior_map(ctx, d);
      ctx.out.write("interior_" + ld.label + ".json", imap.to_json());
      for (std::size_t i = 0; i < imap.table().s.size(); ++i)
        csv.row(ld.label, "interior", imap.table().s[i], imap.table().theta[i]);
      entry["interior_scale"] = imap.scale();
    }
    doms.push_back(entry);
  }
  ctx.out.write("map.csv", csv.text());
  return {{"domains", doms}};
}

json cmd_orthopoly(Context& ctx) {
  const auto& c = ctx.cfg;
  Csv csv({"domain", "n", "lambda", "log_lambda", "lambda_cap_n", "n2_lambda_cap_n", "sup_norm"});
  json doms = json::array();
  for (const auto& ld : c.domains) {
    const ConvexDomain d = make_domain(ld);
    const ExteriorMap emap = exterior_map(ctx, d);
    const OrthoSequence seq = ortho_sequence(ctx, d);
    ctx.out.write("ortho_" + ld.label + ".json", seq.to_json());
    const auto ns = degrees(c);
    const auto sup = parallel_map<double>(static_cast<int>(ns.size()), c.jobs, [&](int i) {
      return staged("sup_norm", [&] { return seq.sup_norm(ns[i], d); });
    });
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const int n = ns[i];
      const double lc = seq.leading_product(n, emap.capacity());
      csv.row(ld.label, n, seq.lambda(n), seq.log_lambda(n), lc, double(n) * n * lc, sup[i]);
    }
    const double gram = staged("gram_residual", [&] {
      const auto engine = InnerProductEngine::build(d, c.weight, c.n_max, c.quadrature_extra);
      return seq.gram_residual(engine, c.n_max);
    });
    doms.push_back({{"label", ld.label}, {"gram_residual", gram}, {"quadrature_degree", seq.quadrature_degree()}});
  }
  ctx.out.write("orthopoly.csv", csv.text());
  return {{"domains", doms}, {"weight", weight_json(c.weight)}};
}

json cmd_zeros(Context& ctx) {
  const auto& c = ctx.cfg;
  Csv csv({"domain", "n", "re", "im", "flag"});
  json doms = json::array();
  for (const auto& ld : c.domains) {
    const ConvexDomain d = make_domain(ld);
    const OrthoSequence seq = ortho_sequence(ctx, d);
    const auto ns = degrees(c, 1);
    const auto sets = parallel_map<ZeroSet>(static_cast<int>(ns.size()), c.jobs, [&](int i) {
      return staged("zeros[n=" + std::to_string(ns[i]) + "]", [&] { return zeros_of(seq, ns[i], d); });
    });
    std::size_t counts[3] = {0, 0, 0};
    double backward = 0.0;
    for (const auto& zs : sets) {
      for (std::size_t j = 0; j < zs.zeros.size(); ++j) {
        csv.row(ld.label, zs.degree, zs.zeros[j].real(), zs.zeros[j].imag(), to_string(zs.flags[j]));
        ++counts[static_cast<int>(zs.flags[j])];
      }
      backward = std::max(backward, zs.backward_error);
    }
    doms.push_back({{"label", ld.label},
                    {"interior", counts[0]},
                    {"boundary", counts[1]},
                    {"exterior", counts[2]},
                    {"max_backward_error", backward}});
  }
  ctx.out.write("zeros.csv", csv.text());
  return {{"domains", doms}};
}

json cmd_sweep(Context& ctx) {
  json doms = json::array();
  for (const auto& ld : ctx.cfg.domains) {
    const ConvexDomain d = make_domain(ld);
    const auto recs = sweep_domain(ctx, d, ld.label);
    ctx.out.write("sweep_" + ld.label + ".csv", sweep_csv(recs));
    json entry = {{"label", ld.label}, {"degrees", recs.size()}};
    std::size_t ext = 0;
    for (const auto& r : recs) ext += r.exterior;
    entry["exterior_zeros"] = ext;
    if (recs.size() >= 8) entry["fit"] = fit_json(fit_constants(recs));
    doms.push_back(entry);
  }
  return {{"domains", doms}};
}

json cmd_theorem2(Context& ctx) {
  Csv csv({"domain", "n", "D", "eps", "ratio"});
  json per = json::object();
  double lo = INFINITY, hi = 0.0;
  for (const auto& ld : ctx.cfg.domains) {
    const ConvexDomain d = make_domain(ld);
    const auto recs = sweep_domain(ctx, d, ld.label);
    ctx.out.write("sweep_" + ld.label + ".csv", sweep_csv(recs));
    double C = 0.0;
    for (const auto& r : recs) {
      const double ratio = r.D / std::sqrt(std::max(r.eps, 1e-12));
      csv.row(ld.label, r.n, r.D, r.eps, ratio);
      C = std::max(C, ratio);
    }
    per[ld.label] = C;
    lo = std::min(lo, C);
    hi = std::max(hi, C);
  }
  ctx.out.write("theorem2.csv", csv.text());
  return {{"per_domain_C", per}, {"global_C", hi}, {"C_spread", lo > 0.0 ? hi / lo : INFINITY}};
}

json cmd_example1(Context& ctx) {
  Csv csv({"delta", "capacity", "capacity_alt", "interval_mass", "mass_bound", "D", "eps_bound", "ratio",
           "ratio_bound"});
  const double ratio_bound = 2.0 / (3.0 * std::numbers::pi);
  const auto& deltas = ctx.cfg.deltas;
  const auto recs = parallel_map<SharpnessRecord>(static_cast<int>(deltas.size()), ctx.cfg.jobs, [&](int i) {
    return staged("example1", [&] { return sharpness_check(sharpness_instance(deltas[i])); });
  });
  bool ok = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double dl = deltas[i];
    const auto& r = recs[i];
    const double mass_bound = dl / (3.0 * std::numbers::pi);
    csv.row(dl, std::exp(r.log_capacity), 0.25 * (3.0 + dl + 1.0 / (1.0 + dl)), r.interval_mass, mass_bound, r.D,
            r.epsilon_bound, r.ratio, ratio_bound);
    ok = ok && r.interval_mass >= mass_bound && r.ratio >= ratio_bound;
  }
  ctx.out.write("example1.csv", csv.text());
  return {{"inequalities_hold", ok}, {"deltas", deltas}};
}

json cmd_faber(Context& ctx) {
  const auto& c = ctx.cfg;
  Csv csv({"domain", "n", "norm", "deriv_norm", "deriv_ratio", "lead_error"});
  json doms = json::array();
  for (const auto& ld : c.domains) {
    const ConvexDomain d = make_domain(ld);
    const ExteriorMap emap = exterior_map(ctx, d);
    const FaberSequence fs = staged("faber", [&] { return faber(emap, c.n_max + 1); });
    const auto ns = degrees(c);
    struct Row {
      double norm, deriv;
    };
    const auto rows = parallel_map<Row>(static_cast<int>(ns.size()), c.jobs, [&](int i) {
      const int n = ns[i];
      return staged("faber_norms[n=" + std::to_string(n) + "]", [&] {
        Row r;
        r.norm = boundary_sup(d, [&](cplx z) { return std::abs(fs.eval_all(n, z).back()); });
        r.deriv = boundary_sup(d, [&](cplx z) { return std::abs(fs.eval_derivatives(n + 1, z).back()); });
        return r;
      });
    });
    double max_norm = 0.0, rlo = INFINITY, rhi = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const int n = ns[i];
      const double ratio = rows[i].deriv / ((n + 1.0) * (n + 1.0));
      const double lead = std::abs(fs.coeffs[n][n] * std::pow(fs.capacity, n) - 1.0);
      csv.row(ld.label, n, rows[i].norm, rows[i].deriv, ratio, lead);
      max_norm = std::max(max_norm, rows[i].norm);
      rlo = std::min(rlo, ratio);
      rhi = std::max(rhi, ratio);
    }
    double oracle = 0.0;
    for (int n = 1; n <= std::min(15, c.n_max); ++n) {
      const auto o = staged("faber_oracle", [&] { return faber_contour_oracle(emap, n); });
      for (int k = 0; k <= n; ++k) oracle = std::max(oracle, std::abs(o[k] - fs.coeffs[n][k]));
    }
    doms.push_back({{"label", ld.label},
                    {"capacity", fs.capacity},
                    {"max_norm", max_norm},
                    {"deriv_ratio_spread", rhi / rlo},
                    {"oracle_max_diff", oracle}});
  }
  ctx.out.write("faber.csv", csv.text());
  return {{"domains", doms}};
}

json cmd_chebyshev(Context& ctx) {
  const auto& c = ctx.cfg;
  Csv csv({"domain", "n", "norm", "norm_over_cap_n", "lower_over_cap_n", "iterations", "converged"});
  json doms = json::array();
  for (const auto& ld : c.domains) {
    const ConvexDomain d = make_domain(ld);
    const ExteriorMap emap = exterior_map(ctx, d);
    const FaberSequence fs = staged("faber", [&] { return faber(emap, c.n_max); });
    const auto ns = degrees(c, 1);
    const auto res = parallel_map<ChebyshevResult>(static_cast<int>(ns.size()), c.jobs, [&](int i) {
      return staged("chebyshev[n=" + std::to_string(ns[i]) + "]", [&] {
        return chebyshev(emap, fs, ns[i], c.chebyshev_grid, c.chebyshev_spread, c.chebyshev_max_iter);
      });
    });
    json stalls = json::array();
    double worst = 0.0;
    for (const auto& r : res) {
      const double capn = std::pow(fs.capacity, r.degree);
      csv.row(ld.label, r.degree, r.norm, r.norm / capn, r.lower_bound / capn, r.iterations, r.converged);
      if (!r.converged) stalls.push_back(r.degree);
      worst = std::max(worst, r.norm / capn);
    }
    doms.push_back({{"label", ld.label}, {"max_norm_over_cap_n", worst}, {"lawson_stall", stalls}});
  }
  ctx.out.write("chebyshev.csv", csv.text());
  return {{"domains", doms}};
}

json cmd_fit(Context& ctx) {
  Csv csv({"domain", "constant", "value"});
  json doms = json::object();
  for (const auto& ld : ctx.cfg.domains) {
    const ConvexDomain d = make_domain(ld);
    const auto recs = sweep_domain(ctx, d, ld.label);
    const FittedConstants f = staged("fit[" + ld.label + "]", [&] { return fit_constants(recs); });
    const json j = fit_json(f);
    for (auto it = j.begin(); it != j.end(); ++it) csv.row(ld.label, it.key(), it.value().get<double>());
    doms[ld.label] = j;
  }
  ctx.out.write("fit.csv", csv.text());
  return {{"fit", doms}};
}

}  // namespace

// ------------------------------------------------------------------ config

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  static const char* known[] = {"kind",   "domain",   "domains", "weight", "n_min", "n_max", "quadrature_extra",
                                "chebyshev", "deltas", "output", "cache", "jobs", "comment"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
        std::end(known))
      config_error("unknown config key '" + it.key() + "'");

  ExperimentConfig c;
  try {
    std::vector<json> lits;
    if (j.contains("domain")) lits.push_back(j.at("domain"));
    if (j.contains("domains"))
      for (const auto& e : j.at("domains")) lits.push_back(e);
    for (std::size_t i = 0; i < lits.size(); ++i) {
      LabeledDomain ld;
      ld.spec = io::domain_from_json(lits[i]);
      try {
        validate(ld.spec);
      } catch (const Error& e) {
        config_error(std::string("domain ") + std::to_string(i) + " rejected: " + e.what());
      }
      ld.label = lits[i].value("label", default_label(ld.spec, i));
      for (char ch : ld.label)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
          config_error("domain label '" + ld.label + "' may only use letters, digits, '_' and '-'");
      c.domains.push_back(std::move(ld));
    }
    if (j.contains("weight")) {
      const json& w = j.at("weight");
      if (w.is_string() && w.get<std::string>() == "unit") {
        c.weight = Weight::unit();
      } else if (w.is_object() && w.value("type", "") == "dist-power") {
        c.weight = Weight::dist_power(w.at("m").get<double>());
      } else if (w.is_object() && w.value("type", "") == "unit") {
        c.weight = Weight::unit();
      } else {
        config_error("weight must be \"unit\" or {\"type\": \"dist-power\", \"m\": m}");
      }
    }
    c.n_min = j.value("n_min", c.n_min);
    c.n_max = j.value("n_max", c.n_max);
    c.quadrature_extra = j.value("quadrature_extra", c.quadrature_extra);
    if (j.contains("chebyshev")) {
      const json& ch = j.at("chebyshev");
      c.chebyshev_grid = ch.value("grid", c.chebyshev_grid);
      c.chebyshev_max_iter = ch.value("max_iter", c.chebyshev_max_iter);
      c.chebyshev_spread = ch.value("rel_spread", c.chebyshev_spread);
    }
    if (j.contains("deltas")) c.deltas = j.at("deltas").get<std::vector<double>>();
    c.output = j.value("output", c.output);
    c.cache = j.value("cache", c.cache);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
  c.check();
  return c;
}

void ExperimentConfig::check() const {
  if (n_min < 0) config_error("n_min must be >= 0");
  if (n_max < n_min) config_error("degree range is empty (n_max < n_min)");
  if (n_max > kMaxDegree) config_error("n_max exceeds the engine limit " + std::to_string(kMaxDegree));
  if (quadrature_extra < 0) config_error("quadrature_extra must be >= 0");
  if (weight.m < 0.0) config_error("dist-power exponent must be >= 0");
  if (chebyshev_grid < 512) config_error("chebyshev.grid must be >= 512");
  if (chebyshev_max_iter < 1) config_error("chebyshev.max_iter must be >= 1");
  if (!(chebyshev_spread > 0.0)) config_error("chebyshev.rel_spread must be > 0");
  for (double d : deltas)
    if (!(d > 0.0 && d <= 1.0)) config_error("deltas must lie in (0, 1]");
  if (jobs < 1) config_error("jobs must be >= 1");
  for (std::size_t i = 0; i < domains.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (domains[i].label == domains[k].label) config_error("duplicate domain label '" + domains[i].label + "'");
}

std::string ExperimentConfig::canonical() const {
  json doms = json::array();
  for (const auto& d : domains) {
    json e = io::domain_to_json(d.spec);
    e["label"] = d.label;
    doms.push_back(e);
  }
  // output, cache and jobs do not change any result
  const json j = {{"domains", doms},
                  {"weight", weight_json(weight)},
                  {"n_min", n_min},
                  {"n_max", n_max},
                  {"quadrature_extra", quadrature_extra},
                  {"chebyshev", {{"grid", chebyshev_grid}, {"max_iter", chebyshev_max_iter}, {"rel_spread", chebyshev_spread}}},
                  {"deltas", deltas}};
  return j.dump();
}

std::string ExperimentConfig::hash() const { return fnv1a(canonical()); }

// --------------------------------------------------------------------- fit

FittedConstants fit_constants(const std::vector<SweepRecord>& records) {
  std::vector<const SweepRecord*> use;
  for (const auto& r : records)
    if (r.n >= 2) use.push_back(&r);
  if (use.size() < 8)
    throw Error(ErrorCode::InsufficientData,
                "fit needs at least 8 degrees n >= 2, got " + std::to_string(use.size()));
  FittedConstants f;
  f.points = use.size();

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  double rlo = INFINITY, rhi = 0.0;
  for (const auto* r : use) {
    const double x = std::sqrt(std::log(r->n) / r->n);
    sxx += x * x;
    sxy += x * r->D;
    syy += r->D * r->D;
    if (r->n >= 5) {
      rlo = std::min(rlo, r->D / x);
      rhi = std::max(rhi, r->D / x);
    }
    f.thm2_C = std::max(f.thm2_C, r->D / std::sqrt(std::max(r->eps, 1e-12)));
  }
  f.thm1_c = sxy / sxx;
  double res = 0.0;
  for (const auto* r : use) {
    const double e = r->D - f.thm1_c * std::sqrt(std::log(r->n) / r->n);
    res += e * e;
  }
  f.thm1_residual = syy > 0.0 ? std::sqrt(res / syy) : 0.0;
  f.thm1_ratio_spread = rlo > 0.0 && std::isfinite(rlo) ? rhi / rlo : 0.0;

  // log ||Q_n|| = a + c2 log n
  double mx = 0.0, my = 0.0;
  for (const auto* r : use) mx += std::log(r->n), my += std::log(r->sup_norm);
  mx /= use.size();
  my /= use.size();
  double num = 0.0, den = 0.0;
  for (const auto* r : use) {
    num += (std::log(r->n) - mx) * (std::log(r->sup_norm) - my);
    den += (std::log(r->n) - mx) * (std::log(r->n) - mx);
  }
  f.c2 = num / den;
  const double a = my - f.c2 * mx;
  double rss = 0.0, tss = 0.0;
  f.c1 = 0.0;
  f.c3 = INFINITY;
  for (const auto* r : use) {
    const double e = std::log(r->sup_norm) - a - f.c2 * std::log(r->n);
    rss += e * e;
    tss += (std::log(r->sup_norm) - my) * (std::log(r->sup_norm) - my);
    f.c1 = std::max(f.c1, r->sup_norm / std::pow(r->n, f.c2));
    f.c3 = std::min(f.c3, double(r->n) * r->n * r->lambda_cap_n);
  }
  f.c2_residual = tss > 0.0 ? std::sqrt(rss / tss) : 0.0;
  return f;
}

// --------------------------------------------------------------------- run

RunResult run_experiment(const std::string& command, const ExperimentConfig& config) {
  using Fn = json (*)(Context&);
  static const std::map<std::string, Fn> table = {
      {"validate", cmd_validate}, {"map", cmd_map},           {"orthopoly", cmd_orthopoly},
      {"zeros", cmd_zeros},       {"sweep", cmd_sweep},       {"theorem2", cmd_theorem2},
      {"example1", cmd_example1}, {"faber", cmd_faber},       {"chebyshev", cmd_chebyshev},
      {"fit", cmd_fit}};
  const auto it = table.find(command);
  if (it == table.end()) throw StageError("config", ErrorCode::ConfigError, "unknown subcommand '" + command + "'");
  try {
    config.check();
  } catch (const Error& e) {
    std::string msg = e.what();
    msg.erase(0, msg.find(": ") + 2);
    throw StageError("config", e.code(), msg);
  }
  if (command != "example1" && config.domains.empty())
    throw StageError("config", ErrorCode::ConfigError, "'" + command + "' needs a domain");

  const auto t0 = std::chrono::steady_clock::now();
  Context ctx{config, Cache(config.output, config.cache), Output(config.output)};
  json summary = it->second(ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  summary["command"] = command;
  summary["provenance"] = {{"config_hash", config.hash()},
                           {"version", kVersion},
                           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                         "." + std::to_string(EIGEN_MINOR_VERSION)},
                           {"wall_time_s", wall}};
  RunResult r;
  r.summary = summary.dump(2);
  ctx.out.write(command + "_summary.json", r.summary + "\n");
  r.files = ctx.out.files();
  return r;
}

}  // namespace convpot
