#include "convpot/capi.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "convpot/conformal.hpp"
#include "convpot/experiment.hpp"
#include "convpot/orthopoly.hpp"
#include "convpot/zeros.hpp"
#include "json_io.hpp"

using namespace convpot;

struct cp_domain {
  ConvexDomain d;
};
struct cp_exterior_map {
  ExteriorMap m;
};
struct cp_interior_map {
  InteriorMap m;
};
struct cp_ortho {
  OrthoSequence s;
};
struct cp_zeros {
  ZeroSet z;
};

namespace {

thread_local std::string g_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
int guard(F&& f) {
  try {
    g_error.clear();
    f();
    return CP_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    g_error = e.what();
    return CP_INTERNAL;
  } catch (...) {
    g_error = "unknown exception";
    return CP_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* cp_version(void) { return kVersion; }

const char* cp_status_name(int status) {
  if (status == CP_INTERNAL) return "Internal";
  if (status < 0 || status > static_cast<int>(ErrorCode::IoError)) return "Unknown";
  return to_string(static_cast<ErrorCode>(status));
}

const char* cp_last_error(void) { return g_error.c_str(); }

void cp_string_free(char* s) { std::free(s); }

int cp_domain_from_json(const char* literal, cp_domain** out) {
  return guard([&] {
    need(literal, "literal");
    need(out, "out");
    io::json j;
    try {
      j = io::json::parse(literal);
    } catch (const io::json::exception& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
    *out = new cp_domain{ConvexDomain(io::domain_from_json(j))};
  });
}

void cp_domain_free(cp_domain* d) { delete d; }

int cp_domain_contains(const cp_domain* d, double re, double im, int* location) {
  return guard([&] {
    need(d, "domain");
    need(location, "location");
    *location = static_cast<int>(d->d.contains({re, im}));
  });
}

int cp_domain_perimeter(const cp_domain* d, double* out) {
  return guard([&] {
    need(d, "domain");
    need(out, "out");
    *out = d->d.perimeter();
  });
}

int cp_exterior_map_build(const cp_domain* d, cp_exterior_map** out) {
  return guard([&] {
    need(d, "domain");
    need(out, "out");
    *out = new cp_exterior_map{ExteriorMap::build(d->d)};
  });
}

int cp_exterior_map_from_json(const char* text, cp_exterior_map** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new cp_exterior_map{ExteriorMap::from_json(text)};
  });
}

int cp_exterior_map_to_json(const cp_exterior_map* m, char** out) {
  return guard([&] {
    need(m, "map");
    need(out, "out");
    *out = dup(m->m.to_json());
  });
}

int cp_exterior_map_capacity(const cp_exterior_map* m, double* out) {
  return guard([&] {
    need(m, "map");
    need(out, "out");
    *out = m->m.capacity();
  });
}

int cp_exterior_map_eval(const cp_exterior_map* m, double re, double im, double* out_re, double* out_im) {
  return guard([&] {
    need(m, "map");
    need(out_re, "out_re");
    need(out_im, "out_im");
    const cplx w = m->m.eval({re, im});
    *out_re = w.real();
    *out_im = w.imag();
  });
}

int cp_exterior_map_eval_inverse(const cp_exterior_map* m, double re, double im, double* out_re, double* out_im) {
  return guard([&] {
    need(m, "map");
    need(out_re, "out_re");
    need(out_im, "out_im");
    const cplx z = m->m.eval_inverse({re, im});
    *out_re = z.real();
    *out_im = z.imag();
  });
}

void cp_exterior_map_free(cp_exterior_map* m) { delete m; }

int cp_interior_map_build(const cp_domain* d, cp_interior_map** out) {
  return guard([&] {
    need(d, "domain");
    need(out, "out");
    *out = new cp_interior_map{InteriorMap::build(d->d)};
  });
}

int cp_interior_map_from_json(const char* text, cp_interior_map** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new cp_interior_map{InteriorMap::from_json(text)};
  });
}

int cp_interior_map_to_json(const cp_interior_map* m, char** out) {
  return guard([&] {
    need(m, "map");
    need(out, "out");
    *out = dup(m->m.to_json());
  });
}

int cp_interior_map_eval(const cp_interior_map* m, double re, double im, double* out_re, double* out_im) {
  return guard([&] {
    need(m, "map");
    need(out_re, "out_re");
    need(out_im, "out_im");
    const cplx u = m->m.eval({re, im});
    *out_re = u.real();
    *out_im = u.imag();
  });
}

void cp_interior_map_free(cp_interior_map* m) { delete m; }

int cp_ortho_build(const cp_domain* d, double m, int n_max, int extra_degree, cp_ortho** out) {
  return guard([&] {
    need(d, "domain");
    need(out, "out");
    if (m < 0.0) throw Error(ErrorCode::InvalidArgument, "weight exponent must be >= 0");
    if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 0");
    const Weight w = m == 0.0 ? Weight::unit() : Weight::dist_power(m);
    const auto engine = InnerProductEngine::build(d->d, w, n_max, extra_degree);
    *out = new cp_ortho{orthonormalize(engine, n_max)};
  });
}

int cp_ortho_from_json(const char* text, cp_ortho** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new cp_ortho{OrthoSequence::from_json(text)};
  });
}

int cp_ortho_to_json(const cp_ortho* s, char** out) {
  return guard([&] {
    need(s, "sequence");
    need(out, "out");
    *out = dup(s->s.to_json());
  });
}

int cp_ortho_degree(const cp_ortho* s, int* out) {
  return guard([&] {
    need(s, "sequence");
    need(out, "out");
    *out = s->s.degree();
  });
}

int cp_ortho_log_lambda(const cp_ortho* s, int n, double* out) {
  return guard([&] {
    need(s, "sequence");
    need(out, "out");
    if (n < 0 || n > s->s.degree()) throw Error(ErrorCode::InvalidArgument, "degree out of range");
    *out = s->s.log_lambda(n);
  });
}

int cp_ortho_eval(const cp_ortho* s, int n, double re, double im, double* out_re, double* out_im) {
  return guard([&] {
    need(s, "sequence");
    need(out_re, "out_re");
    need(out_im, "out_im");
    if (n < 0 || n > s->s.degree()) throw Error(ErrorCode::InvalidArgument, "degree out of range");
    const cplx q = s->s.eval(n, {re, im});
    *out_re = q.real();
    *out_im = q.imag();
  });
}

void cp_ortho_free(cp_ortho* s) { delete s; }

int cp_zeros_compute(const cp_ortho* s, const cp_domain* d, int n, cp_zeros** out) {
  return guard([&] {
    need(s, "sequence");
    need(d, "domain");
    need(out, "out");
    *out = new cp_zeros{zeros_of(s->s, n, d->d)};
  });
}

size_t cp_zeros_count(const cp_zeros* z) { return z ? z->z.zeros.size() : 0; }

int cp_zeros_get(const cp_zeros* z, size_t i, double* re, double* im, int* location) {
  return guard([&] {
    need(z, "zeros");
    if (i >= z->z.zeros.size()) throw Error(ErrorCode::InvalidArgument, "zero index out of range");
    if (re) *re = z->z.zeros[i].real();
    if (im) *im = z->z.zeros[i].imag();
    if (location) *location = static_cast<int>(z->z.flags[i]);
  });
}

void cp_zeros_free(cp_zeros* z) { delete z; }

int cp_run(const char* command, const char* config_json, const cp_run_options* options, char** summary_json,
           char** stage) {
  if (stage) *stage = nullptr;
  if (summary_json) *summary_json = nullptr;
  std::string failed_stage = "config";
  const int rc = guard([&] {
    need(command, "command");
    ExperimentConfig cfg = ExperimentConfig::parse(config_json ? config_json : "{}");
    // parse errors keep the default stage name "config"
    if (options) {
      if (options->out_dir) cfg.output = options->out_dir;
      if (options->n_max > 0) cfg.n_max = options->n_max;
      if (options->jobs > 0) cfg.jobs = options->jobs;
      if (options->no_cache) cfg.cache = false;
    }
    try {
      const RunResult r = run_experiment(command, cfg);
      if (summary_json) *summary_json = dup(r.summary);
    } catch (const StageError& e) {
      failed_stage = e.stage();
      throw;
    } catch (...) {
      failed_stage = "run";
      throw;
    }
  });
  if (rc != CP_OK && stage) *stage = dup(failed_stage);
  return rc;
}

}  // extern "C"
