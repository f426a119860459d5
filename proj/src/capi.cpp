#include "lra_noise.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "lra/config.hpp"
#include "lra/error.hpp"
#include "lra/kernel_tables.hpp"
#include "lra/serialize.hpp"
#include "lra/theory.hpp"
#include "lra/workflows.hpp"

struct lra_kernel {
  lra::Kernel k;
};
struct lra_table {
  lra::FilteredKernelTable t;
};
struct lra_experiment {
  lra::ExperimentConfig c;
};

namespace {

thread_local std::string g_last_error;

lra_status status_of(lra::ErrorCode c) {
  switch (c) {
    case lra::ErrorCode::InvalidArgument: return LRA_ERR_INVALID_ARGUMENT;
    case lra::ErrorCode::Domain: return LRA_ERR_DOMAIN;
    case lra::ErrorCode::Convergence: return LRA_ERR_CONVERGENCE;
    case lra::ErrorCode::Io: return LRA_ERR_IO;
    case lra::ErrorCode::Config: return LRA_ERR_CONFIG;
  }
  return LRA_ERR_INTERNAL;
}

template <class F>
lra_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LRA_OK;
  } catch (const lra::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return LRA_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LRA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LRA_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) lra::fail(lra::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lra::Json parse(const char* text) {
  try {
    return lra::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    lra::fail(lra::ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* lra_version(void) { return "1.0.0"; }
const char* lra_last_error(void) { return g_last_error.c_str(); }
void lra_string_free(char* s) { std::free(s); }

lra_status lra_kernel_create_keys(double a, lra_kernel** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lra_kernel{lra::make_keys_kernel(a)};
  });
}

lra_status lra_kernel_create_bspline3(lra_kernel** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lra_kernel{lra::make_bspline3_kernel()};
  });
}

lra_status lra_kernel_from_json(const char* json, lra_kernel** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new lra_kernel{lra::kernel_from_json(parse(json))};
  });
}

lra_status lra_kernel_to_json(const lra_kernel* k, char** out) {
  return guarded([&] {
    require(k, "kernel");
    require(out, "out");
    *out = dup_string(lra::to_json(k->k).dump());
  });
}

lra_status lra_kernel_eval(const lra_kernel* k, double t, int derivative_order, double* out) {
  return guarded([&] {
    require(k, "kernel");
    require(out, "out");
    *out = k->k.eval(t, derivative_order);
  });
}

lra_status lra_kernel_spectrum(const lra_kernel* k, double lambda, double* re, double* im) {
  return guarded([&] {
    require(k, "kernel");
    require(re, "re");
    require(im, "im");
    const auto s = k->k.spectrum(lambda);
    *re = s.real();
    *im = s.imag();
  });
}

void lra_kernel_destroy(lra_kernel* k) { delete k; }

lra_status lra_table_build(const lra_kernel* k, double grid_step, double half_range, lra_table** out) {
  return guarded([&] {
    require(k, "kernel");
    require(out, "out");
    *out = new lra_table{lra::build_filtered_kernel(k->k, grid_step, half_range)};
  });
}

lra_status lra_table_from_json(const char* json, lra_table** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new lra_table{lra::filtered_table_from_json(parse(json))};
  });
}

lra_status lra_table_to_json(const lra_table* t, char** out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    *out = dup_string(lra::to_json(t->t).dump());
  });
}

lra_status lra_table_value(const lra_table* t, double x, double* out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    *out = t->t.value(x);
  });
}

void lra_table_destroy(lra_table* t) { delete t; }

lra_status lra_experiment_create(const char* config_json, lra_experiment** out) {
  return guarded([&] {
    require(config_json, "config_json");
    require(out, "out");
    *out = new lra_experiment{lra::config_from_json(parse(config_json))};
  });
}

lra_status lra_experiment_load(const char* path, lra_experiment** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new lra_experiment{lra::load_config(path)};
  });
}

lra_status lra_experiment_set_seed(lra_experiment* e, uint64_t seed) {
  return guarded([&] {
    require(e, "experiment");
    e->c.master_seed = seed;
  });
}

lra_status lra_experiment_set_threads(lra_experiment* e, unsigned threads) {
  return guarded([&] {
    require(e, "experiment");
    e->c.threads = threads;
  });
}

lra_status lra_experiment_set_plots(lra_experiment* e, int enabled) {
  return guarded([&] {
    require(e, "experiment");
    e->c.plots = enabled != 0;
  });
}

lra_status lra_experiment_set_output_dir(lra_experiment* e, const char* dir) {
  return guarded([&] {
    require(e, "experiment");
    require(dir, "dir");
    if (!*dir) lra::fail(lra::ErrorCode::InvalidArgument, "output directory is empty");
    e->c.output_dir = dir;
  });
}

lra_status lra_experiment_config_json(const lra_experiment* e, char** out) {
  return guarded([&] {
    require(e, "experiment");
    require(out, "out");
    *out = dup_string(lra::to_json(e->c).dump(2));
  });
}

lra_status lra_experiment_predict(const lra_experiment* e, double* matrix, size_t capacity, size_t* n) {
  return guarded([&] {
    require(e, "experiment");
    require(n, "n");
    const auto patch = lra::make_patch(e->c);
    const auto field = lra::make_field(e->c);
    const auto ac = lra::autocorrelation_cached(lra::make_kernel(e->c.kernel), e->c.table_step);
    const auto pred = lra::predicted_cov_matrix(patch, field, *ac, e->c.kappa, e->c.quadrature_nodes);
    const size_t m = static_cast<size_t>(pred.matrix.rows());
    *n = m;
    if (capacity < m * m) lra::fail(lra::ErrorCode::InvalidArgument, "matrix buffer too small");
    require(matrix, "matrix");
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) matrix[i * m + j] = pred.matrix(i, j);
  });
}

lra_status lra_experiment_run(const lra_experiment* e, lra_command cmd, int* passed, char** summary) {
  return guarded([&] {
    require(e, "experiment");
    require(passed, "passed");
    if (cmd < LRA_CMD_KERNEL_CHECK || cmd > LRA_CMD_SWEEP)
      lra::fail(lra::ErrorCode::InvalidArgument, "unknown command");
    const auto outcome = lra::run_command(static_cast<lra::Command>(cmd), e->c);
    *passed = outcome.pass ? 1 : 0;
    if (summary) *summary = dup_string(outcome.summary);
  });
}

void lra_experiment_destroy(lra_experiment* e) { delete e; }

lra_status lra_command_from_name(const char* name, lra_command* out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = static_cast<lra_command>(lra::command_from_string(name));
  });
}

}  // extern "C"
