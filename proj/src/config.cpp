#include "lra/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "lra/error.hpp"

namespace lra {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::Config, "config: " + what); }

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad("unknown field '" + it.key() + "' in " + where);
}

template <class T>
T read(const Json& j, const char* key, const std::string& where) {
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    const Json& v = j.contains(key) ? j.at(key) : Json();
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      bad("field '" + std::string(key) + "' in " + where + " must be a nonnegative integer");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
void read_opt(const Json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = read<T>(j, key, where);
}

Vec2 read_point(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad(where + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json point(Vec2 v) { return Json::array({v.x, v.y}); }

}  // namespace

double ExperimentConfig::resolved_epsilon() const {
  if (epsilon.has_value() == j_m.has_value()) bad("give exactly one of grid.epsilon and grid.j_m");
  if (j_m) {
    if (*j_m < 1) bad("grid.j_m must be >= 1");
    return 1.0 / *j_m;
  }
  return *epsilon;
}

std::vector<double> ExperimentConfig::resolved_sweep() const {
  std::vector<double> out;
  for (int m : sweep_j_m) {
    if (m < 1) bad("sweep.j_m entries must be >= 1");
    out.push_back(1.0 / m);
  }
  for (double e : sweep_epsilon) out.push_back(e);
  return out;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return to_json(*this) == to_json(o); }

ExperimentConfig config_from_json(const Json& j) {
  only_keys(j, {"schema", "grid", "x0", "offsets", "variance_field", "distribution", "kernel", "table", "n_samples",
                "master_seed", "threads", "window", "quadrature_nodes", "histogram", "thresholds", "image", "sweep",
                "export_sinogram", "plots", "output_dir"},
            "config");
  if (!j.contains("schema")) bad("missing 'schema'");
  if (read<int>(j, "schema", "config") != kSchemaVersion) bad("unsupported schema version");

  ExperimentConfig c;
  if (!j.contains("grid")) bad("missing 'grid'");
  const Json& g = j.at("grid");
  only_keys(g, {"epsilon", "j_m", "kappa", "P", "p_bar", "convention"}, "grid");
  if (g.contains("epsilon")) c.epsilon = read<double>(g, "epsilon", "grid");
  if (g.contains("j_m")) c.j_m = read<int>(g, "j_m", "grid");
  read_opt(g, "kappa", "grid", c.kappa);
  read_opt(g, "P", "grid", c.P);
  if (g.contains("p_bar") && !g.at("p_bar").is_null()) c.p_bar = read<double>(g, "p_bar", "grid");
  if (g.contains("convention")) c.convention = angle_convention_from_string(read<std::string>(g, "convention", "grid"));
  c.resolved_epsilon();

  if (!j.contains("x0")) bad("missing 'x0'");
  c.x0 = read_point(j.at("x0"), "x0");
  if (!j.contains("offsets") || !j.at("offsets").is_array() || j.at("offsets").empty())
    bad("'offsets' must be a nonempty array of points");
  for (const Json& p : j.at("offsets")) c.offsets.push_back(read_point(p, "offsets entry"));

  if (j.contains("variance_field")) c.variance_field = j.at("variance_field");
  if (j.contains("distribution")) c.distribution = distribution_from_string(read<std::string>(j, "distribution", "config"));

  if (j.contains("kernel")) {
    const Json& k = j.at("kernel");
    only_keys(k, {"kind", "a", "document"}, "kernel");
    c.kernel.kind = read<std::string>(k, "kind", "kernel");
    read_opt(k, "a", "kernel", c.kernel.a);
    if (k.contains("document")) c.kernel.document = k.at("document");
  }
  if (j.contains("table")) {
    const Json& t = j.at("table");
    only_keys(t, {"grid_step", "half_range", "file"}, "table");
    read_opt(t, "grid_step", "table", c.table_step);
    read_opt(t, "half_range", "table", c.table_half_range);
    read_opt(t, "file", "table", c.table_file);
  }
  read_opt(j, "n_samples", "config", c.n_samples);
  read_opt(j, "master_seed", "config", c.master_seed);
  read_opt(j, "threads", "config", c.threads);
  read_opt(j, "window", "config", c.window);
  read_opt(j, "quadrature_nodes", "config", c.quadrature_nodes);
  if (j.contains("histogram")) {
    const Json& h = j.at("histogram");
    only_keys(h, {"bins", "half_width"}, "histogram");
    read_opt(h, "bins", "histogram", c.histogram_bins);
    read_opt(h, "half_width", "histogram", c.histogram_half_width);
  }
  if (j.contains("thresholds")) {
    const Json& t = j.at("thresholds");
    only_keys(t, {"cov_error", "pdf_error"}, "thresholds");
    read_opt(t, "cov_error", "thresholds", c.thresholds.cov_error);
    read_opt(t, "pdf_error", "thresholds", c.thresholds.pdf_error);
  }
  if (j.contains("image")) {
    const Json& im = j.at("image");
    only_keys(im, {"resolution", "window"}, "image");
    read_opt(im, "resolution", "image", c.image_resolution);
    read_opt(im, "window", "image", c.image_window);
  }
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    only_keys(s, {"j_m", "epsilon", "n_samples", "coarse_epsilon", "min_coarse_error", "min_rank_correlation"}, "sweep");
    read_opt(s, "j_m", "sweep", c.sweep_j_m);
    read_opt(s, "epsilon", "sweep", c.sweep_epsilon);
    read_opt(s, "n_samples", "sweep", c.sweep_n_samples);
    read_opt(s, "coarse_epsilon", "sweep", c.sweep_coarse_epsilon);
    read_opt(s, "min_coarse_error", "sweep", c.sweep_min_coarse_error);
    read_opt(s, "min_rank_correlation", "sweep", c.sweep_min_rank_correlation);
  }
  read_opt(j, "export_sinogram", "config", c.export_sinogram);
  read_opt(j, "plots", "config", c.plots);
  read_opt(j, "output_dir", "config", c.output_dir);

  if (c.n_samples < 2) bad("n_samples must be >= 2");
  if (c.window < 0.0 || c.image_window < 0.0) bad("window sizes must be >= 0");
  if (c.quadrature_nodes < 256) bad("quadrature_nodes must be >= 256");
  if (c.histogram_bins < 1) bad("histogram.bins must be >= 1");
  if (c.image_resolution < 1) bad("image.resolution must be >= 1");
  if (c.output_dir.empty()) bad("output_dir must not be empty");
  // validate the parts that are built lazily
  make_field(c);
  make_kernel(c.kernel);
  make_patch(c);
  try {
    make_grid(c);
  } catch (const Error& e) {
    bad(std::string("grid: ") + e.what());
  }
  c.resolved_sweep();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["schema"] = kSchemaVersion;
  Json g;
  if (c.epsilon) g["epsilon"] = *c.epsilon;
  if (c.j_m) g["j_m"] = *c.j_m;
  g["kappa"] = c.kappa;
  g["P"] = c.P;
  g["p_bar"] = c.p_bar ? Json(*c.p_bar) : Json(nullptr);
  g["convention"] = to_string(c.convention);
  j["grid"] = std::move(g);
  j["x0"] = point(c.x0);
  Json off = Json::array();
  for (const Vec2& v : c.offsets) off.push_back(point(v));
  j["offsets"] = std::move(off);
  j["variance_field"] = c.variance_field;
  j["distribution"] = to_string(c.distribution);
  Json k;
  k["kind"] = c.kernel.kind;
  if (c.kernel.kind == "keys") k["a"] = c.kernel.a;
  if (c.kernel.kind == "pieces") k["document"] = c.kernel.document;
  j["kernel"] = std::move(k);
  Json t;
  t["grid_step"] = c.table_step;
  t["half_range"] = c.table_half_range;
  if (!c.table_file.empty()) t["file"] = c.table_file;
  j["table"] = std::move(t);
  j["n_samples"] = c.n_samples;
  j["master_seed"] = c.master_seed;
  j["threads"] = c.threads;
  j["window"] = c.window;
  j["quadrature_nodes"] = c.quadrature_nodes;
  j["histogram"] = {{"bins", c.histogram_bins}, {"half_width", c.histogram_half_width}};
  j["thresholds"] = {{"cov_error", c.thresholds.cov_error}, {"pdf_error", c.thresholds.pdf_error}};
  j["image"] = {{"resolution", c.image_resolution}, {"window", c.image_window}};
  Json s;
  if (!c.sweep_j_m.empty()) s["j_m"] = c.sweep_j_m;
  if (!c.sweep_epsilon.empty()) s["epsilon"] = c.sweep_epsilon;
  s["n_samples"] = c.sweep_n_samples;
  s["coarse_epsilon"] = c.sweep_coarse_epsilon;
  s["min_coarse_error"] = c.sweep_min_coarse_error;
  s["min_rank_correlation"] = c.sweep_min_rank_correlation;
  j["sweep"] = std::move(s);
  j["export_sinogram"] = c.export_sinogram;
  j["plots"] = c.plots;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

Kernel make_kernel(const KernelSpec& spec) {
  try {
    if (spec.kind == "keys") return make_keys_kernel(spec.a);
    if (spec.kind == "bspline3") return make_bspline3_kernel();
    if (spec.kind == "pieces") return kernel_from_json(spec.document);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    bad(std::string("kernel: ") + e.what());
  }
  bad("unknown kernel kind '" + spec.kind + "'");
}

GridSpec make_grid(const ExperimentConfig& c) {
  return build_grid(c.resolved_epsilon(), c.kappa, c.p_bar, c.P, c.convention);
}

LocalPatch make_patch(const ExperimentConfig& c) {
  try {
    return LocalPatch(c.x0, c.offsets, c.resolved_epsilon());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    bad(e.what());
  }
}

VarianceField make_field(const ExperimentConfig& c) { return variance_field_from_json(c.variance_field); }

}  // namespace lra
