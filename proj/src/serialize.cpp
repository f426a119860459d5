#include "lra/serialize.hpp"

#include <cmath>
#include <numbers>

#include "lra/error.hpp"

namespace lra {

namespace {

template <class T>
T get(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::Config, std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::Config, std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

void check_schema(const Json& j, const char* type) {
  if (!j.is_object()) fail(ErrorCode::Config, std::string(type) + ": expected a JSON object");
  if (get<int>(j, "schema", type) != kSchemaVersion)
    fail(ErrorCode::Config, std::string(type) + ": unsupported schema version");
  if (j.contains("type") && get<std::string>(j, "type", type) != type)
    fail(ErrorCode::Config, std::string("expected a document of type ") + type);
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string hex64(std::uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = d[v & 0xf];
  return s;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Json to_json(const Kernel& k) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["type"] = "kernel";
  j["name"] = k.name();
  j["support_radius"] = k.support_radius();
  j["smoothness_M"] = k.smoothness_M();
  j["even"] = k.is_even();
  j["fingerprint"] = hex64(k.fingerprint());
  Json pieces = Json::array();
  for (const Piece& p : k.pieces()) pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"coefficients", p.coeffs}});
  j["pieces"] = std::move(pieces);
  return j;
}

Kernel kernel_from_json(const Json& j) {
  check_schema(j, "kernel");
  std::vector<Piece> pieces;
  const Json& arr = j.at("pieces");
  if (!arr.is_array()) fail(ErrorCode::Config, "kernel: 'pieces' must be an array");
  for (const Json& p : arr)
    pieces.push_back({get<double>(p, "lo", "kernel piece"), get<double>(p, "hi", "kernel piece"),
                      get<std::vector<double>>(p, "coefficients", "kernel piece")});
  Kernel k(get<std::string>(j, "name", "kernel"), std::move(pieces));
  if (j.contains("fingerprint") && get<std::string>(j, "fingerprint", "kernel") != hex64(k.fingerprint()))
    fail(ErrorCode::Config, "kernel: fingerprint does not match the pieces");
  return k;
}

Json to_json(const KernelTable& t) {
  Json j;
  j["grid_step"] = t.grid_step();
  j["half_range"] = t.half_range();
  j["tail_coefficient"] = t.tail_coefficient();
  j["encoding"] = "array";
  j["values"] = t.values();
  return j;
}

KernelTable kernel_table_from_json(const Json& j) {
  if (j.contains("encoding") && get<std::string>(j, "encoding", "table") != "array")
    fail(ErrorCode::Config, "table: only the 'array' encoding is supported");
  try {
    return KernelTable(get<double>(j, "grid_step", "table"), get<double>(j, "half_range", "table"),
                       get<std::vector<double>>(j, "values", "table"), get<double>(j, "tail_coefficient", "table"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(ErrorCode::Config, std::string("table: ") + e.what());
  }
}

Json to_json(const FilteredKernelTable& t) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["type"] = "filtered_kernel_table";
  j["kernel_fingerprint"] = hex64(t.kernel_fingerprint);
  j["refinement_change"] = t.refinement_change;
  Json sing = Json::array();
  for (const SingularTerm& s : t.singular) sing.push_back({{"at", s.at}, {"c1", s.c1}, {"c2", s.c2}});
  j["singular_terms"] = std::move(sing);
  const Json table = to_json(t.table);
  for (auto& [k, v] : table.items()) j[k] = v;
  return j;
}

FilteredKernelTable filtered_table_from_json(const Json& j) {
  check_schema(j, "filtered_kernel_table");
  FilteredKernelTable t;
  t.table = kernel_table_from_json(j);
  const std::string fp = get<std::string>(j, "kernel_fingerprint", "filtered_kernel_table");
  try {
    t.kernel_fingerprint = std::stoull(fp, nullptr, 16);
  } catch (const std::exception&) {
    fail(ErrorCode::Config, "filtered_kernel_table: bad kernel_fingerprint");
  }
  if (j.contains("refinement_change")) t.refinement_change = get<double>(j, "refinement_change", "table");
  std::vector<SingularTerm> sing;
  if (j.contains("singular_terms")) {
    const Json& arr = j.at("singular_terms");
    if (!arr.is_array()) fail(ErrorCode::Config, "filtered_kernel_table: 'singular_terms' must be an array");
    for (const Json& s : arr)
      sing.push_back({get<double>(s, "at", "singular term"), get<double>(s, "c1", "singular term"),
                      get<double>(s, "c2", "singular term")});
  }
  try {
    t.attach_singular_terms(std::move(sing));
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("filtered_kernel_table: ") + e.what());
  }
  return t;
}

Json to_json(const GridSpec& g) {
  Json j;
  j["epsilon"] = g.epsilon;
  j["kappa"] = g.kappa;
  j["p_bar"] = g.p_bar;
  j["P"] = g.P;
  j["convention"] = to_string(g.convention);
  j["delta_alpha"] = g.delta_alpha();
  j["angle_index_range"] = {g.angle_min_index, g.angle_max_index};
  j["detector_index_range"] = {g.detector_min_index, g.detector_max_index};
  j["angle_count"] = g.angle_count();
  j["detector_count"] = g.detector_count();
  return j;
}

Json to_json(const VarianceField& f) {
  Json j;
  j["kind"] = f.kind_name();
  switch (f.kind()) {
    case VarianceField::Kind::Constant:
      j["value"] = f.scale();
      break;
    case VarianceField::Kind::ProductSinusoidal:
      j["scale"] = f.scale();
      j["amp_alpha"] = f.amp_alpha();
      j["amp_p"] = f.amp_p();
      j["freq_p"] = f.freq_p();
      break;
    case VarianceField::Kind::Tabulated:
      j["alpha_count"] = f.alpha_count();
      j["p_min"] = f.p_min();
      j["p_max"] = f.p_max();
      j["p_count"] = f.p_count();
      j["values"] = f.values();
      break;
  }
  return j;
}

VarianceField variance_field_from_json(const Json& j) {
  const std::string kind = get<std::string>(j, "kind", "variance_field");
  try {
    if (kind == "reference") return make_reference_sigma2();
    if (kind == "constant") return VarianceField::constant(get<double>(j, "value", "variance_field"));
    if (kind == "product_sinusoidal")
      return VarianceField::product_sinusoidal(get<double>(j, "scale", "variance_field"),
                                               get<double>(j, "amp_alpha", "variance_field"),
                                               get<double>(j, "amp_p", "variance_field"),
                                               get<double>(j, "freq_p", "variance_field"));
    if (kind == "tabulated")
      return VarianceField::tabulated(get<std::size_t>(j, "alpha_count", "variance_field"),
                                      get<double>(j, "p_min", "variance_field"),
                                      get<double>(j, "p_max", "variance_field"),
                                      get<std::size_t>(j, "p_count", "variance_field"),
                                      get<std::vector<double>>(j, "values", "variance_field"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(ErrorCode::Config, std::string("variance_field: ") + e.what());
  }
  fail(ErrorCode::Config, "variance_field: unknown kind '" + kind + "'");
}

Json to_json(const AssumptionReport& r) {
  Json j;
  j["kappa_x0_norm"] = r.kappa_x0_norm;
  j["continued_fraction_quotients"] = r.continued_fraction_quotients;
  j["estimated_type_nu"] = r.estimated_type_nu ? Json(*r.estimated_type_nu) : Json("inconclusive");
  j["rational_flag"] = r.rational_flag;
  j["sigma_positivity"] = r.sigma_positivity;
  j["sigma_positivity_witness"] = {r.witness_alpha_lo, r.witness_alpha_hi};
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const KernelCheckReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kernel"] = r.kernel_name;
  j["smoothness_M"] = r.smoothness_M;
  j["parseval_constant"] = r.parseval_constant;
  j["table_l2"] = r.table_l2;
  j["pass"] = r.all_pass();
  Json checks = Json::array();
  for (const CheckItem& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"reference", c.reference},
                      {"error", c.error},
                      {"tolerance", c.tolerance},
                      {"required", c.required},
                      {"pass", c.pass}});
  j["checks"] = std::move(checks);
  return j;
}

Json to_json(const ThirdMomentReport& r) {
  Json j;
  j["distribution"] = to_string(r.distribution);
  j["delta_alpha"] = r.delta_alpha;
  j["constant_c"] = r.constant_c;
  j["max_ratio"] = r.max_ratio;
  j["holds"] = r.holds;
  return j;
}

Json to_json(const PredictedCovariance& p) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["x0"] = {p.x0.x, p.x0.y};
  Json off = Json::array();
  for (const Vec2& v : p.offsets) off.push_back({v.x, v.y});
  j["offsets"] = std::move(off);
  j["matrix"] = matrix_to_json(p.matrix);
  j["c0"] = p.c0;
  j["nodes"] = p.nodes;
  j["quadrature_error"] = p.quadrature_error;
  return j;
}

Json to_json(const EnsembleStats& s) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["n_samples"] = s.n_samples;
  j["master_seed"] = s.master_seed;
  j["config_fingerprint"] = s.config_fingerprint;
  j["sample_mean"] = std::vector<double>(s.sample_mean.data(), s.sample_mean.data() + s.sample_mean.size());
  j["sample_cov"] = matrix_to_json(s.sample_cov);
  if (s.histogram) {
    j["histogram"] = {{"bins", s.histogram->bins}, {"half_width", s.histogram->half_width}, {"counts", s.histogram->counts}};
  }
  return j;
}

Json to_json(const ComparisonReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["cov_error_frobenius"] = r.cov_error_frobenius;
  j["pdf_error_l2"] = opt(r.pdf_error_l2);
  j["mean_norm"] = r.mean_norm;
  j["mean_bound"] = r.mean_bound;
  j["cov_pass"] = r.cov_pass;
  j["pdf_pass"] = r.pdf_pass;
  j["mean_pass"] = r.mean_pass;
  j["pass"] = r.pass();
  return j;
}

Json to_json(const LatticeSumProbe& p) {
  Json j;
  j["a"] = p.a;
  j["b"] = p.b;
  j["J"] = p.J;
  j["psi"] = p.psi_value;
  j["Psi"] = p.Psi_value;
  j["psi_tail_bound"] = p.psi_tail_bound;
  j["Psi_tail_bound"] = p.Psi_tail_bound;
  return j;
}

}  // namespace lra
