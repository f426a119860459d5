#include "lra/workflows.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "lra/assumptions.hpp"
#include "lra/error.hpp"
#include "lra/fbp.hpp"
#include "lra/kernel_checks.hpp"
#include "lra/theory.hpp"

namespace lra {

namespace fs = std::filesystem;

Command command_from_string(const std::string& name) {
  if (name == "kernel-check") return Command::KernelCheck;
  if (name == "predict") return Command::Predict;
  if (name == "simulate") return Command::Simulate;
  if (name == "validate") return Command::Validate;
  if (name == "sweep") return Command::Sweep;
  fail(ErrorCode::InvalidArgument, "unknown command '" + name + "'");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::KernelCheck: return "kernel-check";
    case Command::Predict: return "predict";
    case Command::Simulate: return "simulate";
    case Command::Validate: return "validate";
    case Command::Sweep: return "sweep";
  }
  return "";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

struct Context {
  const ExperimentConfig& cfg;
  fs::path dir;
  Outcome out;
  unsigned threads;

  std::string path(const std::string& name) {
    const std::string p = (dir / name).string();
    out.artifacts.push_back(name);
    return p;
  }
};

struct Model {
  Kernel kernel;
  GridSpec grid;
  LocalPatch patch;
  VarianceField field;
  std::shared_ptr<const FilteredKernelTable> fk;
  std::shared_ptr<const Autocorrelation> ac;
};

Model build_model(const ExperimentConfig& c, bool need_table = true) {
  Model m{make_kernel(c.kernel), make_grid(c), make_patch(c), make_field(c), nullptr, nullptr};
  if (need_table) {
    if (!c.table_file.empty()) {
      std::ifstream in(c.table_file);
      if (!in) fail(ErrorCode::Config, "config: cannot read table file " + c.table_file);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::Config, std::string("config: table file is not valid JSON: ") + e.what());
      }
      m.fk = std::make_shared<const FilteredKernelTable>(filtered_table_from_json(j));
    } else {
      m.fk = filtered_kernel_cached(m.kernel, c.table_step, c.table_half_range);
    }
  }
  m.ac = autocorrelation_cached(m.kernel, c.table_step);
  return m;
}

PredictedCovariance predict(const Model& m, const ExperimentConfig& c) {
  return predicted_cov_matrix(m.patch, m.field, *m.ac, c.kappa, c.quadrature_nodes);
}

EnsembleOptions ensemble_options(const ExperimentConfig& c, const PredictedCovariance& pred, unsigned threads) {
  EnsembleOptions o;
  o.window = c.window;
  o.threads = threads;
  o.histogram.bins = c.histogram_bins;
  o.histogram.half_width = c.histogram_half_width > 0.0 ? c.histogram_half_width : 4.0 * std::sqrt(pred.c0);
  return o;
}

void write_histogram_csv(Context& ctx, const std::string& name, const EnsembleStats& st,
                         const PredictedCovariance* pred) {
  if (!st.histogram) return;
  const Histogram2D& h = *st.histogram;
  const std::vector<double> po = histogram_density(h, st.n_samples);
  std::vector<double> p;
  if (pred && pred->matrix.rows() == 2) p = gaussian_pdf_on_grid(*pred, h.bins, h.half_width);
  std::vector<std::vector<std::string>> rows;
  for (int iy = 0; iy < h.bins; ++iy)
    for (int ix = 0; ix < h.bins; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * h.bins + ix;
      std::vector<std::string> r{format_number(h.center(ix)), format_number(h.center(iy)), std::to_string(h.counts[i]),
                                 format_number(po[i])};
      if (!p.empty()) r.push_back(format_number(p[i]));
      rows.push_back(std::move(r));
    }
  std::vector<std::string> header{"x", "y", "count", "observed_density"};
  if (!p.empty()) header.push_back("predicted_density");
  write_csv(ctx.path(name), header, rows);
}

void write_image_csv(const std::string& path, const ReconstructionResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t y = 0; y < r.height; ++y) {
    std::vector<std::string> row;
    for (std::size_t x = 0; x < r.width; ++x) row.push_back(format_number(r.values[y * r.width + x]));
    rows.push_back(std::move(row));
  }
  write_csv(path, {}, rows);
}

void cmd_kernel_check(Context& ctx) {
  const Model m = build_model(ctx.cfg);
  const KernelCheckReport rep = run_kernel_checks(m.kernel, *m.fk, *m.ac);
  write_json(ctx.path("kernel_check.json"), to_json(rep));
  ctx.out.pass = rep.all_pass();
  std::ostringstream s;
  for (const CheckItem& c : rep.checks)
    s << (c.pass ? "PASS " : (c.required ? "FAIL " : "INFO ")) << c.name << " error=" << format_number(c.error)
      << " tol=" << format_number(c.tolerance) << "\n";
  s << "parseval_constant=" << format_number(rep.parseval_constant) << "\n";
  ctx.out.summary = s.str();
}

void cmd_predict(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const Model m = build_model(c, false);
  const PredictedCovariance pred = predict(m, c);
  Json j = to_json(pred);
  j["psd"] = is_psd(pred.matrix);
  j["assumptions"] = to_json(check_assumptions(m.grid, c.x0, m.field));
  write_json(ctx.path("predicted_covariance.json"), j);

  // C(v) along the direction of the first nonzero offset difference (x axis if none)
  Vec2 u{1.0, 0.0};
  for (std::size_t i = 1; i < c.offsets.size(); ++i) {
    const Vec2 d = c.offsets[i] - c.offsets[0];
    const double n = std::hypot(d.x, d.y);
    if (n > 0.0) {
      u = (1.0 / n) * d;
      break;
    }
  }
  std::vector<std::vector<std::string>> rows;
  const double reach = 1.25 * 2.0 * m.kernel.support_radius();
  for (int i = -200; i <= 200; ++i) {
    const double s = reach * i / 200.0;
    const Vec2 v = s * u;
    rows.push_back({format_number(s), format_number(v.x), format_number(v.y),
                    format_number(predicted_cov_scalar(v, c.x0, m.field, *m.ac, c.kappa, c.quadrature_nodes))});
  }
  write_csv(ctx.path("cov_profile.csv"), {"s", "v_x", "v_y", "covariance"}, rows);
  std::ostringstream s;
  s << "C(0)=" << format_number(pred.c0) << " matrix=" << matrix_to_json(pred.matrix).dump() << "\n";
  ctx.out.summary = s.str();
  ctx.out.pass = is_psd(pred.matrix);
}

void cmd_simulate(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const Model m = build_model(c);
  const PredictedCovariance pred = predict(m, c);
  const NoiseDraw draw = draw_noise(m.grid, m.field, c.distribution, derive_sample_seed(c.master_seed, 0));
  if (c.export_sinogram) {
    export_sinogram((ctx.dir / "sinogram").string(), draw, m.grid, m.field);
    ctx.out.artifacts.push_back("sinogram.bin");
    ctx.out.artifacts.push_back("sinogram.json");
  }
  const Region full{-c.P, c.P, -c.P, c.P};
  const double e = m.grid.epsilon;
  const Region local{c.x0.x - e, c.x0.x + e, c.x0.y - e, c.x0.y + e};
  const ReconstructionResult img_full =
      reconstruct_image(draw.sinogram, full, c.image_resolution, m.grid, *m.fk, c.image_window, ctx.threads);
  const ReconstructionResult img_local =
      reconstruct_image(draw.sinogram, local, c.image_resolution, m.grid, *m.fk, c.image_window, ctx.threads);
  const std::string full_csv = ctx.path("image_full.csv");
  const std::string local_csv = ctx.path("image_local.csv");
  write_image_csv(full_csv, img_full);
  write_image_csv(local_csv, img_local);

  const ReconstructionResult patch = reconstruct_local(draw, m.patch, m.grid, *m.fk, c.window);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < patch.values.size(); ++i)
    rows.push_back({format_number(patch.offsets[i].x), format_number(patch.offsets[i].y),
                    format_number(patch.values[i])});
  write_csv(ctx.path("local_patch.csv"), {"offset_x", "offset_y", "value"}, rows);

  const EnsembleStats st =
      run_ensemble(c.n_samples, m.grid, m.patch, m.field, c.distribution, *m.fk, c.master_seed,
                   ensemble_options(c, pred, ctx.threads));
  write_json(ctx.path("ensemble_stats.json"), to_json(st));
  write_histogram_csv(ctx, "histogram.csv", st, &pred);

  if (c.plots) {
    render_pgm_from_csv(full_csv, ctx.path("image_full.pgm"));
    render_pgm_from_csv(local_csv, ctx.path("image_local.pgm"));
  }
  std::ostringstream s;
  s << "n=" << st.n_samples << " sample_cov=" << matrix_to_json(st.sample_cov).dump() << "\n";
  ctx.out.summary = s.str();
}

void cmd_validate(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const Model m = build_model(c);
  const PredictedCovariance pred = predict(m, c);
  const EnsembleStats st = run_ensemble(c.n_samples, m.grid, m.patch, m.field, c.distribution, *m.fk, c.master_seed,
                                        ensemble_options(c, pred, ctx.threads));
  const ComparisonReport rep = compare(st, pred, c.thresholds);
  write_json(ctx.path("predicted_covariance.json"), to_json(pred));
  write_json(ctx.path("ensemble_stats.json"), to_json(st));
  write_histogram_csv(ctx, "histogram.csv", st, &pred);
  Json j = to_json(rep);
  j["thresholds"] = {{"cov_error", c.thresholds.cov_error}, {"pdf_error", c.thresholds.pdf_error}};
  write_json(ctx.path("comparison_report.json"), j);
  ctx.out.pass = rep.pass();
  std::ostringstream s;
  s << "cov_error=" << format_number(rep.cov_error_frobenius);
  if (rep.pdf_error_l2) s << " pdf_error=" << format_number(*rep.pdf_error_l2);
  s << " mean_norm=" << format_number(rep.mean_norm) << (rep.pass() ? " PASS" : " FAIL") << "\n";
  ctx.out.summary = s.str();
}

void cmd_sweep(Context& ctx) {
  const ExperimentConfig& c = ctx.cfg;
  const Model m = build_model(c);
  const std::vector<double> eps = c.resolved_sweep();
  if (eps.size() < 2) fail(ErrorCode::Config, "config: sweep needs at least two points");
  const PredictedCovariance pred = predict(m, c);
  SweepBase base;
  base.kappa = c.kappa;
  base.P = c.P;
  base.convention = c.convention;
  base.x0 = c.x0;
  base.offsets = c.offsets;
  base.field = &m.field;
  base.distribution = c.distribution;
  base.fk = m.fk.get();
  base.prediction = &pred;
  base.master_seed = c.master_seed;
  base.options = ensemble_options(c, pred, ctx.threads);
  base.thresholds = c.thresholds;
  const std::size_t n = c.sweep_n_samples ? c.sweep_n_samples : c.n_samples;
  SweepResult res;
  try {
    res = epsilon_sweep(eps, n, base);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Domain || e.code() == ErrorCode::InvalidArgument)
      fail(ErrorCode::Config, std::string("config: sweep: ") + e.what());
    throw;
  }
  std::vector<std::vector<std::string>> rows;
  for (const SweepRow& r : res.rows)
    rows.push_back({format_number(r.epsilon), std::to_string(r.n), format_number(r.cov_error),
                    format_number(r.pdf_error), format_number(r.mean_norm)});
  write_csv(ctx.path("sweep.csv"), {"epsilon", "n", "cov_error_frobenius", "pdf_error_l2", "mean_norm"}, rows);

  // theory-side series on the same epsilons
  const double C = parseval_constant(m.kernel);
  const double limit = d_epsilon_limit(c.x0, m.field, C, c.quadrature_nodes);
  std::vector<double> theta(c.offsets.size(), 0.0);
  theta[0] = 1.0;
  if (theta.size() >= 2) theta[1] = -1.0;
  std::vector<std::vector<std::string>> trows;
  for (double e : eps) {
    const GridSpec g = build_grid(e, c.kappa, std::nullopt, c.P, c.convention);
    const double d = d_epsilon(g, c.x0, c.offsets[0], m.field, *m.fk);
    const double ratio = lyapunov_ratio(g, c.x0, c.offsets[0], m.field, *m.fk, c.distribution);
    const SecondMoment sm = second_moment_multi(g, c.x0, c.offsets, theta, m.field, *m.fk);
    trows.push_back({format_number(e), format_number(d), format_number(std::abs(d - limit)), format_number(ratio),
                     format_number(std::abs(sm.exact - sm.frozen))});
  }
  write_csv(ctx.path("theory_sweep.csv"), {"epsilon", "d_epsilon", "d_epsilon_error", "ratio", "gap"}, trows);

  // coarse-end error and rank trend
  double coarse_err = -1.0, best = 1e300;
  for (const SweepRow& r : res.rows)
    if (std::abs(r.epsilon - c.sweep_coarse_epsilon) < best) {
      best = std::abs(r.epsilon - c.sweep_coarse_epsilon);
      coarse_err = r.cov_error;
    }
  const bool coarse_ok = best <= 1e-12 * c.sweep_coarse_epsilon && coarse_err > c.sweep_min_coarse_error;
  const bool trend_ok = res.rank_correlation > c.sweep_min_rank_correlation;
  Json j;
  j["schema"] = kSchemaVersion;
  j["points"] = res.rows.size();
  j["rank_correlation"] = res.rank_correlation;
  j["coarse_epsilon"] = c.sweep_coarse_epsilon;
  j["coarse_cov_error"] = best <= 1e-12 * c.sweep_coarse_epsilon ? Json(coarse_err) : Json(nullptr);
  j["coarse_pass"] = coarse_ok;
  j["trend_pass"] = trend_ok;
  j["d_epsilon_limit"] = limit;
  j["pass"] = coarse_ok && trend_ok;
  write_json(ctx.path("sweep_report.json"), j);
  ctx.out.pass = coarse_ok && trend_ok;
  std::ostringstream s;
  s << "rank_correlation=" << format_number(res.rank_correlation) << " coarse_error=" << format_number(coarse_err)
    << (ctx.out.pass ? " PASS" : " FAIL") << "\n";
  ctx.out.summary = s.str();
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) text += ',';
      text += csv_field(r[i]);
    }
    text += "\r\n";
  };
  if (!header.empty()) line(header);
  for (const auto& r : rows) line(r);
  write_text(path, text);
}

void render_pgm_from_csv(const std::string& csv_path, const std::string& pgm_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + csv_path);
  std::vector<std::vector<double>> grid;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t next = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      std::from_chars(line.data() + pos, line.data() + next, v);
      row.push_back(v);
      pos = next + 1;
    }
    grid.push_back(std::move(row));
  }
  if (grid.empty()) fail(ErrorCode::Io, csv_path + " has no data");
  double lo = grid[0][0], hi = grid[0][0];
  for (const auto& r : grid)
    for (double v : r) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const std::size_t w = grid[0].size(), h = grid.size();
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (const auto& r : grid)
    for (std::size_t x = 0; x < w; ++x) {
      const double v = x < r.size() ? r[x] : lo;
      const double u = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * u)));
    }
  write_text(pgm_path, out);
}

Outcome run_command(Command cmd, const ExperimentConfig& c) {
  fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + c.output_dir);
  const unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  Context ctx{c, dir, {}, threads};
  write_json(ctx.path("effective_config.json"), to_json(c));
  switch (cmd) {
    case Command::KernelCheck: cmd_kernel_check(ctx); break;
    case Command::Predict: cmd_predict(ctx); break;
    case Command::Simulate: cmd_simulate(ctx); break;
    case Command::Validate: cmd_validate(ctx); break;
    case Command::Sweep: cmd_sweep(ctx); break;
  }
  return ctx.out;
}

}  // namespace lra
