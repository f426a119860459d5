#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

#include "lra_noise.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitConfig = 2;

int report(lra_status st, const char* what) {
  std::fprintf(stderr, "lra-noise: %s: %s\n", what, lra_last_error());
  return st == LRA_OK ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local noise of filtered back-projection: kernel checks, covariance prediction, Monte Carlo"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool plots = false;
  const char* names[] = {"kernel-check", "predict", "simulate", "validate", "sweep"};
  const char* help[] = {"verify the filtered kernel table", "predicted limiting covariance",
                        "draw noise, reconstruct images and an ensemble", "compare ensemble against prediction",
                        "epsilon refinement study"};
  std::vector<CLI::Option*> seed_opts;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config, "JSON experiment file")->required()->check(CLI::ExistingFile);
    seed_opts.push_back(sub->add_option("--seed", seed, "master seed (overrides the config)"));
    sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    sub->add_flag("--plots", plots, "also write PGM renderings");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  lra_command cmd;
  if (lra_command_from_name(name.c_str(), &cmd) != LRA_OK) return report(LRA_ERR_CONFIG, "command");

  lra_experiment* exp = nullptr;
  lra_status st = lra_experiment_load(config.c_str(), &exp);
  if (st != LRA_OK) return report(st, "config");
  bool seed_given = false;
  for (auto* o : seed_opts) seed_given = seed_given || o->count() > 0;
  if (seed_given) lra_experiment_set_seed(exp, seed);
  if (threads) lra_experiment_set_threads(exp, threads);
  if (plots) lra_experiment_set_plots(exp, 1);

  int passed = 0;
  char* summary = nullptr;
  st = lra_experiment_run(exp, cmd, &passed, &summary);
  lra_experiment_destroy(exp);
  if (st != LRA_OK) return report(st, name.c_str());
  std::fputs(summary, stdout);
  lra_string_free(summary);
  return passed ? kExitOk : kExitThreshold;
}
