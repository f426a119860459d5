#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "lra_noise.h"

TEST_CASE("version and errors") {
  CHECK(std::strlen(lra_version()) > 0);
  lra_kernel* k = nullptr;
  CHECK(lra_kernel_from_json("{", &k) == LRA_ERR_CONFIG);
  CHECK(k == nullptr);
  CHECK(std::strlen(lra_last_error()) > 0);
  CHECK(lra_kernel_create_keys(-0.5, nullptr) == LRA_ERR_INVALID_ARGUMENT);
  REQUIRE(lra_kernel_create_keys(-0.5, &k) == LRA_OK);
  CHECK(std::strlen(lra_last_error()) == 0);
  double v = 0.0;
  CHECK(lra_kernel_eval(k, 0.5, 7, &v) == LRA_ERR_INVALID_ARGUMENT);
  lra_kernel_destroy(k);
  lra_kernel_destroy(nullptr);
}

TEST_CASE("kernels and tables") {
  lra_kernel* k = nullptr;
  REQUIRE(lra_kernel_create_keys(-0.5, &k) == LRA_OK);
  double v = 0.0, re = 0.0, im = 1.0;
  REQUIRE(lra_kernel_eval(k, 0.5, 0, &v) == LRA_OK);
  CHECK(v == doctest::Approx(0.5625));
  REQUIRE(lra_kernel_spectrum(k, 0.0, &re, &im) == LRA_OK);
  CHECK(re == doctest::Approx(1.0));
  CHECK(im == 0.0);

  char* js = nullptr;
  REQUIRE(lra_kernel_to_json(k, &js) == LRA_OK);
  lra_kernel* k2 = nullptr;
  REQUIRE(lra_kernel_from_json(js, &k2) == LRA_OK);
  lra_string_free(js);
  REQUIRE(lra_kernel_eval(k2, 1.3, 1, &v) == LRA_OK);
  double w = 0.0;
  lra_kernel_eval(k, 1.3, 1, &w);
  CHECK(v == w);

  lra_table* t = nullptr;
  REQUIRE(lra_table_build(k, 1e-3, 24.0, &t) == LRA_OK);
  REQUIRE(lra_table_value(t, 0.0, &v) == LRA_OK);
  CHECK(v == doctest::Approx(1.765084801221).epsilon(1e-10));
  CHECK(lra_table_build(k, 1e-3, 3.0, &t) == LRA_ERR_INVALID_ARGUMENT);
  REQUIRE(lra_table_to_json(t, &js) == LRA_OK);
  lra_table* t2 = nullptr;
  REQUIRE(lra_table_from_json(js, &t2) == LRA_OK);
  lra_string_free(js);
  lra_table_value(t2, 3.0, &w);
  lra_table_value(t, 3.0, &v);
  CHECK(v == w);
  lra_table_destroy(t);
  lra_table_destroy(t2);
  lra_kernel_destroy(k);
  lra_kernel_destroy(k2);
}

TEST_CASE("experiments") {
  const char* cfg = R"({"schema": 1, "grid": {"j_m": 64}, "x0": [0.3535533905932738, 0.4330127018922193],
                        "offsets": [[0, 0], [0.35355339059327373, 0.35355339059327373]], "n_samples": 200})";
  lra_experiment* e = nullptr;
  CHECK(lra_experiment_create(R"({"schema": 3})", &e) == LRA_ERR_CONFIG);
  REQUIRE(lra_experiment_create(cfg, &e) == LRA_OK);
  double m[4] = {0, 0, 0, 0};
  size_t n = 0;
  CHECK(lra_experiment_predict(e, m, 1, &n) == LRA_ERR_INVALID_ARGUMENT);
  CHECK(n == 2);
  REQUIRE(lra_experiment_predict(e, m, 4, &n) == LRA_OK);
  CHECK(m[0] == doctest::Approx(1.36).epsilon(0.01));
  CHECK(m[1] == doctest::Approx(0.86).epsilon(0.01));
  CHECK(m[1] == m[2]);

  const auto dir = std::filesystem::temp_directory_path() / "lra_capi_test";
  std::filesystem::remove_all(dir);
  REQUIRE(lra_experiment_set_output_dir(e, dir.string().c_str()) == LRA_OK);
  CHECK(lra_experiment_set_output_dir(e, "") == LRA_ERR_INVALID_ARGUMENT);
  REQUIRE(lra_experiment_set_seed(e, 99) == LRA_OK);
  REQUIRE(lra_experiment_set_threads(e, 2) == LRA_OK);
  char* js = nullptr;
  REQUIRE(lra_experiment_config_json(e, &js) == LRA_OK);
  CHECK(std::string(js).find("\"master_seed\": 99") != std::string::npos);
  lra_string_free(js);

  lra_command c;
  REQUIRE(lra_command_from_name("predict", &c) == LRA_OK);
  CHECK(c == LRA_CMD_PREDICT);
  CHECK(lra_command_from_name("draw", &c) != LRA_OK);
  int passed = 0;
  char* summary = nullptr;
  REQUIRE(lra_experiment_run(e, LRA_CMD_PREDICT, &passed, &summary) == LRA_OK);
  CHECK(passed == 1);
  CHECK(std::string(summary).find("C(0)=") == 0);
  lra_string_free(summary);
  CHECK(std::filesystem::exists(dir / "predicted_covariance.json"));
  CHECK(std::filesystem::exists(dir / "effective_config.json"));
  CHECK(lra_experiment_run(e, static_cast<lra_command>(42), &passed, nullptr) == LRA_ERR_INVALID_ARGUMENT);
  lra_experiment_destroy(e);
  std::filesystem::remove_all(dir);

  CHECK(lra_experiment_load("/nonexistent/config.json", &e) == LRA_ERR_CONFIG);
}
