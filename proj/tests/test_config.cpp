#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lra/config.hpp"
#include "lra/error.hpp"
#include "lra/workflows.hpp"

using namespace lra;

namespace {
Json minimal() {
  return Json::parse(R"({"schema": 1, "grid": {"j_m": 100}, "x0": [0.1, 0.2], "offsets": [[0, 0], [0.5, 0.5]]})");
}

ErrorCode code_of(const Json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config was accepted");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("defaults") {
  const ExperimentConfig c = config_from_json(minimal());
  CHECK(c.resolved_epsilon() == 0.01);
  CHECK(c.kappa == doctest::Approx(6.283185307179586).epsilon(1e-16));
  CHECK(c.distribution == Distribution::Uniform);
  CHECK(c.kernel.kind == "keys");
  CHECK(c.n_samples == 10000);
  CHECK(c.histogram_bins == 16);
  CHECK(c.thresholds.cov_error == 0.07);
  CHECK(c.convention == AngleConvention::FullTurn);
  const GridSpec g = make_grid(c);
  CHECK(g.angle_count() == 100);
  CHECK(make_patch(c).size() == 2);
}

TEST_CASE("round trip") {
  Json j = minimal();
  j["grid"]["p_bar"] = -1.25;
  j["grid"]["convention"] = "centered";
  j["variance_field"] = {{"kind", "constant"}, {"value", 0.5}};
  j["distribution"] = "gaussian";
  j["kernel"] = {{"kind", "keys"}, {"a", -0.75}};
  j["sweep"] = {{"j_m", {8, 16}}, {"epsilon", {0.001}}, {"n_samples", 500}};
  j["thresholds"] = {{"cov_error", 0.08}};
  j["master_seed"] = 18446744073709551615ull;
  const ExperimentConfig c = config_from_json(j);
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(back == c);
  CHECK(to_json(back).dump() == to_json(c).dump());
  CHECK(back.master_seed == 18446744073709551615ull);
  CHECK(back.resolved_sweep() == std::vector<double>{0.125, 0.0625, 0.001});
  CHECK(back.p_bar.value() == -1.25);
}

TEST_CASE("rejections are config errors") {
  Json j = minimal();
  j["colour"] = "blue";
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j.erase("schema");
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["schema"] = 2;
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["grid"]["epsilon"] = 0.01;
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["grid"] = {{"j_m", 4}};
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["offsets"] = Json::array({Json::array({0, 0}), Json::array({0, 0})});
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["distribution"] = "cauchy";
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["kernel"] = {{"kind", "lanczos"}};
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["n_samples"] = -5;
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["x0"] = {1.0};
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["histogram"] = {{"bins", 16}, {"edges", 3}};
  CHECK(code_of(j) == ErrorCode::Config);
  j = minimal();
  j["variance_field"] = {{"kind", "constant"}, {"value", -1.0}};
  CHECK(code_of(j) == ErrorCode::Config);
}

TEST_CASE("loading from disk") {
  const auto path = std::filesystem::temp_directory_path() / "lra_config_test.json";
  {
    std::ofstream out(path);
    out << minimal().dump();
  }
  CHECK(load_config(path.string()).resolved_epsilon() == 0.01);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path.string()), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path.string()), Error);
}

TEST_CASE("commands") {
  CHECK(command_from_string("kernel-check") == Command::KernelCheck);
  CHECK(to_string(Command::Sweep) == "sweep");
  CHECK_THROWS_AS(command_from_string("plot"), Error);
}

TEST_CASE("csv formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
  CHECK(format_number(3.0) == "3");
  const auto path = std::filesystem::temp_directory_path() / "lra_csv_test.csv";
  write_csv(path.string(), {"a", "b,c"}, {{"1", "say \"hi\""}, {"x\ny", ""}});
  std::ifstream in(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "a,\"b,c\"\r\n1,\"say \"\"hi\"\"\"\r\n\"x\ny\",\r\n");
  std::filesystem::remove(path);
}
