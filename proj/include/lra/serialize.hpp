#pragma once

#include <json.hpp>

#include "lra/assumptions.hpp"
#include "lra/ensemble.hpp"
#include "lra/kernel.hpp"
#include "lra/kernel_checks.hpp"
#include "lra/kernel_tables.hpp"
#include "lra/noise.hpp"
#include "lra/theory.hpp"
#include "lra/variance_field.hpp"

namespace lra {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const Kernel& k);
Kernel kernel_from_json(const Json& j);

Json to_json(const KernelTable& t);
KernelTable kernel_table_from_json(const Json& j);
Json to_json(const FilteredKernelTable& t);
FilteredKernelTable filtered_table_from_json(const Json& j);

Json to_json(const GridSpec& g);
Json to_json(const VarianceField& f);
VarianceField variance_field_from_json(const Json& j);

Json to_json(const AssumptionReport& r);
Json to_json(const KernelCheckReport& r);
Json to_json(const ThirdMomentReport& r);
Json to_json(const PredictedCovariance& p);
Json to_json(const EnsembleStats& s);
Json to_json(const ComparisonReport& r);
Json to_json(const LatticeSumProbe& p);

Json matrix_to_json(const Eigen::MatrixXd& m);
std::string hex64(std::uint64_t v);

}  // namespace lra
