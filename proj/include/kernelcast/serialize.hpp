// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <variant>

#include "json.hpp"
#include "kernelcast/ensemble.hpp"
#include "kernelcast/modelsel.hpp"

namespace kernelcast {

using Json = nlohmann::json;

inline constexpr int model_format_version = 1;
inline constexpr int report_format_version = 1;

Json to_json(const Configuration& cfg);
Configuration configuration_from_json(const Json& j);

Json to_json(const ScalerSpec& spec);
ScalerSpec scaler_from_json(const Json& j);

Json to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const Json& j);

/// {format, version, kind: "kms", config, scaler, refs, sigmas, inner, ...}
Json to_json(const KmsModel& model);
KmsModel kms_model_from_json(const Json& j);

/// {format, version, kind: "ensemble", vote_seed, members: [model, ...]}
Json to_json(const Ensemble& ens);
Ensemble ensemble_from_json(const Json& j);

/// Failed configurations carry cv_ber null. Timing fields are omitted when
/// include_timing is false, which makes equal searches byte-identical.
Json to_json(const SearchReport& report, bool include_timing = true);
SearchReport search_report_from_json(const Json& j);

using Predictor = std::variant<KmsModel, Ensemble>;
Predictor predictor_from_json(const Json& j);
std::vector<LabelId> predict(const Predictor& p, const Matrix& queries);
const std::vector<std::string>& label_names(const Predictor& p);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace kernelcast
