#pragma once

#include <json.hpp>

#include "loskit/dataset.hpp"
#include "loskit/encoding.hpp"
#include "loskit/metrics.hpp"
#include "loskit/model.hpp"
#include "loskit/pca.hpp"

namespace loskit {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

json read_json_file(const std::string& path);
void write_json_file(const json& j, const std::string& path);

// Hyperparameter objects; from_json applies defaults for absent keys and
// rejects unknown keys.
json to_json(const TreeParams& p);
TreeParams tree_params_from_json(const json& j, TreeParams base = {});
json to_json(const ForestParams& p);
ForestParams forest_params_from_json(const json& j, ForestParams base = {});
json to_json(const AdaBoostParams& p);
AdaBoostParams adaboost_params_from_json(const json& j, AdaBoostParams base = {});
json to_json(const GbmParams& p);
GbmParams gbm_params_from_json(const json& j, GbmParams base = {});
json to_json(const LogisticParams& p);
LogisticParams logistic_params_from_json(const json& j, LogisticParams base = {});

// Fitted models; envelope {model_type, version, params, payload}.
json model_to_json(const Model& model);
Model model_from_json(const json& j);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

json to_json(const PcaModel& m);
PcaModel pca_from_json(const json& j);

json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const json& j);

json to_json(const EncoderSet& enc);
EncoderSet encoders_from_json(const json& j);

json to_json(const MetricsReport& rep);
json to_json(const CleanReport& rep);
json to_json(const ProfileReport& rep);

}  // namespace loskit
