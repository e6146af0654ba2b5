#pragma once

#include "dialnorm/geotasks/linreg.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dialnorm::geo {

/// A fitted text-to-coordinates linear model: vectorizer plus affine map.
struct SavedLinearModel {
    std::string model;
    TfidfVectorizer vectorizer;
    LinearFit fit;

    Targets predict(const std::vector<std::string>& texts) const;
};

std::string to_json(const SavedLinearModel& m);
/// Throws SchemaError on missing or malformed fields.
SavedLinearModel linear_model_from_json(const std::string& text);

/// Vectorizer settings from `char:1-4,min_df=2,lowercase=false,sublinear`
/// (analyzer first, then key=value options), an inline JSON object, or a
/// path to a .json file with the fields written by to_json. Omitted fields
/// keep their defaults; ConfigError on anything unrecognised.
VectorizerConfig parse_feature_spec(const std::string& spec);

void save_linear_model(const std::filesystem::path& path, const SavedLinearModel& m);
SavedLinearModel load_linear_model(const std::filesystem::path& path);

}  // namespace dialnorm::geo
