#pragma once

#include "dialnorm/geotasks/compare.hpp"

#include <string>

namespace dialnorm::geo {

/// JSON objects mirroring the report structs field for field.
std::string to_json(const ClassReport& r);
std::string to_json(const RegReport& r);
std::string to_json(const ComparisonReport& r);

/// `label,precision,recall,f1-score,support` with per-class rows followed by
/// accuracy, macro avg and weighted avg.
std::string format_class_table(const ClassReport& r);

/// `model,lat MAE,lon MAE,lat MSE,lon MSE`, one row per named report.
std::string format_regression_table(const std::vector<std::pair<std::string, RegReport>>& rows);

}  // namespace dialnorm::geo
