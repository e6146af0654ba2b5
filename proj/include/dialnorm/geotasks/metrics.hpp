#pragma once

#include "dialnorm/geotasks/models.hpp"

#include <string>
#include <vector>

namespace dialnorm::geo {

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;
};

struct AveragedMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;
};

struct ClassReport {
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    AveragedMetrics macro;
    AveragedMetrics weighted;
};

/// Per-class precision/recall/F1 with 0 wherever a denominator is 0.
/// `class_names[i]` names class index i; labels outside the range raise
/// ValidationError.
ClassReport classification_report(const Labels& y_true, const Labels& y_pred,
                                   const std::vector<std::string>& class_names);

struct RegReport {
    double lat_mae = 0.0;
    double lon_mae = 0.0;
    double lat_mse = 0.0;
    double lon_mse = 0.0;
    double lat_rmse = 0.0;
    double lon_rmse = 0.0;
    /// (lat_rmse + lon_rmse) / 2
    double avg_rmse = 0.0;
};

RegReport regression_report(const Targets& y_true, const Targets& y_pred);

}  // namespace dialnorm::geo
