#include "dialnorm/geotasks/metrics.hpp"

#include "dialnorm/error.hpp"

#include <cmath>

namespace dialnorm::geo {

ClassReport classification_report(const Labels& y_true, const Labels& y_pred,
                                   const std::vector<std::string>& class_names) {
    if (y_true.size() != y_pred.size()) {
        throw ValidationError("y_true and y_pred differ in length");
    }
    const auto n_classes = static_cast<int>(class_names.size());
    auto check = [&](int label) {
        if (label < 0 || label >= n_classes) {
            throw ValidationError("label " + std::to_string(label) + " outside the region set");
        }
    };
    std::vector<int> tp(class_names.size(), 0);
    std::vector<int> predicted(class_names.size(), 0);
    std::vector<int> support(class_names.size(), 0);
    int correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        check(y_true[i]);
        check(y_pred[i]);
        ++support[static_cast<std::size_t>(y_true[i])];
        ++predicted[static_cast<std::size_t>(y_pred[i])];
        if (y_true[i] == y_pred[i]) {
            ++tp[static_cast<std::size_t>(y_true[i])];
            ++correct;
        }
    }

    ClassReport report;
    const auto total = static_cast<int>(y_true.size());
    report.accuracy = total ? static_cast<double>(correct) / total : 0.0;
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        ClassMetrics m;
        m.label = class_names[c];
        m.support = support[c];
        m.precision = predicted[c] ? static_cast<double>(tp[c]) / predicted[c] : 0.0;
        m.recall = support[c] ? static_cast<double>(tp[c]) / support[c] : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        report.per_class.push_back(m);

        report.macro.precision += m.precision;
        report.macro.recall += m.recall;
        report.macro.f1 += m.f1;
        report.weighted.precision += m.precision * m.support;
        report.weighted.recall += m.recall * m.support;
        report.weighted.f1 += m.f1 * m.support;
    }
    if (n_classes > 0) {
        report.macro.precision /= n_classes;
        report.macro.recall /= n_classes;
        report.macro.f1 /= n_classes;
    }
    if (total > 0) {
        report.weighted.precision /= total;
        report.weighted.recall /= total;
        report.weighted.f1 /= total;
    }
    report.macro.support = report.weighted.support = total;
    return report;
}

RegReport regression_report(const Targets& y_true, const Targets& y_pred) {
    if (y_true.rows() == 0) throw ValidationError("regression report needs at least one row");
    if (y_true.rows() != y_pred.rows()) throw ValidationError("y_true and y_pred differ in length");
    const Targets err = y_pred - y_true;
    const double n = static_cast<double>(err.rows());
    RegReport r;
    r.lat_mae = err.col(0).cwiseAbs().sum() / n;
    r.lon_mae = err.col(1).cwiseAbs().sum() / n;
    r.lat_mse = err.col(0).squaredNorm() / n;
    r.lon_mse = err.col(1).squaredNorm() / n;
    r.lat_rmse = std::sqrt(r.lat_mse);
    r.lon_rmse = std::sqrt(r.lon_mse);
    r.avg_rmse = 0.5 * (r.lat_rmse + r.lon_rmse);
    return r;
}

}  // namespace dialnorm::geo
