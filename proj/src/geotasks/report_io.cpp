#include "dialnorm/geotasks/report_io.hpp"

#include "dialnorm/csv.hpp"

#include <json.hpp>

#include <cstdio>

namespace dialnorm::geo {

using nlohmann::json;

namespace {

json averaged(const AveragedMetrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

json class_json(const ClassReport& r) {
    json per = json::array();
    for (const auto& c : r.per_class) {
        per.push_back({{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1},
                       {"support", c.support}});
    }
    return {{"per_class", per}, {"accuracy", r.accuracy}, {"macro", averaged(r.macro)},
            {"weighted", averaged(r.weighted)}};
}

json reg_json(const RegReport& r) {
    return {{"lat_mae", r.lat_mae},   {"lon_mae", r.lon_mae},   {"lat_mse", r.lat_mse}, {"lon_mse", r.lon_mse},
            {"lat_rmse", r.lat_rmse}, {"lon_rmse", r.lon_rmse}, {"avg_rmse", r.avg_rmse}};
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string to_json(const ClassReport& r) { return class_json(r).dump(2); }

std::string to_json(const RegReport& r) { return reg_json(r).dump(2); }

std::string to_json(const ComparisonReport& r) {
    json cls = json::array();
    for (const auto& p : r.classification) {
        cls.push_back({{"model", p.model}, {"dialectal", class_json(p.dialectal)}, {"normalized", class_json(p.normalized)},
                       {"delta_macro_f1", p.delta_macro_f1}, {"delta_accuracy", p.delta_accuracy}});
    }
    json reg = json::array();
    for (const auto& p : r.regression) {
        reg.push_back({{"model", p.model}, {"dialectal", reg_json(p.dialectal)}, {"normalized", reg_json(p.normalized)},
                       {"delta_avg_rmse", p.delta_avg_rmse}});
    }
    return json{{"test_ids", r.test_ids}, {"classification", cls}, {"regression", reg}}.dump(2);
}

std::string format_class_table(const ClassReport& r) {
    std::string out = csv::format_row({"label", "precision", "recall", "f1-score", "support"});
    for (const auto& c : r.per_class) {
        out += csv::format_row({c.label, fixed2(c.precision), fixed2(c.recall), fixed2(c.f1), std::to_string(c.support)});
    }
    out += csv::format_row({"accuracy", "", "", fixed2(r.accuracy), std::to_string(r.macro.support)});
    for (const auto& [name, m] : {std::pair{"macro avg", r.macro}, std::pair{"weighted avg", r.weighted}}) {
        out += csv::format_row({name, fixed2(m.precision), fixed2(m.recall), fixed2(m.f1), std::to_string(m.support)});
    }
    return out;
}

std::string format_regression_table(const std::vector<std::pair<std::string, RegReport>>& rows) {
    std::string out = csv::format_row({"model", "lat MAE", "lon MAE", "lat MSE", "lon MSE"});
    for (const auto& [name, r] : rows) {
        out += csv::format_row({name, fixed2(r.lat_mae), fixed2(r.lon_mae), fixed2(r.lat_mse), fixed2(r.lon_mse)});
    }
    return out;
}

}  // namespace dialnorm::geo
