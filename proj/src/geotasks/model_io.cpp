#include "dialnorm/geotasks/model_io.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"

#include <json.hpp>

#include <charconv>
#include <type_traits>

namespace dialnorm::geo {

using nlohmann::json;

namespace {

Analyzer parse_analyzer(const std::string& name) {
    if (name == "char") return Analyzer::CharNgram;
    if (name == "word") return Analyzer::Word;
    throw ConfigError("unknown analyzer '" + name + "' (expected char or word)");
}

/// `strict` requires every field, as written by to_json.
VectorizerConfig vectorizer_from_json(const json& v, bool strict) {
    VectorizerConfig cfg;
    auto field = [&](const char* key, auto& out) {
        if (strict || v.contains(key)) out = v.at(key).get<std::decay_t<decltype(out)>>();
    };
    std::string analyzer = "char";
    field("analyzer", analyzer);
    try {
        cfg.analyzer = parse_analyzer(analyzer);
    } catch (const ConfigError& e) {
        if (strict) throw SchemaError(e.what());
        throw;
    }
    field("ngram_lo", cfg.ngram_lo);
    field("ngram_hi", cfg.ngram_hi);
    field("min_df", cfg.min_df);
    field("lowercase", cfg.lowercase);
    field("sublinear_tf", cfg.sublinear_tf);
    return cfg;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("feature option '" + key + "' expects true or false, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("feature option '" + key + "' expects an integer, got '" + value + "'");
    }
    return out;
}

}  // namespace

VectorizerConfig parse_feature_spec(const std::string& spec) {
    VectorizerConfig cfg;
    if (spec.empty()) return cfg;
    if (spec.front() == '{' || (spec.ends_with(".json") && std::filesystem::exists(spec))) {
        try {
            cfg = vectorizer_from_json(json::parse(spec.front() == '{' ? spec : csv::read_file(spec)), false);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed feature config: ") + e.what());
        }
        cfg.validate();
        return cfg;
    }
    std::size_t start = 0;
    bool first = true;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        start = comma == std::string::npos ? spec.size() + 1 : comma + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (first && eq == std::string::npos) {
            const auto colon = item.find(':');
            cfg.analyzer = parse_analyzer(item.substr(0, colon));
            if (colon != std::string::npos) {
                const std::string range = item.substr(colon + 1);
                const auto dash = range.find('-');
                cfg.ngram_lo = parse_int("ngram", range.substr(0, dash));
                cfg.ngram_hi = dash == std::string::npos ? cfg.ngram_lo : parse_int("ngram", range.substr(dash + 1));
            } else if (cfg.analyzer == Analyzer::Word) {
                cfg.ngram_lo = cfg.ngram_hi = 1;
            }
        } else {
            const std::string key = item.substr(0, eq);
            const std::string value = eq == std::string::npos ? "true" : item.substr(eq + 1);
            if (key == "min_df") {
                cfg.min_df = parse_int(key, value);
            } else if (key == "lowercase") {
                cfg.lowercase = parse_bool(key, value);
            } else if (key == "sublinear" || key == "sublinear_tf") {
                cfg.sublinear_tf = parse_bool(key, value);
            } else {
                throw ConfigError("unknown feature option '" + key + "'");
            }
        }
        first = false;
    }
    cfg.validate();
    return cfg;
}

Targets SavedLinearModel::predict(const std::vector<std::string>& texts) const {
    return fit.predict(vectorizer.transform(texts));
}

std::string to_json(const SavedLinearModel& m) {
    const auto& cfg = m.vectorizer.config();
    json j;
    j["model"] = m.model;
    j["vectorizer"] = {
        {"analyzer", cfg.analyzer == Analyzer::CharNgram ? "char" : "word"},
        {"ngram_lo", cfg.ngram_lo},
        {"ngram_hi", cfg.ngram_hi},
        {"min_df", cfg.min_df},
        {"lowercase", cfg.lowercase},
        {"sublinear_tf", cfg.sublinear_tf},
    };
    j["terms"] = m.vectorizer.terms();
    j["idf"] = std::vector<double>(m.vectorizer.idf().data(), m.vectorizer.idf().data() + m.vectorizer.idf().size());
    json coef = json::array();
    for (Eigen::Index r = 0; r < m.fit.coef.rows(); ++r) coef.push_back({m.fit.coef(r, 0), m.fit.coef(r, 1)});
    j["coef"] = std::move(coef);
    j["intercept"] = {m.fit.intercept(0), m.fit.intercept(1)};
    return j.dump();
}

SavedLinearModel linear_model_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        const VectorizerConfig cfg = vectorizer_from_json(j.at("vectorizer"), true);

        auto terms = j.at("terms").get<std::vector<std::string>>();
        const auto idf_v = j.at("idf").get<std::vector<double>>();
        const auto& coef = j.at("coef");
        if (idf_v.size() != terms.size() || coef.size() != terms.size()) {
            throw SchemaError("terms, idf and coef lengths differ");
        }
        SavedLinearModel m;
        m.model = j.value("model", std::string("linreg"));
        m.vectorizer = TfidfVectorizer::from_parts(
            cfg, std::move(terms), Eigen::Map<const Eigen::VectorXd>(idf_v.data(), static_cast<Eigen::Index>(idf_v.size())));
        m.fit.coef.resize(static_cast<Eigen::Index>(coef.size()), 2);
        for (std::size_t r = 0; r < coef.size(); ++r) {
            m.fit.coef(static_cast<Eigen::Index>(r), 0) = coef[r].at(0).get<double>();
            m.fit.coef(static_cast<Eigen::Index>(r), 1) = coef[r].at(1).get<double>();
        }
        m.fit.intercept << j.at("intercept").at(0).get<double>(), j.at("intercept").at(1).get<double>();
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    }
}

void save_linear_model(const std::filesystem::path& path, const SavedLinearModel& m) {
    csv::write_file_atomic(path, to_json(m) + "\n");
}

SavedLinearModel load_linear_model(const std::filesystem::path& path) {
    return linear_model_from_json(csv::read_file(path));
}

}  // namespace dialnorm::geo
