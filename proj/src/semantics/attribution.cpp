#include "dialnorm/semantics/attribution.hpp"

#include "dialnorm/error.hpp"

#include <algorithm>
#include <map>

namespace dialnorm::sem {

namespace {

bool is_space_byte(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

constexpr std::size_t kBatch = 4096;

struct Occurrence {
    std::size_t text_index;
    std::string token;
};

}  // namespace

std::string erase_token(std::string_view text, const unicode::Token& tok) {
    std::size_t begin = tok.begin;
    std::size_t end = tok.end;
    if (end < text.size() && is_space_byte(text[end])) {
        while (end < text.size() && is_space_byte(text[end])) ++end;
    } else {
        while (begin > 0 && is_space_byte(text[begin - 1])) --begin;
    }
    std::string out(text.substr(0, begin));
    out.append(text.substr(end));
    return out;
}

AttributionReport erase_and_attribute(const std::vector<std::string>& texts, const CoordinatePredictor& predict,
                                      const std::function<bool(const std::string&)>& keep) {
    const geo::Targets original = predict(texts);
    if (original.rows() != static_cast<Eigen::Index>(texts.size())) {
        throw ValidationError("predictor returned " + std::to_string(original.rows()) + " rows for " +
                              std::to_string(texts.size()) + " texts");
    }

    struct Acc {
        double dlat = 0.0;
        double dlon = 0.0;
        int count = 0;
    };
    std::map<std::string, Acc> acc;

    std::vector<Occurrence> occ;
    std::vector<std::string> masked;
    auto flush = [&] {
        if (masked.empty()) return;
        const geo::Targets pred = predict(masked);
        if (pred.rows() != static_cast<Eigen::Index>(masked.size())) {
            throw ValidationError("predictor returned the wrong number of rows");
        }
        for (std::size_t m = 0; m < masked.size(); ++m) {
            auto& a = acc[occ[m].token];
            const auto row = static_cast<Eigen::Index>(m);
            const auto orig = static_cast<Eigen::Index>(occ[m].text_index);
            a.dlat += pred(row, 0) - original(orig, 0);
            a.dlon += pred(row, 1) - original(orig, 1);
            ++a.count;
        }
        occ.clear();
        masked.clear();
    };

    for (std::size_t i = 0; i < texts.size(); ++i) {
        for (const auto& tok : unicode::tokenize(texts[i])) {
            if (keep && !keep(tok.text)) continue;
            masked.push_back(erase_token(texts[i], tok));
            occ.push_back({i, tok.text});
            if (masked.size() >= kBatch) flush();
        }
    }
    flush();

    AttributionReport report;
    for (const auto& [token, a] : acc) {
        report.tokens.push_back({token, a.dlat / a.count, a.dlon / a.count, a.count});
    }
    auto ranked = [&](auto score) {
        auto v = report.tokens;
        std::stable_sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return score(x) > score(y); });
        return v;
    };
    report.north = ranked([](const TokenInfluence& t) { return t.north(); });
    report.south = ranked([](const TokenInfluence& t) { return -t.north(); });
    report.east = ranked([](const TokenInfluence& t) { return t.east(); });
    report.west = ranked([](const TokenInfluence& t) { return -t.east(); });
    return report;
}

AttributionReport erase_and_attribute(const Corpus& c, const CoordinatePredictor& predict,
                                      const std::function<bool(const std::string&)>& keep) {
    std::vector<std::string> texts;
    texts.reserve(c.size());
    for (const auto& r : c) texts.push_back(r.text);
    return erase_and_attribute(texts, predict, keep);
}

}  // namespace dialnorm::sem
