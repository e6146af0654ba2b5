#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/geotasks/models.hpp"
#include "dialnorm/unicode.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace dialnorm::sem {

/// Maps a batch of texts to (lat, lon) rows.
using CoordinatePredictor = std::function<geo::Targets(const std::vector<std::string>&)>;

/// Removes one token occurrence together with one adjacent whitespace run
/// (the following one, else the preceding one).
std::string erase_token(std::string_view text, const unicode::Token& tok);

struct TokenInfluence {
    std::string token;
    /// Mean of prediction(masked) - prediction(original).
    double mean_dlat = 0.0;
    double mean_dlon = 0.0;
    int count = 0;

    /// original - masked: positive pulls the prediction north / east.
    double north() const noexcept { return -mean_dlat; }
    double east() const noexcept { return -mean_dlon; }
};

struct AttributionReport {
    std::vector<TokenInfluence> tokens;  ///< sorted by token
    std::vector<TokenInfluence> north;   ///< strongest northward pull first
    std::vector<TokenInfluence> south;
    std::vector<TokenInfluence> east;
    std::vector<TokenInfluence> west;
};

/// Input erasure at word level. When `keep` is set, only tokens it accepts
/// are masked.
AttributionReport erase_and_attribute(const std::vector<std::string>& texts, const CoordinatePredictor& predict,
                                      const std::function<bool(const std::string&)>& keep = {});
AttributionReport erase_and_attribute(const Corpus& c, const CoordinatePredictor& predict,
                                      const std::function<bool(const std::string&)>& keep = {});

}  // namespace dialnorm::sem
