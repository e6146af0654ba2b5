#include "dialnorm/rating_io.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"

#include <charconv>
#include <optional>

namespace dialnorm {

namespace {

std::optional<double> number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

LabeledMatrix parse_rating_matrix(std::string_view text) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw SchemaError("rating matrix is empty");

    LabeledMatrix out;
    std::size_t first = 0;
    std::size_t skip_cols = 0;
    const auto& head = rows.front().fields;
    if (!head.empty() && head.front() == "record_id") {
        out.raters.assign(head.begin() + 1, head.end());
        first = 1;
        skip_cols = 1;
    } else if (!head.empty() && !number(head.front())) {
        out.raters = head;
        first = 1;
    }
    if (rows.size() <= first) throw SchemaError("rating matrix has no data rows");

    const std::size_t width = rows[first].fields.size() - skip_cols;
    if (width == 0) throw SchemaError("rating matrix has no rater columns");
    if (!out.raters.empty() && out.raters.size() != width) {
        throw RowError(rows.front().line, "header names " + std::to_string(out.raters.size()) + " raters but rows have " +
                                              std::to_string(width));
    }
    out.values.resize(static_cast<Eigen::Index>(rows.size() - first), static_cast<Eigen::Index>(width));
    for (std::size_t i = first; i < rows.size(); ++i) {
        const auto& f = rows[i].fields;
        if (f.size() != width + skip_cols) {
            throw RowError(rows[i].line, "expected " + std::to_string(width + skip_cols) + " fields, got " +
                                             std::to_string(f.size()));
        }
        for (std::size_t j = 0; j < width; ++j) {
            const auto v = number(f[j + skip_cols]);
            if (!v) throw RowError(rows[i].line, "non-numeric rating '" + f[j + skip_cols] + "'");
            out.values(static_cast<Eigen::Index>(i - first), static_cast<Eigen::Index>(j)) = *v;
        }
    }
    return out;
}

LabeledMatrix load_rating_matrix(const std::filesystem::path& path) {
    return parse_rating_matrix(csv::read_file(path));
}

}  // namespace dialnorm
