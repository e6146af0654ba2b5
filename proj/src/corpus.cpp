#include "dialnorm/corpus.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/digest.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <set>

namespace dialnorm {

Region::Region(std::string n) : name(unicode::canonical(n)) {
    if (name.empty()) throw ValidationError("region name is empty");
}

GeoPoint GeoPoint::checked(double lat, double lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon)) {
        throw RangeError("coordinates must be finite");
    }
    if (lat < -90.0 || lat > 90.0) throw RangeError("latitude out of range [-90, 90]: " + std::to_string(lat));
    if (lon < -180.0 || lon > 180.0) {
        throw RangeError("longitude out of range [-180, 180]: " + std::to_string(lon));
    }
    return GeoPoint{lat, lon};
}

std::vector<Region> Corpus::regions() const {
    std::vector<Region> out;
    std::set<Region> seen;
    for (const auto& r : records) {
        if (seen.insert(r.region).second) out.push_back(r.region);
    }
    return out;
}

namespace {

std::size_t column_index(const csv::Row& header, const std::string& name) {
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        if (unicode::trim(header.fields[i]) == name) return i;
    }
    throw SchemaError("missing column '" + name + "'");
}

double parse_double(const std::string& field, std::size_t line, const char* what) {
    const std::string s = unicode::trim(field);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw RowError(line, std::string("cannot parse ") + what + " '" + s + "'");
    }
    return v;
}

}  // namespace

Corpus parse_corpus(std::string_view bytes, const CorpusColumns& columns) {
    unicode::validate_utf8(bytes);
    const auto rows = csv::parse(bytes);
    if (rows.empty()) throw SchemaError("corpus file has no header row");
    const std::size_t text_col = column_index(rows.front(), columns.text);
    const std::size_t area_col = column_index(rows.front(), columns.area);

    Corpus c;
    c.source_digest = sha256_hex(bytes);
    c.records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::size_t needed = std::max(text_col, area_col) + 1;
        if (row.fields.size() < needed) throw RowError(row.line, "too few fields");
        std::string text = unicode::canonical(row.fields[text_col]);
        if (text.empty()) throw RowError(row.line, "empty '" + columns.text + "' cell");
        std::string area = unicode::canonical(row.fields[area_col]);
        if (area.empty()) throw RowError(row.line, "empty '" + columns.area + "' cell");
        c.records.push_back(ProverbRecord{c.records.size(), std::move(text), Region(std::move(area)), std::nullopt});
    }
    return c;
}

Corpus load_corpus(const std::filesystem::path& path, const CorpusColumns& columns) {
    return parse_corpus(csv::read_file(path), columns);
}

CoordinateTable parse_coordinates(std::string_view bytes) {
    unicode::validate_utf8(bytes);
    const auto rows = csv::parse(bytes);
    if (rows.empty()) throw SchemaError("coordinates file has no header row");
    const std::size_t area_col = column_index(rows.front(), "area");
    const std::size_t lat_col = column_index(rows.front(), "lat");
    const std::size_t lon_col = column_index(rows.front(), "lon");

    CoordinateTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() < std::max({area_col, lat_col, lon_col}) + 1) {
            throw RowError(row.line, "too few fields");
        }
        Region region(row.fields[area_col]);
        const double lat = parse_double(row.fields[lat_col], row.line, "lat");
        const double lon = parse_double(row.fields[lon_col], row.line, "lon");
        GeoPoint p;
        try {
            p = GeoPoint::checked(lat, lon);
        } catch (const RangeError& e) {
            throw RangeError("line " + std::to_string(row.line) + ": " + e.what());
        }
        if (!table.emplace(region, p).second) {
            throw ConflictError("line " + std::to_string(row.line) + ": duplicate area '" + region.name + "'");
        }
    }
    return table;
}

CoordinateTable load_coordinates(const std::filesystem::path& path) {
    return parse_coordinates(csv::read_file(path));
}

Corpus attach_coordinates(Corpus c, const CoordinateTable& table) {
    for (auto& r : c.records) {
        const auto it = table.find(r.region);
        if (it == table.end()) throw LookupError("no coordinates for region '" + r.region.name + "'");
        r.coords = it->second;
    }
    return c;
}

std::vector<std::size_t> split_test_ids(const Corpus& c, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test fraction must be in (0, 1)");
    }
    std::map<Region, std::vector<std::size_t>> by_region;
    for (const auto& r : c.records) by_region[r.region].push_back(r.id);

    std::vector<std::size_t> test;
    std::mt19937_64 rng(seed);
    for (auto& [region, ids] : by_region) {
        if (ids.size() < 2) {
            throw StratificationError("region '" + region.name + "' has fewer than 2 records");
        }
        // Fisher-Yates driven directly by the engine so results do not depend
        // on the standard library's distribution implementation.
        for (std::size_t i = ids.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
            std::swap(ids[i], ids[j]);
        }
        const auto n_test = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(ids.size()) - 1e-12));
        test.insert(test.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
    }
    std::sort(test.begin(), test.end());
    return test;
}

Corpus select_ids(const Corpus& c, const std::vector<std::size_t>& ids) {
    const std::set<std::size_t> keep(ids.begin(), ids.end());
    Corpus out;
    out.source_digest = c.source_digest;
    for (const auto& r : c.records) {
        if (keep.count(r.id)) out.records.push_back(r);
    }
    return out;
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& c, double test_fraction, std::uint64_t seed) {
    const auto test_ids = split_test_ids(c, test_fraction, seed);
    const std::set<std::size_t> in_test(test_ids.begin(), test_ids.end());
    Corpus train;
    Corpus test;
    train.source_digest = test.source_digest = c.source_digest;
    for (const auto& r : c.records) {
        (in_test.count(r.id) ? test : train).records.push_back(r);
    }
    return {std::move(train), std::move(test)};
}

std::string format_corpus(const Corpus& c, const ExtraColumns& extra_columns) {
    std::vector<std::string> header{"id", "text", "area"};
    for (const auto& [name, values] : extra_columns) {
        if (values.size() != c.size()) {
            throw ValidationError("extra column '" + name + "' has " + std::to_string(values.size()) +
                                  " values, corpus has " + std::to_string(c.size()));
        }
        header.push_back(name);
    }
    std::string out = csv::format_row(header);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& r = c.records[i];
        std::vector<std::string> fields{std::to_string(r.id), r.text, r.region.name};
        for (const auto& col : extra_columns) fields.push_back(col.second[i]);
        out += csv::format_row(fields);
    }
    return out;
}

void write_corpus(const Corpus& c, const std::filesystem::path& path, const ExtraColumns& extra_columns) {
    csv::write_file_atomic(path, format_corpus(c, extra_columns));
}

}  // namespace dialnorm
