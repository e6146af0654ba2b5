#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dialnorm {

/// Geographic area label. Always NFC-normalized and trimmed.
struct Region {
    std::string name;

    Region() = default;
    explicit Region(std::string n);

    auto operator<=>(const Region&) const = default;
};

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    /// Throws RangeError unless both coordinates are finite and in range.
    static GeoPoint checked(double lat, double lon);
    bool operator==(const GeoPoint&) const = default;
};

struct ProverbRecord {
    std::size_t id = 0;
    std::string text;
    Region region;
    std::optional<GeoPoint> coords;
};

struct Corpus {
    std::vector<ProverbRecord> records;
    std::string source_digest;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    auto begin() const noexcept { return records.begin(); }
    auto end() const noexcept { return records.end(); }

    /// Distinct regions in order of first appearance.
    std::vector<Region> regions() const;
};

struct CorpusColumns {
    std::string text = "text";
    std::string area = "area";
};

/// Reads a UTF-8 CSV with a header row containing the text and area columns.
/// Ids are assigned 0..n-1 in file order.
Corpus load_corpus(const std::filesystem::path& path, const CorpusColumns& columns = {});
Corpus parse_corpus(std::string_view bytes, const CorpusColumns& columns = {});

using CoordinateTable = std::map<Region, GeoPoint>;

/// `area,lat,lon` CSV. Duplicate areas raise ConflictError.
CoordinateTable load_coordinates(const std::filesystem::path& path);
CoordinateTable parse_coordinates(std::string_view bytes);

/// Fills `coords` on every record from the table; missing regions raise LookupError.
Corpus attach_coordinates(Corpus c, const CoordinateTable& table);

/// Stratified split: per region, ceil(fraction * n) records go to test.
/// Each side keeps the original ids and file order.
std::pair<Corpus, Corpus> split_corpus(const Corpus& c, double test_fraction, std::uint64_t seed);

/// Test-side record ids chosen by split_corpus, sorted ascending.
std::vector<std::size_t> split_test_ids(const Corpus& c, double test_fraction, std::uint64_t seed);

/// Keeps records whose id appears in `ids` (in corpus order).
Corpus select_ids(const Corpus& c, const std::vector<std::size_t>& ids);

using ExtraColumns = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// CSV bytes with header `id,text,area[,extras...]`.
std::string format_corpus(const Corpus& c, const ExtraColumns& extra_columns = {});
void write_corpus(const Corpus& c, const std::filesystem::path& path,
                  const ExtraColumns& extra_columns = {});

}  // namespace dialnorm
