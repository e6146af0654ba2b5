#include "support.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace dialnorm;
using testing::Gen;

TEST_CASE("nfc composes decomposed Greek and trims") {
    const std::string decomposed = "\xCE\xBF\xCC\x81";  // ο + combining acute
    CHECK(unicode::nfc(decomposed) == "ό");
    CHECK(unicode::canonical("  Λέσβος \t") == "Λέσβος");
    CHECK(unicode::is_nfc("ό"));
    CHECK_FALSE(unicode::is_nfc(decomposed));
}

TEST_CASE("invalid UTF-8 is rejected") {
    CHECK_THROWS_AS(unicode::validate_utf8("abc\xC3"), DecodeError);
    CHECK_THROWS_AS(unicode::validate_utf8("\xED\xA0\x80"), DecodeError);
    CHECK(unicode::is_valid_utf8("Θεός"));
}

TEST_CASE("tokenize keeps apostrophes inside words and reports byte spans") {
    const std::string text = "Γίδα ψουριάρα, νουρά κουρδουμέν'";
    const auto toks = unicode::tokenize(text);
    REQUIRE(toks.size() == 4);
    CHECK(toks[3].text == "κουρδουμέν'");
    for (const auto& t : toks) CHECK(text.substr(t.begin, t.end - t.begin) == t.text);
}

TEST_CASE("csv parser handles quotes, embedded separators and CRLF") {
    const auto rows = csv::parse("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\"multi\nline\",z\n\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].fields == std::vector<std::string>{"x, y", "say \"hi\""});
    CHECK(rows[2].fields[0] == "multi\nline");
    CHECK(rows[2].line == 3);
    CHECK_THROWS_AS(csv::parse("\"open\n"), RowError);
}

TEST_CASE("csv quote/format round-trips random fields") {
    Gen g(11);
    const std::vector<std::string> pieces{"a", ",", "\"", "\n", "Θ", " ", "\r\n", "x y"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> fields;
        const int n = g.integer(1, 5);
        for (int i = 0; i < n; ++i) {
            std::string f;
            const int len = g.integer(1, 6);
            for (int j = 0; j < len; ++j) f += g.pick(pieces);
            fields.push_back(f);
        }
        const auto rows = csv::parse(csv::format_row(fields));
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].fields == fields);
    }
}

TEST_CASE("load_corpus: Figure-style sentence, header only, empty text") {
    const auto c = parse_corpus("text,area\n\"Ου Θεός κι ου γείτονας.\",Macedonia\n");
    REQUIRE(c.size() == 1);
    CHECK(c.records[0].region.name == "Macedonia");
    CHECK(c.records[0].id == 0);
    CHECK(c.source_digest.size() == 64);

    CHECK(parse_corpus("text,area\n").empty());

    try {
        parse_corpus("text,area\nκάτι,Crete\n,Crete\n");
        FAIL("expected a row error");
    } catch (const RowError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("load_corpus: schema errors name the column; extra columns ignored; NFC applied") {
    try {
        parse_corpus("text,region\nx,y\n");
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("area") != std::string::npos);
    }
    const auto c = parse_corpus("id,area,text,extra\n9,\" Crete \",\"\xCE\xBF\xCC\x81\",z\n");
    CHECK(c.records[0].text == "ό");
    CHECK(c.records[0].region.name == "Crete");
    CHECK_THROWS_AS(parse_corpus("text,area\n\xC3,Crete\n"), DecodeError);
}

TEST_CASE("custom column names") {
    const auto c = parse_corpus("proverb,place\nλόγος,Naxos\n", {"proverb", "place"});
    CHECK(c.records[0].text == "λόγος");
}

TEST_CASE("load_coordinates: valid, out of range, duplicate") {
    const auto t = parse_coordinates("area,lat,lon\nCrete,35.24,24.81\nPontus,41.0,39.7\n");
    CHECK(t.at(Region("Crete")) == GeoPoint{35.24, 24.81});
    CHECK_THROWS_AS(parse_coordinates("area,lat,lon\nCrete,95,24\n"), RangeError);
    CHECK_THROWS_AS(parse_coordinates("area,lat,lon\nCrete,35,24\nCrete,35,24\n"), ConflictError);
    CHECK_THROWS_AS(parse_coordinates("area,lat,lon\nCrete,north,24\n"), RowError);

    auto c = testing::make_corpus({{"α", "Crete"}, {"β", "Atlantis"}});
    CHECK_THROWS_AS(attach_coordinates(c, t), LookupError);
}

TEST_CASE("split_corpus: counts, disjointness, determinism") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 10; ++i) rows.emplace_back("λόγος " + std::to_string(i), "Crete");
    const auto c = testing::make_corpus(rows);
    const auto [train, test] = split_corpus(c, 0.2, 7);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
    std::set<std::size_t> ids;
    for (const auto& r : train) ids.insert(r.id);
    for (const auto& r : test) CHECK(ids.insert(r.id).second);
    CHECK(ids.size() == 10);

    const auto [train2, test2] = split_corpus(c, 0.2, 7);
    CHECK(split_test_ids(c, 0.2, 7) == split_test_ids(c, 0.2, 7));
    for (std::size_t i = 0; i < test.size(); ++i) CHECK(test.records[i].id == test2.records[i].id);
}

TEST_CASE("split_corpus: 23 regions x 25 records at 0.2 gives 115 test records") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int r = 0; r < 23; ++r) {
        for (int i = 0; i < 25; ++i) rows.emplace_back("κείμενο", "Region" + std::to_string(r));
    }
    const auto [train, test] = split_corpus(testing::make_corpus(rows), 0.2, 1);
    CHECK(test.size() == 115);
    CHECK(train.size() == 460);
}

TEST_CASE("split_corpus property: stratification and partition over random corpora") {
    Gen g(23);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, std::string>> rows;
        std::map<std::string, int> sizes;
        const int regions = g.integer(1, 6);
        for (int r = 0; r < regions; ++r) {
            const int n = g.integer(2, 30);
            for (int i = 0; i < n; ++i) rows.emplace_back("κ", "R" + std::to_string(r));
        }
        std::shuffle(rows.begin(), rows.end(), g.engine());
        for (const auto& [t, r] : rows) ++sizes[r];
        const auto c = testing::make_corpus(rows);
        const double fraction = g.uniform(0.05, 0.5);
        const auto seed = static_cast<std::uint64_t>(g.integer(0, 1000));
        const auto [train, test] = split_corpus(c, fraction, seed);
        CHECK(train.size() + test.size() == c.size());
        std::map<std::string, int> got;
        for (const auto& r : test) ++got[r.region.name];
        for (const auto& [region, n] : sizes) {
            CHECK(got[region] == static_cast<int>(std::ceil(fraction * n)));
        }
        for (std::size_t i = 1; i < test.size(); ++i) CHECK(test.records[i - 1].id < test.records[i].id);
    }
}

TEST_CASE("split_corpus errors") {
    const auto c = testing::make_corpus({{"α", "Crete"}, {"β", "Crete"}, {"γ", "Naxos"}});
    CHECK_THROWS_AS(split_corpus(c, 0.2, 0), StratificationError);
    CHECK_THROWS_AS(split_corpus(c, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(split_corpus(c, 1.0, 0), ConfigError);
}

TEST_CASE("write_corpus round-trips random corpora byte-identically") {
    testing::TempDir dir;
    Gen g(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<std::string, std::string>> rows;
        const int n = g.integer(0, 12);
        for (int i = 0; i < n; ++i) {
            std::string text = testing::random_sentence(g);
            if (g.coin(0.3)) text += ", \"quoted\"";
            rows.emplace_back(text, g.coin() ? "Crete" : "Eastern Thrace");
        }
        const auto c = testing::make_corpus(rows);
        std::vector<std::string> extra;
        for (int i = 0; i < n; ++i) extra.push_back(g.coin() ? "" : "x,\"y\"");
        const auto path = dir / "c.csv";
        write_corpus(c, path, {{"normalized", extra}});
        const auto bytes = testing::read_text(path);
        CHECK(bytes == format_corpus(c, {{"normalized", extra}}));
        const auto back = load_corpus(path);
        REQUIRE(back.size() == c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(back.records[i].text == c.records[i].text);
            CHECK(back.records[i].region == c.records[i].region);
        }
    }
}

TEST_CASE("write_corpus rejects an extra column of the wrong length") {
    const auto c = testing::make_corpus({{"α", "Crete"}});
    try {
        format_corpus(c, {{"normalized", {"a", "b"}}});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("normalized") != std::string::npos);
    }
    CHECK(format_corpus(c).rfind("id,text,area\n", 0) == 0);
}
