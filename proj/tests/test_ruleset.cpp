#include "support.hpp"

#include "dialnorm/error.hpp"
#include "dialnorm/ruleset.hpp"
#include "dialnorm/unicode.hpp"

#include <doctest.h>

#include <map>

using namespace dialnorm;
using testing::Gen;

namespace {

const RuleSet& northern() { return default_rules()[DialectGroup::Northern]; }
const RuleSet& southern() { return default_rules()[DialectGroup::Southern]; }
const RuleSet& pontic() { return default_rules()[DialectGroup::Pontic]; }

/// Independent whole-word rewriter: split into maximal word runs and
/// replace runs whose case-folded form equals a pattern, rule by rule.
std::string whole_word_oracle(const RuleSet& rs, const std::string& text) {
    std::u32string cur = unicode::decode(text);
    for (const auto& rule : rs.rules) {
        REQUIRE(rule.scope == RuleScope::WholeWord);
        const std::u32string pat = unicode::decode(unicode::to_lower(rule.pattern));
        std::u32string out;
        std::size_t i = 0;
        while (i < cur.size()) {
            if (!unicode::is_word_char(cur[i])) {
                out.push_back(cur[i++]);
                continue;
            }
            std::size_t j = i;
            while (j < cur.size() && unicode::is_word_char(cur[j])) ++j;
            const std::u32string run = cur.substr(i, j - i);
            std::u32string folded;
            for (char32_t cp : run) folded.push_back(unicode::is_apostrophe(cp) ? U'\'' : unicode::to_lower(cp));
            if (folded == pat) {
                std::u32string repl = unicode::decode(rule.replacement);
                if (!repl.empty() && unicode::is_upper(run[0])) repl[0] = unicode::to_upper(repl[0]);
                out += repl;
            } else {
                out += run;
            }
            i = j;
        }
        cur = out;
    }
    return unicode::encode(cur);
}

std::string random_rule_text(Gen& g, const std::vector<std::string>& extra_words) {
    static const std::vector<std::string> seps{" ", ", ", ". ", "; ", " (", ") ", "! ", "\n", " - "};
    std::vector<std::string> vocab = testing::greek_words();
    vocab.insert(vocab.end(), extra_words.begin(), extra_words.end());
    std::string out;
    const int n = g.integer(1, 12);
    for (int i = 0; i < n; ++i) {
        if (i) out += g.pick(seps);
        std::string w = g.pick(vocab);
        if (g.coin(0.2)) {
            auto cps = unicode::decode(w);
            cps[0] = unicode::to_upper(cps[0]);
            w = unicode::encode(cps);
        }
        out += w;
    }
    return out;
}

std::vector<std::string> all_patterns() {
    std::vector<std::string> out;
    for (const auto& set : default_rules().sets) {
        for (const auto& r : set.rules) out.push_back(r.pattern);
    }
    return out;
}

}  // namespace

TEST_CASE("Northern rules rewrite both article occurrences of the figure sentence") {
    CHECK(apply_rules(northern(), "Ου Θεός κι ου γείτονας.") == "Ο Θεός κι ο γείτονας.");
    CHECK(apply_rules(northern(), "Ο Θεός και ο γείτονας.") == "Ο Θεός και ο γείτονας.");
}

TEST_CASE("Pontic whole-word ντο becomes τι") {
    CHECK(apply_rules(pontic(), "ντο λες;") == "τι λες;");
    CHECK(apply_rules(pontic(), "Ντο λες;") == "Τι λες;");
    CHECK(apply_rules(pontic(), "αντο λες;") == "αντο λες;");
}

TEST_CASE("standard text is a fixpoint of every group") {
    for (const auto& set : default_rules().sets) {
        CHECK(apply_rules(set, "Ο Θεός και ο γείτονας.") == "Ο Θεός και ο γείτονας.");
    }
}

TEST_CASE("normalize_rbn routes through the registry") {
    CHECK(normalize_rbn(default_rules(), Region("Macedonia"), "ου γείτονας") == "ο γείτονας");
    CHECK(normalize_rbn(default_rules(), Region("Crete"), "ου γείτονας") == "ου γείτονας");
    CHECK_THROWS_AS(normalize_rbn(default_rules(), Region("Atlantis"), "ου"), LookupError);
}

TEST_CASE("region registry") {
    CHECK(group_for_region(Region("Lesbos")) == DialectGroup::Northern);
    CHECK(group_for_region(Region("Pontus")) == DialectGroup::Pontic);
    try {
        group_for_region(Region("Atlantis"));
        FAIL("expected lookup error");
    } catch (const LookupError& e) {
        CHECK(std::string(e.what()).find("Lesbos") != std::string::npos);
    }
    const std::map<std::string, DialectGroup> expected{
        {"Macedonia", DialectGroup::Northern},      {"Thrace", DialectGroup::Northern},
        {"Eastern Thrace", DialectGroup::Northern}, {"Skyros", DialectGroup::Northern},
        {"Epirus", DialectGroup::Northern},         {"Ioannina", DialectGroup::Northern},
        {"Asia Minor", DialectGroup::Northern},     {"Aetolia", DialectGroup::Northern},
        {"Euboea", DialectGroup::Northern},         {"Lesbos", DialectGroup::Northern},
        {"Amorgos", DialectGroup::Southern},        {"Arcadia", DialectGroup::Southern},
        {"Achaea", DialectGroup::Southern},         {"Ionian Islands", DialectGroup::Southern},
        {"Thesprotia", DialectGroup::Southern},     {"Karpathos", DialectGroup::Southern},
        {"Cephalonia", DialectGroup::Southern},     {"Crete", DialectGroup::Southern},
        {"Cyprus", DialectGroup::Southern},         {"Laconia", DialectGroup::Southern},
        {"Naxos", DialectGroup::Southern},          {"Rhodes", DialectGroup::Southern},
        {"Pontus", DialectGroup::Pontic}};
    CHECK(known_regions().size() == expected.size());
    for (const auto& [name, group] : expected) CHECK(group_for_region(Region(name)) == group);
}

TEST_CASE("parse_rules: single lines, empty input, comments") {
    auto book = parse_rules("northern\tου\tο\twhole-word\tnone\tpreserve-initial-case\n");
    REQUIRE(book[DialectGroup::Northern].rules.size() == 1);
    CHECK(book.rule_count() == 1);
    const auto& r = book[DialectGroup::Northern].rules[0];
    CHECK(r.pattern == "ου");
    CHECK(r.replacement == "ο");
    CHECK(r.scope == RuleScope::WholeWord);
    CHECK(r.case_mode == CaseMode::PreserveInitialCase);

    book = parse_rules("pontic\tντο\tτι\twhole-word\tnone\tpreserve-initial-case");
    CHECK(book[DialectGroup::Pontic].rules.size() == 1);

    CHECK(parse_rules("").rule_count() == 0);
    CHECK(parse_rules("# comment\n\n   \n").rule_count() == 0);
}

TEST_CASE("parse_rules errors carry line numbers") {
    auto line_of = [](const std::string& src) -> std::size_t {
        try {
            parse_rules(src);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("# c\nwestern\tα\tβ\twhole-word\tnone\texact\n") == 2);
    CHECK(line_of("northern\tα\tβ\tsomewhere\tnone\texact\n") == 1);
    CHECK(line_of("northern\tα\tβ\twhole-word\tnone\texact\n\nnorthern\tα\tγ\twhole-word\tnone\texact\n") == 3);
    CHECK(line_of("northern\tα β\tβ\twhole-word\tnone\texact\n") == 1);
    CHECK(line_of("northern\tα\tβ\twhole-word\tnone\n") == 1);
    CHECK(line_of("northern\tα\tβ\twhole-word\tloud\texact\n") == 1);
    CHECK(line_of("northern\t\tβ\tanywhere\tnone\texact\n") == 1);
    CHECK(line_of("northern\tα\tβ\twhole-word\tnone\texact\nnorthern\tα\tβ\tanywhere\tnone\texact\n") == 0);
    CHECK(line_of("northern\tα\tβ\twhole-word\tnone\texact\nsouthern\tα\tβ\twhole-word\tnone\texact\n") == 0);
}

TEST_CASE("shipped rules: 14 in total, matching the data file") {
    CHECK(default_rules().rule_count() == 14);
    CHECK(default_rules_text() == testing::read_text(testing::kSourceDir / ".." / "data" / "rules" / "default.tsv"));
    for (const auto& set : default_rules().sets) CHECK_FALSE(set.rules.empty());
}

TEST_CASE("group isolation on the cross product of shipped rules and groups") {
    for (std::size_t owner = 0; owner < 3; ++owner) {
        for (const auto& rule : default_rules().sets[owner].rules) {
            const std::string text = "x " + rule.pattern + " y";
            for (std::size_t target = 0; target < 3; ++target) {
                bool target_has_pattern = false;
                for (const auto& r : default_rules().sets[target].rules) target_has_pattern |= r.pattern == rule.pattern;
                const std::string out = apply_rules(default_rules().sets[target], text);
                if (target == owner) {
                    CHECK_MESSAGE(out == "x " + rule.replacement + " y", rule.pattern);
                } else if (!target_has_pattern) {
                    CHECK_MESSAGE(out == text, rule.pattern);
                }
            }
        }
    }
}

TEST_CASE("property: shipped rules match the whole-word oracle, stay NFC and leave no pattern behind") {
    Gen g(2024);
    const auto patterns = all_patterns();
    for (int trial = 0; trial < 400; ++trial) {
        const std::string text = random_rule_text(g, patterns);
        for (const auto& set : default_rules().sets) {
            const std::string out = apply_rules(set, text);
            CHECK(out == whole_word_oracle(set, text));
            CHECK(unicode::is_nfc(out));
            CHECK(apply_rules(set, out) == out);
            for (const auto& tok : unicode::tokenize(out)) {
                for (const auto& rule : set.rules) {
                    CHECK_MESSAGE(unicode::to_lower(tok.text) != unicode::to_lower(rule.pattern), text);
                }
            }
        }
    }
}

TEST_CASE("property: text outside matched words is untouched") {
    Gen g(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string left = random_rule_text(g, {});
        const std::string right = random_rule_text(g, {});
        const std::string text = left + " | ου | " + right;
        const std::string out = apply_rules(northern(), text);
        const std::string expect = apply_rules(northern(), left) + " | ο | " + apply_rules(northern(), right);
        CHECK(out == expect);
    }
}

TEST_CASE("scopes, stress condition and case modes") {
    const auto book = parse_rules(
        "northern\tι\tε\tword-suffix\tunstressed\texact\n"
        "southern\tί\tε\tword-suffix\tunstressed\texact\n"
        "pontic\tξε\tε\tword-prefix\tnone\texact\n");
    CHECK(apply_rules(book[DialectGroup::Northern], "πήρι σι") == "πήρε σε");
    CHECK(apply_rules(book[DialectGroup::Northern], "ιδώ") == "ιδώ");
    CHECK(apply_rules(book[DialectGroup::Southern], "πορί") == "πορί");
    CHECK(apply_rules(book[DialectGroup::Pontic], "ξεχνώ και βάξε") == "εχνώ και βάξε");

    const auto anywhere = parse_rules("northern\tου\tο\tanywhere\tnone\texact\n");
    CHECK(apply_rules(anywhere[DialectGroup::Northern], "πουτάμ' Ου") == "ποτάμ' Ου");

    const auto exact = parse_rules("northern\tου\tο\twhole-word\tnone\texact\n");
    CHECK(apply_rules(exact[DialectGroup::Northern], "Ου ου") == "Ου ο");
}

TEST_CASE("apostrophe is word-internal and typographic apostrophes fold") {
    CHECK(apply_rules(pontic(), "ντ' αγαπώ") == "τι αγαπώ");
    CHECK(apply_rules(pontic(), "αντ' αγαπώ") == "αντ' αγαπώ");
    CHECK(apply_rules(pontic(), "βάλλ' το χέρ' ατ' εδώ") == "βάλλ' το χέρ' του εδώ");
    CHECK(apply_rules(pontic(), "χέρ' ατ’ εδώ") == "χέρ' του εδώ");
}
