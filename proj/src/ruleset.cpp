#include "dialnorm/ruleset.hpp"

#include "dialnorm/csv.hpp"
#include "dialnorm/error.hpp"
#include "dialnorm/unicode.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dialnorm {

namespace {

struct RegistryEntry {
    const char* region;
    DialectGroup group;
};

// clang-format off
constexpr RegistryEntry kRegistry[] = {
    {"Macedonia", DialectGroup::Northern}, {"Thrace", DialectGroup::Northern},
    {"Eastern Thrace", DialectGroup::Northern}, {"Skyros", DialectGroup::Northern},
    {"Epirus", DialectGroup::Northern}, {"Ioannina", DialectGroup::Northern},
    {"Asia Minor", DialectGroup::Northern}, {"Aetolia", DialectGroup::Northern},
    {"Euboea", DialectGroup::Northern}, {"Lesbos", DialectGroup::Northern},

    {"Amorgos", DialectGroup::Southern}, {"Arcadia", DialectGroup::Southern},
    {"Achaea", DialectGroup::Southern}, {"Ionian Islands", DialectGroup::Southern},
    {"Thesprotia", DialectGroup::Southern}, {"Karpathos", DialectGroup::Southern},
    {"Cephalonia", DialectGroup::Southern}, {"Crete", DialectGroup::Southern},
    {"Cyprus", DialectGroup::Southern}, {"Laconia", DialectGroup::Southern},
    {"Naxos", DialectGroup::Southern}, {"Rhodes", DialectGroup::Southern},

    {"Pontus", DialectGroup::Pontic},
};
// clang-format on

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

RuleScope parse_scope(std::string_view token, std::size_t line) {
    const std::string t = lower_ascii(token);
    if (t == "whole-word") return RuleScope::WholeWord;
    if (t == "word-prefix") return RuleScope::WordPrefix;
    if (t == "word-suffix") return RuleScope::WordSuffix;
    if (t == "anywhere") return RuleScope::Anywhere;
    throw ParseError(line, "bad scope '" + std::string(token) + "'");
}

StressCondition parse_stress(std::string_view token, std::size_t line) {
    const std::string t = lower_ascii(token);
    if (t == "none") return StressCondition::None;
    if (t == "unstressed" || t == "pattern-vowels-unstressed") return StressCondition::PatternVowelsUnstressed;
    throw ParseError(line, "bad stress condition '" + std::string(token) + "'");
}

CaseMode parse_case(std::string_view token, std::size_t line) {
    const std::string t = lower_ascii(token);
    if (t == "preserve" || t == "preserve-initial-case") return CaseMode::PreserveInitialCase;
    if (t == "exact") return CaseMode::Exact;
    throw ParseError(line, "bad case mode '" + std::string(token) + "'");
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

char32_t fold(char32_t cp, CaseMode mode) {
    if (unicode::is_apostrophe(cp)) return U'\'';
    return mode == CaseMode::PreserveInitialCase ? unicode::to_lower(cp) : cp;
}

bool span_is_unstressed(std::u32string_view span) {
    return std::none_of(span.begin(), span.end(), unicode::is_stressed_vowel);
}

// One compiled rule: code points ready for matching.
struct CompiledRule {
    std::u32string pattern;
    std::u32string replacement;
    const RewriteRule* rule;
};

std::u32string apply_one(const CompiledRule& cr, const std::u32string& text) {
    const auto& pat = cr.pattern;
    const RewriteRule& rule = *cr.rule;
    const std::size_t n = text.size();
    const std::size_t m = pat.size();
    std::u32string out;
    out.reserve(n);

    const bool need_start = rule.scope == RuleScope::WholeWord || rule.scope == RuleScope::WordPrefix;
    const bool need_end = rule.scope == RuleScope::WholeWord || rule.scope == RuleScope::WordSuffix;

    std::size_t i = 0;
    while (i < n) {
        bool matched = false;
        if (i + m <= n) {
            matched = true;
            for (std::size_t k = 0; k < m; ++k) {
                if (fold(text[i + k], rule.case_mode) != fold(pat[k], rule.case_mode)) {
                    matched = false;
                    break;
                }
            }
            if (matched && need_start && i > 0 && unicode::is_word_char(text[i - 1])) matched = false;
            if (matched && need_end && i + m < n && unicode::is_word_char(text[i + m])) matched = false;
            if (matched && rule.stress == StressCondition::PatternVowelsUnstressed &&
                !span_is_unstressed(std::u32string_view(text).substr(i, m))) {
                matched = false;
            }
        }
        if (!matched) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::u32string repl = cr.replacement;
        if (rule.case_mode == CaseMode::PreserveInitialCase && !repl.empty() && unicode::is_upper(text[i])) {
            repl[0] = unicode::to_upper(repl[0]);
        }
        out += repl;
        i += m;
    }
    return out;
}

}  // namespace

std::string_view to_string(DialectGroup g) {
    switch (g) {
        case DialectGroup::Northern: return "northern";
        case DialectGroup::Southern: return "southern";
        case DialectGroup::Pontic: return "pontic";
    }
    return "unknown";
}

DialectGroup parse_group(std::string_view token) {
    const std::string t = lower_ascii(token);
    if (t == "northern") return DialectGroup::Northern;
    if (t == "southern") return DialectGroup::Southern;
    if (t == "pontic") return DialectGroup::Pontic;
    throw ConfigError("unknown dialect group '" + std::string(token) + "'");
}

std::vector<Region> known_regions() {
    std::vector<Region> out;
    for (const auto& e : kRegistry) out.emplace_back(e.region);
    return out;
}

DialectGroup group_for_region(const Region& region) {
    for (const auto& e : kRegistry) {
        if (region.name == e.region) return e.group;
    }
    std::string known;
    for (const auto& e : kRegistry) {
        if (!known.empty()) known += ", ";
        known += e.region;
    }
    throw LookupError("unknown region '" + region.name + "'; known regions: " + known);
}

std::size_t RuleBook::rule_count() const {
    std::size_t n = 0;
    for (const auto& s : sets) n += s.rules.size();
    return n;
}

RuleBook parse_rules(std::string_view source) {
    unicode::validate_utf8(source);
    RuleBook book;
    std::array<std::set<std::pair<std::string, RuleScope>>, 3> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        const auto nl = source.find('\n', pos);
        std::string_view line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string trimmed = unicode::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        const auto fields = split_tabs(line);
        if (fields.size() != 6) {
            throw ParseError(line_no, "expected 6 TAB-separated fields, got " + std::to_string(fields.size()));
        }
        DialectGroup group;
        try {
            group = parse_group(unicode::trim(fields[0]));
        } catch (const ConfigError&) {
            throw ParseError(line_no, "unknown group '" + std::string(fields[0]) + "'");
        }
        RewriteRule rule;
        rule.pattern = unicode::nfc(fields[1]);
        rule.replacement = unicode::nfc(fields[2]);
        rule.scope = parse_scope(unicode::trim(fields[3]), line_no);
        rule.stress = parse_stress(unicode::trim(fields[4]), line_no);
        rule.case_mode = parse_case(unicode::trim(fields[5]), line_no);
        rule.source_line = line_no;

        if (rule.pattern.empty()) throw ParseError(line_no, "empty pattern");
        if (rule.scope == RuleScope::WholeWord) {
            for (char32_t cp : unicode::decode(rule.pattern)) {
                if (!unicode::is_word_char(cp)) {
                    throw ParseError(line_no, "whole-word pattern '" + rule.pattern + "' contains a separator");
                }
            }
        }
        auto& group_seen = seen[static_cast<std::size_t>(group)];
        if (!group_seen.emplace(rule.pattern, rule.scope).second) {
            throw ParseError(line_no, "duplicate rule for pattern '" + rule.pattern + "' and scope");
        }
        book[group].rules.push_back(std::move(rule));
    }
    return book;
}

RuleBook load_rules(const std::filesystem::path& path) { return parse_rules(csv::read_file(path)); }

const RuleBook& default_rules() {
    static const RuleBook book = parse_rules(default_rules_text());
    return book;
}

std::string apply_rules(const RuleSet& rules, std::string_view text) {
    std::u32string current = unicode::decode(text);
    for (const auto& rule : rules.rules) {
        CompiledRule cr{unicode::decode(rule.pattern), unicode::decode(rule.replacement), &rule};
        current = apply_one(cr, current);
    }
    return unicode::nfc(unicode::encode(current));
}

std::string normalize_rbn(const RuleBook& book, const Region& region, std::string_view text) {
    return apply_rules(book[group_for_region(region)], text);
}

}  // namespace dialnorm
