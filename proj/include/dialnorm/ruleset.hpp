#pragma once

#include "dialnorm/corpus.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace dialnorm {

enum class DialectGroup { Northern, Southern, Pontic };

inline constexpr std::array<DialectGroup, 3> kAllGroups{
    DialectGroup::Northern, DialectGroup::Southern, DialectGroup::Pontic};

std::string_view to_string(DialectGroup g);
/// Accepts the rule-file tokens `northern`, `southern`, `pontic` (case-insensitive).
DialectGroup parse_group(std::string_view token);

/// Registry lookup. Throws LookupError (listing the known regions) for
/// anything not registered.
DialectGroup group_for_region(const Region& region);
std::vector<Region> known_regions();

enum class RuleScope { WholeWord, WordPrefix, WordSuffix, Anywhere };
enum class StressCondition { None, PatternVowelsUnstressed };
enum class CaseMode { PreserveInitialCase, Exact };

struct RewriteRule {
    std::string pattern;
    std::string replacement;
    RuleScope scope = RuleScope::WholeWord;
    StressCondition stress = StressCondition::None;
    CaseMode case_mode = CaseMode::PreserveInitialCase;
    std::size_t source_line = 0;
};

struct RuleSet {
    DialectGroup group = DialectGroup::Northern;
    std::vector<RewriteRule> rules;
};

/// One RuleSet per group, indexed in kAllGroups order. Groups with no rules
/// are present and empty.
struct RuleBook {
    std::array<RuleSet, 3> sets{RuleSet{DialectGroup::Northern, {}},
                                RuleSet{DialectGroup::Southern, {}},
                                RuleSet{DialectGroup::Pontic, {}}};

    const RuleSet& operator[](DialectGroup g) const { return sets[static_cast<std::size_t>(g)]; }
    RuleSet& operator[](DialectGroup g) { return sets[static_cast<std::size_t>(g)]; }
    std::size_t rule_count() const;
};

/// Parses the TAB-separated rule file format:
///   group <TAB> pattern <TAB> replacement <TAB> scope <TAB> stress <TAB> case
/// Blank lines and lines starting with '#' are ignored.
RuleBook parse_rules(std::string_view source);
RuleBook load_rules(const std::filesystem::path& path);

/// Text of the rule file shipped in data/rules/default.tsv.
std::string_view default_rules_text();
const RuleBook& default_rules();

/// Applies each rule in order, one left-to-right non-overlapping pass per rule.
std::string apply_rules(const RuleSet& rules, std::string_view text);

/// group_for_region -> select set -> apply_rules.
std::string normalize_rbn(const RuleBook& book, const Region& region, std::string_view text);

}  // namespace dialnorm
