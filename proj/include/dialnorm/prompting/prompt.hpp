#pragma once

#include "dialnorm/corpus.hpp"
#include "dialnorm/ruleset.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dialnorm::prompt {

struct Shot {
    std::string source;
    std::string target;
    DialectGroup group;
};

enum class ShotMode { ThreeShot, NineShot };

std::string_view to_string(ShotMode m);
/// Accepts "three"/"3" and "nine"/"9"; ConfigError otherwise.
ShotMode parse_shot_mode(std::string_view token);

/// The three demonstration pairs of a group, in template order.
const std::vector<Shot>& shot_bank(DialectGroup g);

/// Raw per-group template with its `<place>` and `<text>`/`<proverb>`
/// placeholders.
std::string_view template_text(DialectGroup g);

/// Placeholder filled with the input text. Both spellings occur in the
/// templates.
inline constexpr std::string_view kTextPlaceholders[] = {"<text>", "<proverb>"};
inline constexpr std::string_view kPlacePlaceholder = "<place>";
/// Place name hard-coded by the Pontic template.
inline constexpr std::string_view kPonticPlace = "Πόντος";

/// ThreeShot fills the region's group template. NineShot uses the shared
/// instruction with all nine pairs (Northern, Southern, Pontic); Pontic
/// demonstrations keep their own place label. Throws ValidationError for
/// empty text and LookupError for an unknown region in ThreeShot mode.
std::string build_prompt(const Region& region, std::string_view text, ShotMode mode);

}  // namespace dialnorm::prompt
