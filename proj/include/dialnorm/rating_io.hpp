#pragma once

#include "dialnorm/reliability.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dialnorm {

struct LabeledMatrix {
    RatingMatrix values;
    std::vector<std::string> raters;  ///< empty when the file has no header
};

/// Reads a subjects x raters CSV. Accepts the annotation export layout
/// (`record_id,<raters...>`, first column dropped) or a bare numeric grid
/// with an optional header row. Throws RowError on ragged or non-numeric
/// cells.
LabeledMatrix parse_rating_matrix(std::string_view text);
LabeledMatrix load_rating_matrix(const std::filesystem::path& path);

}  // namespace dialnorm
