#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace logshrink::cli {

/// Parses `start:stop:step`, `start:stop` (step 1), a single value, or a
/// comma-separated list of those. stop is included when it is aligned with
/// the step. Throws std::invalid_argument on malformed input.
std::vector<std::size_t> parse_size_range(std::string_view text);

}  // namespace logshrink::cli
