#pragma once

#include "logshrink/experiments.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace logshrink::cli {

/// Renders rows as `experiment,algorithm,<coord_header>,trials,value_kind,value`
/// with LF line endings and 17 significant digits.
std::string format_metrics_csv(const std::vector<experiments::MetricsRow>& rows,
                               std::string_view coord_header);

/// Writes to a sibling temporary file and renames it over `path`, so a failed
/// run never leaves a partial file behind.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace logshrink::cli
