#include "csv_output.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>
#include <system_error>

namespace logshrink::cli {

std::string format_metrics_csv(const std::vector<experiments::MetricsRow>& rows,
                               std::string_view coord_header) {
    std::string out = fmt::format("experiment,algorithm,{},trials,value_kind,value\n", coord_header);
    for (const auto& r : rows) {
        out += fmt::format("{},{},{:.17g},{},{},{:.17g}\n", r.experiment, r.algorithm,
                           r.sweep_coord, r.trials, experiments::to_string(r.value_kind), r.value);
    }
    return out;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace logshrink::cli
