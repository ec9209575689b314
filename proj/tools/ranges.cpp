#include "ranges.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace logshrink::cli {

namespace {

std::size_t parse_count(std::string_view s, std::string_view whole) {
    std::size_t value = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (s.empty() || ec != std::errc{} || ptr != last) {
        throw std::invalid_argument("malformed range '" + std::string(whole) + "'");
    }
    return value;
}

void append_piece(std::string_view piece, std::string_view whole, std::vector<std::size_t>& out) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t colon = piece.find(':', pos);
        parts.push_back(piece.substr(pos, colon - pos));
        if (colon == std::string_view::npos) {
            break;
        }
        pos = colon + 1;
    }
    if (parts.size() > 3) {
        throw std::invalid_argument("malformed range '" + std::string(whole) + "'");
    }
    const std::size_t start = parse_count(parts[0], whole);
    if (parts.size() == 1) {
        out.push_back(start);
        return;
    }
    const std::size_t stop = parse_count(parts[1], whole);
    const std::size_t step = parts.size() == 3 ? parse_count(parts[2], whole) : 1;
    if (step == 0) {
        throw std::invalid_argument("range step must be positive in '" + std::string(whole) + "'");
    }
    if (stop < start) {
        throw std::invalid_argument("range stop is below start in '" + std::string(whole) + "'");
    }
    for (std::size_t v = start; v <= stop; v += step) {
        out.push_back(v);
        if (stop - v < step) {
            break;
        }
    }
}

}  // namespace

std::vector<std::size_t> parse_size_range(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = text.find(',', pos);
        append_piece(text.substr(pos, comma - pos), text, out);
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

}  // namespace logshrink::cli
