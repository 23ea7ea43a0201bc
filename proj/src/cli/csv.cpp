#include "qcr/cli/csv.hpp"

#include "qcr/cli/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

namespace qcr::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw io_error("write to '" + path.string() + "' failed");
}

std::optional<double> to_double(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_columns(const std::filesystem::path& path, std::span<const std::string> header,
                   std::span<const std::vector<double>> columns)
{
    if (header.size() != columns.size())
        throw std::invalid_argument("CSV header and column count differ");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows)
            throw std::invalid_argument("CSV columns differ in length");

    fmt::memory_buffer buf;
    for (std::size_t j = 0; j < header.size(); ++j)
        fmt::format_to(std::back_inserter(buf), "{}{}", j ? "," : "", header[j]);
    buf.push_back('\n');
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            fmt::format_to(std::back_inserter(buf), "{}{:.17g}", j ? "," : "", columns[j][i]);
        buf.push_back('\n');
    }
    auto out = open_out(path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    finish(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j)
{
    write_text(path, j.dump(2) + "\n");
}

TwoColumns read_two_columns(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path.string() + "'");
    TwoColumns out;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s(line);
        if (s.find_first_not_of(" \t\r") == std::string_view::npos || s.front() == '#')
            continue;
        const auto comma = s.find(',');
        std::optional<double> x, y;
        if (comma != std::string_view::npos && s.find(',', comma + 1) == std::string_view::npos) {
            x = to_double(s.substr(0, comma));
            y = to_double(s.substr(comma + 1));
        }
        const bool first = !seen_content;
        seen_content = true;
        if (!x || !y) {
            if (first)
                continue;
            throw config_error(fmt::format("{}:{}: expected two numeric columns", path.string(), line_no));
        }
        out.x.push_back(*x);
        out.y.push_back(*y);
    }
    if (in.bad())
        throw io_error("read from '" + path.string() + "' failed");
    return out;
}

}  // namespace qcr::cli
