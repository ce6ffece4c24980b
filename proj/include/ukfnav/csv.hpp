// Minimal locale-independent CSV reading/writing.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ukfnav::csv {

/// 17 significant digits, '.' decimal separator, independent of the C locale.
std::string format_double(double v);

/// Parses a full token as a double; std::nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view token);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws IoError naming the path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;  // empty cell -> nullopt

    /// Index of a header column; throws MalformedRecord when absent.
    std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated numeric table with a header line.
/// Throws IoError when unreadable and MalformedRecord on bad cells.
Table read_table(const std::filesystem::path& path);

/// Checks that the header equals `expected` exactly.
void require_header(const Table& t, const std::vector<std::string>& expected,
                    const std::filesystem::path& path);

class Writer {
public:
    explicit Writer(std::string header) : out_(std::move(header)) { out_ += '\n'; }

    Writer& cell(double v);
    Writer& cell(std::string_view s);
    Writer& empty();
    void end_row();

    const std::string& str() const { return out_; }
    void save(const std::filesystem::path& path) const { write_file_atomic(path, out_); }

private:
    std::string out_;
    bool row_open_ = false;
    void sep();
};

}  // namespace ukfnav::csv
