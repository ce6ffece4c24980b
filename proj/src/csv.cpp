#include "ukfnav/csv.hpp"

#include "ukfnav/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ukfnav::csv {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view token) {
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) {
        token.remove_suffix(1);
    }
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw MalformedRecord("missing CSV column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    Table table;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            for (std::string_view h : split(line)) table.header.emplace_back(h);
            continue;
        }
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw MalformedRecord(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(table.header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
        }
        std::vector<std::optional<double>> row;
        row.reserve(cells.size());
        for (std::string_view c : cells) {
            if (c.empty()) {
                row.emplace_back(std::nullopt);
                continue;
            }
            const auto v = parse_double(c);
            if (!v) {
                throw MalformedRecord(path.string() + ":" + std::to_string(lineno) +
                                      ": non-numeric cell '" + std::string(c) + "'");
            }
            row.emplace_back(*v);
        }
        table.rows.push_back(std::move(row));
    }
    if (lineno == 0) throw MalformedRecord(path.string() + ": empty file, header expected");
    return table;
}

void require_header(const Table& t, const std::vector<std::string>& expected,
                    const std::filesystem::path& path) {
    if (t.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw MalformedRecord(path.string() + ": unexpected header, want '" + want + "'");
    }
}

void Writer::sep() {
    if (row_open_) out_ += ',';
    row_open_ = true;
}

Writer& Writer::cell(double v) {
    sep();
    out_ += format_double(v);
    return *this;
}

Writer& Writer::cell(std::string_view s) {
    sep();
    out_ += s;
    return *this;
}

Writer& Writer::empty() {
    sep();
    return *this;
}

void Writer::end_row() {
    out_ += '\n';
    row_open_ = false;
}

}  // namespace ukfnav::csv
