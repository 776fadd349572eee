#include "hrf/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "hrf/common.hpp"

namespace hrf {

namespace {

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quoted(const std::string& cell) {
    if (!needs_quoting(cell)) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty())
        throw std::invalid_argument("ResultTable: at least one column is required");
}

void ResultTable::set_meta(std::uint64_t config_hash, std::uint64_t seed) {
    config_hash_ = config_hash;
    seed_ = seed;
    has_meta_ = true;
}

void ResultTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument("ResultTable: row width does not match the schema");
    rows_.push_back(std::move(cells));
}

std::string ResultTable::num(double v) {
    if (!std::isfinite(v))
        throw std::invalid_argument("ResultTable: numeric cells must be finite");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string ResultTable::integer(long long v) { return std::to_string(v); }

double ResultTable::cell_value(std::size_t row, std::size_t col) const {
    const std::string& s = rows_.at(row).at(col);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::invalid_argument("ResultTable: cell '" + s + "' is not numeric");
    return v;
}

std::string ResultTable::to_csv() const {
    std::string out;
    if (has_meta_)
        out += "# config_hash=" + hex64(config_hash_) + " seed=" + std::to_string(seed_) +
               " tool=hrf " + kToolVersion + "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (c) out += ',';
        out += quoted(columns_[c]);
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += quoted(row[c]);
        }
        out += '\n';
    }
    return out;
}

void ResultTable::write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ResultTable: cannot open " + path + " for writing");
    std::string body = to_csv();
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("ResultTable: write to " + path + " failed");
}

}  // namespace hrf
