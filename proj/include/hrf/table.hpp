#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hrf {

// Column-schema'd result table with a reproducibility metadata header.
// Rendering is deterministic: identical content yields identical bytes.
class ResultTable {
  public:
    explicit ResultTable(std::vector<std::string> columns);

    void set_meta(std::uint64_t config_hash, std::uint64_t seed);
    void add_row(std::vector<std::string> cells);  // size must match columns

    // %.12g rendering; throws on non-finite input (finite-cell invariant).
    static std::string num(double v);
    static std::string integer(long long v);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    // Cell parsed back as a double (plot building); throws on non-numeric.
    double cell_value(std::size_t row, std::size_t col) const;

    std::string to_csv() const;
    void write_csv(const std::string& path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
    std::uint64_t config_hash_ = 0;
    std::uint64_t seed_ = 0;
    bool has_meta_ = false;
};

}  // namespace hrf
