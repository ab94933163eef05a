#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace canard {

/// Rows of text cells under a fixed header, rendered with '\n' line ends.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    /// Appends a row; the cell count must match the header.
    void add(std::vector<std::string> row);
    std::string render() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Number cell: shortest round-trip form, empty for NaN.
std::string cell(double v);

/// Writes `content` to a temporary file next to `path`, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace canard
