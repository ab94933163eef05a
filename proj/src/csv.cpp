#include "canard/csv.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include <unistd.h>

#include "canard/errors.hpp"
#include "canard/format.hpp"

namespace canard {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw ValidationError("CSV row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ValidationError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw ValidationError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

}  // namespace canard
