#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace qwalk::io {

struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;  // column-major

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

// Values are printed with %.17g so equal doubles always produce equal bytes.
void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

// Write-to-temp-then-rename, so readers never observe a partial file.
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace qwalk::io
