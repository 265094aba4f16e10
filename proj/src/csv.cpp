#include "qwalk/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qwalk::io {

const std::vector<double>& Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (headers[i] == name) return columns[i];
    throw std::invalid_argument("Table: no column named '" + name + "'");
}

void write_csv(const std::filesystem::path& path, const Table& table) {
    if (table.headers.size() != table.columns.size())
        throw std::invalid_argument("write_csv: header/column count mismatch");
    std::size_t n = table.rows();
    for (const auto& c : table.columns)
        if (c.size() != n) throw std::invalid_argument("write_csv: ragged columns");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < table.headers.size(); ++i) {
        if (i) out << ',';
        out << table.headers[i];
    }
    out << '\n';
    char buf[40];
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", table.columns[c][r]);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path.string());
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.headers.push_back(cell);
    t.columns.resize(t.headers.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, cell, ',')) {
            if (c >= t.columns.size()) throw std::runtime_error("read_csv: extra cell in " + path.string());
            t.columns[c++].push_back(std::stod(cell));
        }
        if (c != t.columns.size()) throw std::runtime_error("read_csv: short row in " + path.string());
    }
    return t;
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_json_atomic: cannot open " + tmp.string());
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("write_json_atomic: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace qwalk::io
