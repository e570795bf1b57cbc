#include "tgk/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tgk {

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != table.header.size()) {
            throw std::runtime_error("read_csv: row with " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(table.header.size()) +
                                     " in " + path);
        }
        std::vector<std::optional<double>> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            if (f.empty()) {
                row.emplace_back(std::nullopt);
                continue;
            }
            size_t pos = 0;
            const double v = std::stod(f, &pos);
            if (pos != f.size()) {
                throw std::runtime_error("read_csv: malformed number '" + f + "' in " + path);
            }
            row.emplace_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_alpha(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", alpha);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("atomic_write_text: cannot open " + tmp);
        out << content;
        if (!out) throw std::runtime_error("atomic_write_text: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::string content;
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (i > 0) content += ',';
        content += table.header[i];
    }
    content += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::runtime_error("write_csv: row width does not match header");
        }
        for (size_t i = 0; i < row.size(); ++i) {
            if (i > 0) content += ',';
            if (row[i]) content += format_double(*row[i]);
        }
        content += '\n';
    }
    atomic_write_text(path, content);
}

}  // namespace tgk
