#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tgk {

// Comma-separated table: header row, '.' decimal separator, LF line endings,
// UTF-8. Doubles are written with 17 significant digits so every file parses
// back to the exact same values. An empty cell reads back as an absent value.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;

    int column(const std::string& name) const;  // -1 when missing
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Serializes then renames into place, so readers never see partial files.
void atomic_write_text(const std::string& path, const std::string& content);

std::string format_double(double v);

// Canonical short form used in file names (theta_draws_<alpha>.csv).
std::string format_alpha(double alpha);

}  // namespace tgk
