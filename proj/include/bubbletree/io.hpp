#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bubbletree {

// Comma-separated columnar file with one header row; fixed %.12e formatting
// keeps byte-identical output for identical inputs.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    // column index by header name (ignores a trailing unit annotation)
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

} // namespace bubbletree
