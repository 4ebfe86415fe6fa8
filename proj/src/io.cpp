#include "bubbletree/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bubbletree/errors.hpp"

namespace bubbletree {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw ParameterError("write_csv: header/column mismatch");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ParameterError("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < header.size(); ++c)
        std::fprintf(f, "%s%s", header[c].c_str(), c + 1 < header.size() ? "," : "\n");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            std::fprintf(f, "%.12e%s", columns[c][r], c + 1 < columns.size() ? "," : "\n");
    }
    std::fclose(f);
}

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ParameterError("write_metadata: cannot open " + path);
    for (const auto& [k, v] : entries) std::fprintf(f, "%s = %s\n", k.c_str(), v.c_str());
    std::fclose(f);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("read_csv: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ParameterError("read_csv: empty file " + path);
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    t.columns.resize(t.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',') && c < t.columns.size())
            t.columns[c++].push_back(std::stod(cell));
    }
    return t;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h == name) return c;
        const std::size_t sp = h.find(' ');
        if (sp != std::string::npos && h.substr(0, sp) == name) return c;
    }
    throw ParameterError("read_csv: no column named " + name);
}

} // namespace bubbletree
