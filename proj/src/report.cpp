#include "islab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "islab/errors.hpp"

namespace islab {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += format_real(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

void CsvWriter::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot open for writing: " + path);
    out << content;
}

void write_json(const std::string& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw domain_error("cannot create directory: " + path);
}

}  // namespace islab
