#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace islab {

using Json = nlohmann::ordered_json;

// 17 significant digits, locale-independent; round-trips any double exactly.
std::string format_real(double x);

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& cells);
    std::string str() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const Json& j);
void ensure_directory(const std::string& path);

}  // namespace islab
