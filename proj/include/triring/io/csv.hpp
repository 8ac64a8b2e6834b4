#pragma once

#include <string>
#include <vector>

namespace triring::io {

// CSV table with one header row. All floats are written with 17 significant
// digits so that value round-trips are lossless.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);
double parse_double(const std::string& s, const std::string& context);

// Throws IoError on filesystem failure, ParameterError with a line number on
// a malformed row.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace triring::io
