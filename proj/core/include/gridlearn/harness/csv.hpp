#pragma once

// Comma-separated tables: header row, LF line endings, doubles written with
// 17 significant digits so they round-trip exactly.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridlearn {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string render() const;
  /// Throws IoError when the file cannot be written.
  void write(const std::filesystem::path& path) const;

  /// Column index by header name; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
};

/// Parses a file written by CsvTable::write (no quoting).
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace gridlearn
