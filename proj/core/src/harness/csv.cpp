#include "gridlearn/harness/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gridlearn {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, p);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::invalid_argument("CSV row width differs from header");
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  const auto text = render();
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else if (!line.empty()) {
      if (cells.size() != t.header.size()) {
        throw IoError("'" + path.string() + "': row width differs from header");
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw IoError("'" + path.string() + "' is empty");
  return t;
}

}  // namespace gridlearn
