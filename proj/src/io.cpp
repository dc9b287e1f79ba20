#include "levimag/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levimag::io {

void Table::add_column(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows())
    throw std::invalid_argument("table: column '" + name + "' length differs from existing columns");
  for (const auto& n : names)
    if (n == name) throw std::invalid_argument("table: duplicate column '" + name + "'");
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw std::out_of_range("table: no column '" + name + "'");
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  for (const auto& c : table.columns)
    if (c.size() != table.rows()) throw std::invalid_argument("write_csv: ragged table");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  out << "# " << table.header.dump() << '\n';
  for (std::size_t i = 0; i < table.names.size(); ++i) out << (i ? "," : "") << table.names[i];
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << format_number(table.columns[c][r]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
  const auto fail = [&](std::size_t line, const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
  };

  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_names = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("# ", 0) == 0) {
      try {
        t.header = nlohmann::json::parse(line.substr(2));
      } catch (const nlohmann::json::exception& e) {
        fail(lineno, std::string("malformed JSON header: ") + e.what());
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!have_names) {
      t.names = cells;
      t.columns.resize(cells.size());
      have_names = true;
      continue;
    }
    if (cells.size() != t.names.size()) fail(lineno, "expected " + std::to_string(t.names.size()) + " fields");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto* first = cells[c].data();
      const auto* last = first + cells[c].size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last) fail(lineno, "not a number: '" + cells[c] + "'");
      t.columns[c].push_back(v);
    }
  }
  if (!have_names) fail(lineno, "missing column header");
  return t;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
  out << value.dump(2) << '\n';
}

}  // namespace levimag::io
