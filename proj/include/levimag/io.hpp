#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace levimag::io {

/// Column-oriented numeric table. On disk: a first line `# {json header}`,
/// a comma-separated column-name line, then one row per sample.
struct Table {
  nlohmann::json header = nlohmann::json::object();
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add_column(std::string name, std::vector<double> values);
  const std::vector<double>& column(const std::string& name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

void write_csv(const std::filesystem::path& path, const Table& table);
/// Throws std::runtime_error with file:line on malformed input.
Table read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace levimag::io
