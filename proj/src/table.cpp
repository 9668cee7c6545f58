#include "ecovid/table.hpp"

#include <algorithm>

#include "ecovid/error.hpp"
#include "ecovid/io.hpp"

namespace ecovid {

std::size_t FeatureTable::column_index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw SchemaError(0, "missing feature column '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<double> FeatureTable::column(const std::string& name) const {
  return column(column_index(name));
}

std::vector<double> FeatureTable::column(std::size_t index) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(index));
  return out;
}

FeatureTable FeatureTable::select(std::span<const std::string> columns) const {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(column_index(c));
  FeatureTable out;
  out.ids = ids;
  out.names.assign(columns.begin(), columns.end());
  out.rows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<double> v;
    v.reserve(idx.size());
    for (auto j : idx) v.push_back(r[j]);
    out.rows.push_back(std::move(v));
  }
  return out;
}

FeatureTable FeatureTable::take_rows(std::span<const std::size_t> indices) const {
  FeatureTable out;
  out.names = names;
  for (auto i : indices) {
    out.ids.push_back(ids.at(i));
    out.rows.push_back(rows.at(i));
  }
  return out;
}

void FeatureTable::append(std::string id, std::vector<double> values) {
  if (values.size() != names.size()) throw ShapeError("feature row width does not match header");
  ids.push_back(std::move(id));
  rows.push_back(std::move(values));
}

std::string to_csv(const FeatureTable& table) {
  io::CsvRow header{"id"};
  header.insert(header.end(), table.names.begin(), table.names.end());
  std::string out = io::csv_line(header);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    io::CsvRow line{table.ids[i]};
    for (double v : table.rows[i]) line.push_back(io::format_double(v));
    out += io::csv_line(line);
  }
  return out;
}

FeatureTable feature_table_from_csv(std::string_view text) {
  auto rows = io::parse_csv(text);
  if (rows.empty()) throw SchemaError(0, "feature CSV has no header");
  const auto& header = rows.front();
  if (header.empty() || header.front() != "id") throw SchemaError(0, "feature CSV must start with an id column");
  FeatureTable table;
  table.names.assign(header.begin() + 1, header.end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) throw SchemaError(r, "expected " + std::to_string(header.size()) + " fields");
    std::vector<double> values(table.names.size());
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (!io::parse_double(row[c], values[c - 1]))
        throw SchemaError(r, "non-numeric value in column '" + header[c] + "'");
    }
    table.append(row.front(), std::move(values));
  }
  return table;
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
  return feature_table_from_csv(io::read_file(path));
}

}  // namespace ecovid
