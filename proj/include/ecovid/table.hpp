#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ecovid {

/// A FeatureVector is one row of a FeatureTable: named numeric features for
/// one video. All rows share the table's column names.
struct FeatureTable {
  std::vector<std::string> ids;            // one per row
  std::vector<std::string> names;          // one per column
  std::vector<std::vector<double>> rows;   // rows[i].size() == names.size()

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return names.size(); }

  /// Index of `name`; throws SchemaError when absent.
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  std::vector<double> column(std::size_t index) const;

  /// New table restricted to the given columns (in the given order).
  FeatureTable select(std::span<const std::string> columns) const;
  /// New table restricted to the given rows (in the given order).
  FeatureTable take_rows(std::span<const std::size_t> indices) const;

  void append(std::string id, std::vector<double> values);
};

/// CSV layout: "id" column followed by numeric columns.
std::string to_csv(const FeatureTable& table);
FeatureTable feature_table_from_csv(std::string_view text);
FeatureTable load_feature_table(const std::filesystem::path& path);

}  // namespace ecovid
