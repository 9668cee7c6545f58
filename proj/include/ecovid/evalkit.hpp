#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ecovid::eval {

/// Throw ShapeError on length mismatch and EmptyError on empty input.
double mse(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

/// Label 1 is the positive class.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

/// A metric whose denominator may vanish. Undefined metrics carry NaN.
struct Metric {
  double value = 0;
  bool defined = true;

  static Metric undefined();
};

struct ClassMetrics {
  Metric accuracy;
  Metric precision;
  Metric recall;
  Metric f1;
};

ClassMetrics classify_metrics(const ConfusionMatrix& cm);

/// Harmonic mean 2pr / (p + r); undefined when p + r == 0.
Metric f1_score(double precision, double recall);

/// Sample Pearson correlations of named columns.
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> r;  // symmetric, |r| <= 1
  std::vector<bool> constant;          // constant columns: r = 0, diagonal undefined
};

CorrelationMatrix pearson_matrix(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& columns);

double pearson(std::span<const double> x, std::span<const double> y);

/// Rectangular block (rows x cols) of correlations between two variable sets.
struct CorrelationBlock {
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
  std::vector<std::vector<double>> r;
  std::vector<bool> row_constant;
  std::vector<bool> col_constant;
};

CorrelationBlock pearson_cross(const std::vector<std::string>& row_names,
                               const std::vector<std::vector<double>>& row_columns,
                               const std::vector<std::string>& col_names,
                               const std::vector<std::vector<double>>& col_columns);

/// Header "variable,<col names...>"; undefined cells are written as "NA".
std::string to_csv(const CorrelationBlock& block);
std::string to_csv(const CorrelationMatrix& matrix);

/// Heatmap with a blue-white-red diverging scale on [-1, 1] and a legend.
std::string heatmap_svg(const CorrelationBlock& block, const std::string& title);

/// Mean of 1..5 answers; throws RangeError outside 1..5, EmptyError on empty.
double likert_mean(std::span<const int> answers);

struct LikertRow {
  std::string item;
  double mean = 0;
  std::size_t responses = 0;
};

/// One mean per item (the layout of a participant-results table).
std::vector<LikertRow> likert_table(const std::vector<std::pair<std::string, std::vector<int>>>& answers);

/// CSV with one column per item and one row per participant.
std::vector<std::pair<std::string, std::vector<int>>> parse_likert_csv(std::string_view text);

}  // namespace ecovid::eval
