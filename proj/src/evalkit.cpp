#include "ecovid/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecovid/error.hpp"
#include "ecovid/io.hpp"

namespace ecovid::eval {

namespace {

void check_pair(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size())
    throw ShapeError("metric inputs differ in length: " + std::to_string(y.size()) + " vs " +
                     std::to_string(yhat.size()));
  if (y.empty()) throw EmptyError("metric of empty input");
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

/// Blue (-1) -> white (0) -> red (+1).
std::string diverging_color(double r) {
  r = std::clamp(r, -1.0, 1.0);
  int red, green, blue;
  if (r >= 0) {
    red = 255;
    green = blue = static_cast<int>(std::lround(255 * (1 - r)));
  } else {
    blue = 255;
    red = green = static_cast<int>(std::lround(255 * (1 + r)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", red, green, blue);
  return buf;
}

}  // namespace

double mse(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> yhat) { return std::sqrt(mse(y, yhat)); }

double mae(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw ShapeError("confusion: label vectors differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == 1, p = predicted[i] == 1;
    if (t && p) ++cm.tp;
    else if (!t && !p) ++cm.tn;
    else if (p) ++cm.fp;
    else ++cm.fn;
  }
  return cm;
}

Metric Metric::undefined() { return {std::numeric_limits<double>::quiet_NaN(), false}; }

Metric f1_score(double precision, double recall) {
  if (precision + recall == 0) return Metric::undefined();
  return {2 * precision * recall / (precision + recall), true};
}

ClassMetrics classify_metrics(const ConfusionMatrix& cm) {
  ClassMetrics m;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? Metric::undefined() : Metric{static_cast<double>(num) / static_cast<double>(den), true};
  };
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.f1 = (m.precision.defined && m.recall.defined) ? f1_score(m.precision.value, m.recall.value) : Metric::undefined();
  return m;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("pearson: columns differ in length");
  if (x.size() < 2) throw EmptyError("pearson needs at least two observations");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return 0;
  // (n-1) factors cancel between the sample covariance and sample stds.
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw ShapeError("pearson_matrix: one name per column required");
  for (const auto& c : columns) {
    if (c.size() != columns.front().size()) throw ShapeError("pearson_matrix: columns differ in length");
  }
  const std::size_t k = columns.size();
  CorrelationMatrix m;
  m.names = names;
  m.r.assign(k, std::vector<double>(k, 0.0));
  m.constant.resize(k);
  for (std::size_t i = 0; i < k; ++i) m.constant[i] = is_constant(columns[i]);
  for (std::size_t i = 0; i < k; ++i) {
    m.r[i][i] = m.constant[i] ? 0.0 : 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double r = pearson(columns[i], columns[j]);
      m.r[i][j] = m.r[j][i] = r;
    }
  }
  return m;
}

CorrelationBlock pearson_cross(const std::vector<std::string>& row_names, const std::vector<std::vector<double>>& row_columns,
                               const std::vector<std::string>& col_names, const std::vector<std::vector<double>>& col_columns) {
  if (row_names.size() != row_columns.size() || col_names.size() != col_columns.size())
    throw ShapeError("pearson_cross: one name per column required");
  CorrelationBlock b;
  b.row_names = row_names;
  b.col_names = col_names;
  for (const auto& c : row_columns) b.row_constant.push_back(is_constant(c));
  for (const auto& c : col_columns) b.col_constant.push_back(is_constant(c));
  for (const auto& rc : row_columns) {
    std::vector<double> line;
    for (const auto& cc : col_columns) line.push_back(pearson(rc, cc));
    b.r.push_back(std::move(line));
  }
  return b;
}

std::string to_csv(const CorrelationBlock& block) {
  io::CsvRow header{"variable"};
  header.insert(header.end(), block.col_names.begin(), block.col_names.end());
  std::string out = io::csv_line(header);
  for (std::size_t i = 0; i < block.row_names.size(); ++i) {
    io::CsvRow line{block.row_names[i]};
    for (std::size_t j = 0; j < block.col_names.size(); ++j) {
      const bool undefined = block.row_constant[i] || block.col_constant[j];
      line.push_back(undefined ? "NA" : io::format_double(block.r[i][j]));
    }
    out += io::csv_line(line);
  }
  return out;
}

std::string to_csv(const CorrelationMatrix& matrix) {
  CorrelationBlock b{matrix.names, matrix.names, matrix.r, matrix.constant, matrix.constant};
  return to_csv(b);
}

std::string heatmap_svg(const CorrelationBlock& block, const std::string& title) {
  constexpr double kCell = 56, kLabelW = 170, kHeaderH = 110, kLegendW = 90, kTitleH = 28;
  const double rows = static_cast<double>(block.row_names.size());
  const double cols = static_cast<double>(block.col_names.size());
  const double width = kLabelW + cols * kCell + kLegendW;
  const double height = std::max(kTitleH + kHeaderH + rows * kCell + 10, kTitleH + kHeaderH + 230.0);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + io::format_double(width) + "\" height=\"" +
                    io::format_double(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<text x=\"4\" y=\"18\" font-size=\"14\">" + xml_escape(title) + "</text>\n";
  const double top = kTitleH + kHeaderH;
  for (std::size_t j = 0; j < block.col_names.size(); ++j) {
    const double x = kLabelW + (static_cast<double>(j) + 0.5) * kCell;
    out += "<text transform=\"translate(" + io::format_double(x) + "," + io::format_double(top - 6) +
           ") rotate(-60)\">" + xml_escape(block.col_names[j]) + "</text>\n";
  }
  for (std::size_t i = 0; i < block.row_names.size(); ++i) {
    const double y = top + static_cast<double>(i) * kCell;
    out += "<text x=\"4\" y=\"" + io::format_double(y + kCell * 0.55) + "\">" + xml_escape(block.row_names[i]) + "</text>\n";
    for (std::size_t j = 0; j < block.col_names.size(); ++j) {
      const double x = kLabelW + static_cast<double>(j) * kCell;
      const bool undefined = block.row_constant[i] || block.col_constant[j];
      const double r = block.r[i][j];
      out += "<rect x=\"" + io::format_double(x) + "\" y=\"" + io::format_double(y) + "\" width=\"" +
             io::format_double(kCell) + "\" height=\"" + io::format_double(kCell) + "\" fill=\"" +
             (undefined ? std::string("#cccccc") : diverging_color(r)) + "\" stroke=\"#ffffff\"/>\n";
      out += "<text x=\"" + io::format_double(x + kCell / 2) + "\" y=\"" + io::format_double(y + kCell * 0.55) +
             "\" text-anchor=\"middle\">" + (undefined ? std::string("NA") : io::format_fixed(r, 2)) + "</text>\n";
    }
  }
  // Legend: vertical gradient from +1 (top) to -1 (bottom).
  const double lx = kLabelW + cols * kCell + 20;
  constexpr int kSteps = 20;
  constexpr double kStepH = 10;
  for (int s = 0; s < kSteps; ++s) {
    const double r = 1.0 - 2.0 * (s + 0.5) / kSteps;
    out += "<rect x=\"" + io::format_double(lx) + "\" y=\"" + io::format_double(top + s * kStepH) +
           "\" width=\"16\" height=\"" + io::format_double(kStepH) + "\" fill=\"" + diverging_color(r) + "\"/>\n";
  }
  out += "<text x=\"" + io::format_double(lx + 20) + "\" y=\"" + io::format_double(top + 8) + "\">+1</text>\n";
  out += "<text x=\"" + io::format_double(lx + 20) + "\" y=\"" + io::format_double(top + kSteps * kStepH / 2 + 4) +
         "\">0</text>\n";
  out += "<text x=\"" + io::format_double(lx + 20) + "\" y=\"" + io::format_double(top + kSteps * kStepH) + "\">-1</text>\n";
  out += "</svg>\n";
  return out;
}

double likert_mean(std::span<const int> answers) {
  if (answers.empty()) throw EmptyError("likert_mean of no answers");
  long sum = 0;
  for (int a : answers) {
    if (a < 1 || a > 5) throw RangeError("Likert answer out of range 1..5: " + std::to_string(a));
    sum += a;
  }
  return static_cast<double>(sum) / static_cast<double>(answers.size());
}

std::vector<LikertRow> likert_table(const std::vector<std::pair<std::string, std::vector<int>>>& answers) {
  std::vector<LikertRow> out;
  for (const auto& [item, values] : answers) out.push_back({item, likert_mean(values), values.size()});
  return out;
}

std::vector<std::pair<std::string, std::vector<int>>> parse_likert_csv(std::string_view text) {
  const auto rows = io::parse_csv(text);
  if (rows.empty()) throw SchemaError(0, "Likert CSV has no header");
  std::vector<std::pair<std::string, std::vector<int>>> out;
  for (const auto& name : rows.front()) out.push_back({name, {}});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    if (rows[r].size() != out.size()) throw SchemaError(r, "wrong number of answers");
    for (std::size_t c = 0; c < out.size(); ++c) {
      unsigned long long v = 0;
      if (!io::parse_uint(rows[r][c], v)) throw SchemaError(r, "answer is not an integer");
      if (v < 1 || v > 5) throw RangeError("Likert answer out of range 1..5 in row " + std::to_string(r));
      out[c].second.push_back(static_cast<int>(v));
    }
  }
  return out;
}

}  // namespace ecovid::eval
