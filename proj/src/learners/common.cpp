#include "ecovid/learners/common.hpp"

namespace ecovid::learn {

Matrix to_matrix(const FeatureTable& table) {
  Matrix X(static_cast<Eigen::Index>(table.num_rows()), static_cast<Eigen::Index>(table.num_cols()));
  for (std::size_t i = 0; i < table.num_rows(); ++i)
    for (std::size_t j = 0; j < table.num_cols(); ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
  return X;
}

Vector to_vector(std::span<const double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace ecovid::learn
