#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ecovid/table.hpp"

namespace ecovid::learn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x d matrix from the table's rows.
Matrix to_matrix(const FeatureTable& table);
Vector to_vector(std::span<const double> values);
std::vector<double> to_std(const Vector& v);

}  // namespace ecovid::learn
