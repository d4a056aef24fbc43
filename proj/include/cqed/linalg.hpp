#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cqed {

using cplx = std::complex<double>;

namespace linalg {

/// max_ij |U^dagger U - I|_ij
double unitarity_error(const Eigen::MatrixXcd& u);

/// max_ij |A - A^dagger|_ij
double hermiticity_error(const Eigen::MatrixXcd& a);
double hermiticity_error(const Eigen::MatrixXd& a);

/// Globally optimal assignment maximizing the summed score (Hungarian algorithm,
/// O(n^3)). score(r, c) is the benefit of assigning row r to column c. Returns
/// col_for_row. Ties resolve toward lower column index.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& score);

/// Dense least squares via column-pivoting QR; throws NumericError when rank
/// deficient.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

double median(std::vector<double> values);

}  // namespace linalg
}  // namespace cqed
