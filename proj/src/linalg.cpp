#include "cqed/linalg.hpp"

#include <algorithm>
#include <limits>

#include "cqed/errors.hpp"

namespace cqed::linalg {

double unitarity_error(const Eigen::MatrixXcd& u)
{
    const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

double hermiticity_error(const Eigen::MatrixXcd& a)
{
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double hermiticity_error(const Eigen::MatrixXd& a)
{
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& score)
{
    // Shortest augmenting path with potentials, 1-based internally.
    const int n = static_cast<int>(score.rows());
    if (score.cols() != n) {
        throw ConfigError("max_weight_assignment: score matrix must be square");
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_for_row(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) col_for_row[p[j] - 1] = j - 1;
    }
    return col_for_row;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
{
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < a.cols()) {
        throw NumericError("least squares: design matrix is rank deficient (rank "
                           + std::to_string(qr.rank()) + " < " + std::to_string(a.cols()) + ")");
    }
    return qr.solve(b);
}

double median(std::vector<double> values)
{
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const double lower = *std::max_element(values.begin(), values.begin() + mid);
        m = 0.5 * (m + lower);
    }
    return m;
}

}  // namespace cqed::linalg
