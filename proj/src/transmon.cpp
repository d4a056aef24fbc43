#include "cqed/transmon.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "cqed/errors.hpp"

namespace cqed::transmon {

void TransmonParams::check_numeric() const
{
    if (!std::isfinite(ej) || !std::isfinite(ec) || !std::isfinite(ng)) {
        throw ConfigError("transmon: ej, ec and ng must be finite");
    }
    if (ec <= 0.0) throw ConfigError("transmon.ec: must be > 0 (got " + std::to_string(ec) + ")");
    if (ej < 0.0) throw ConfigError("transmon.ej: must be >= 0 (got " + std::to_string(ej) + ")");
    if (charge_cutoff < kMinChargeCutoff) {
        throw ConfigError("transmon.charge_cutoff: must be >= " + std::to_string(kMinChargeCutoff)
                          + " for a truncation-safe spectrum (got " + std::to_string(charge_cutoff) + ")");
    }
}

void TransmonParams::validate() const
{
    check_numeric();
    if (ej <= 0.0) throw ConfigError("transmon.ej: must be > 0 (got " + std::to_string(ej) + ")");
    if (ej / ec <= 1.0) {
        throw ConfigError("transmon: ej/ec must exceed 1 (got " + std::to_string(ej / ec) + ")");
    }
}

Eigen::MatrixXd charge_hamiltonian(double ej, double ec, double ng, int cutoff)
{
    const int dim = 2 * cutoff + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double k = i - cutoff;
        h(i, i) = 4.0 * ec * (k - ng) * (k - ng);
        if (i + 1 < dim) {
            h(i, i + 1) = -0.5 * ej;
            h(i + 1, i) = -0.5 * ej;
        }
    }
    return h;
}

Eigen::MatrixXd charge_operator(int cutoff)
{
    const int dim = 2 * cutoff + 1;
    Eigen::VectorXd k(dim);
    for (int i = 0; i < dim; ++i) k(i) = i - cutoff;
    return k.asDiagonal();
}

Eigen::MatrixXd build_hamiltonian(const TransmonParams& p)
{
    p.check_numeric();
    return charge_hamiltonian(p.ej, p.ec, p.ng, p.charge_cutoff);
}

TransmonSpectrum diagonalize(const TransmonParams& p)
{
    const Eigen::MatrixXd h = build_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "transmon eigensolver did not converge (dim " << h.rows() << ", |H|_max "
            << h.cwiseAbs().maxCoeff() << ", ej/ec " << p.ej / p.ec << ")";
        throw NumericError(msg.str());
    }

    TransmonSpectrum s;
    s.params = p;
    s.energies = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
    // Deterministic sign gauge: largest component positive.
    for (int c = 0; c < s.eigenvectors.cols(); ++c) {
        Eigen::Index imax = 0;
        s.eigenvectors.col(c).cwiseAbs().maxCoeff(&imax);
        if (s.eigenvectors(imax, c) < 0.0) s.eigenvectors.col(c) *= -1.0;
    }
    const Eigen::VectorXd k = charge_operator(p.charge_cutoff).diagonal();
    s.charge_matrix = s.eigenvectors.transpose() * k.asDiagonal() * s.eigenvectors;
    s.charge_matrix = 0.5 * (s.charge_matrix + s.charge_matrix.transpose()).eval();
    return s;
}

int n_bound(double ej, double ec)
{
    if (!(ec > 0.0) || ej / ec <= 1.0) {
        throw DomainError("n_bound: requires ej/ec > 1");
    }
    const double x = std::pow(0.5, 0.25) * std::sqrt(ej / ec);
    // Absorb rounding so exact integers (e.g. ej/ec = sqrt 2 -> 1) do not round up.
    return static_cast<int>(std::ceil(x - 1e-12));
}

double charge_dispersion(const TransmonParams& p, int level)
{
    if (level < 0 || level >= p.dimension() - 2) {
        throw RangeError("charge_dispersion: level " + std::to_string(level)
                         + " outside truncation-safe range [0, " + std::to_string(p.dimension() - 2) + ")");
    }
    TransmonParams a = p, b = p;
    a.ng = 0.0;
    b.ng = 0.5;
    return std::abs(diagonalize(b).energies(level) - diagonalize(a).energies(level));
}

double n_zpf(const TransmonParams& p)
{
    return std::pow(p.ej / (32.0 * p.ec), 0.25);
}

TransmonParams asymptotic_seed(double omega01, double alpha, double ng, int cutoff)
{
    // omega01 ~ sqrt(8 ej ec) - ec, alpha ~ -ec
    TransmonParams p;
    p.ec = -alpha;
    p.ej = (omega01 + p.ec) * (omega01 + p.ec) / (8.0 * p.ec);
    p.ng = ng;
    p.charge_cutoff = cutoff;
    return p;
}

namespace {

Eigen::Vector2d fit_residual(double ej, double ec, const TransmonParams& base, double omega01, double alpha)
{
    TransmonParams p = base;
    p.ej = ej;
    p.ec = ec;
    const auto s = diagonalize(p);
    return {s.omega01() - omega01, s.anharmonicity() - alpha};
}

}  // namespace

TransmonParams fit_ej_ec(double omega01, double alpha, double ng, int cutoff)
{
    if (!(omega01 > 0.0) || !(alpha < 0.0) || std::abs(alpha) >= omega01) {
        throw DomainError("fit_ej_ec: requires omega01 > 0, alpha < 0 and |alpha| < omega01");
    }
    constexpr int kMaxIter = 100;
    constexpr double kTol = 1e-9;  // GHz
    constexpr double kStep = 1e-4;  // GHz, central-difference step

    TransmonParams p = asymptotic_seed(omega01, alpha, ng, cutoff);
    Eigen::Vector2d r = fit_residual(p.ej, p.ec, p, omega01, alpha);

    for (int iter = 0; iter < kMaxIter; ++iter) {
        if (r.cwiseAbs().maxCoeff() < kTol) return p;

        Eigen::Matrix2d jac;
        jac.col(0) = (fit_residual(p.ej + kStep, p.ec, p, omega01, alpha)
                      - fit_residual(p.ej - kStep, p.ec, p, omega01, alpha)) / (2.0 * kStep);
        const double hc = std::min(kStep, 0.5 * p.ec);
        jac.col(1) = (fit_residual(p.ej, p.ec + hc, p, omega01, alpha)
                      - fit_residual(p.ej, p.ec - hc, p, omega01, alpha)) / (2.0 * hc);
        if (std::abs(jac.determinant()) < 1e-14) {
            throw FitError("fit_ej_ec: singular Jacobian", {r(0), r(1)});
        }
        const Eigen::Vector2d step = -jac.partialPivLu().solve(r);

        // Backtrack until the residual shrinks and parameters stay physical.
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const double ej = p.ej + lambda * step(0);
            const double ec = p.ec + lambda * step(1);
            if (ej <= 0.0 || ec <= 0.0) continue;
            const Eigen::Vector2d rn = fit_residual(ej, ec, p, omega01, alpha);
            if (rn.norm() < r.norm()) {
                p.ej = ej;
                p.ec = ec;
                r = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    // A stalled line search this close to the root is eigensolver round-off.
    if (r.cwiseAbs().maxCoeff() < 1e3 * kTol) return p;
    throw FitError("fit_ej_ec: no convergence in 100 iterations", {r(0), r(1)});
}

}  // namespace cqed::transmon
