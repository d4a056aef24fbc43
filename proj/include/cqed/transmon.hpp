#pragma once

// Charge-basis transmon: H = 4 E_C (n - n_g)^2 - E_J cos(phi).
//
// All energies are linear frequencies in GHz (E/h). The charge basis spans
// k = -cutoff..+cutoff; cos(phi) is half the sum of the unit charge shifts.

#include <Eigen/Dense>

namespace cqed::transmon {

inline constexpr int kMinChargeCutoff = 10;
inline constexpr int kDefaultChargeCutoff = 30;

struct TransmonParams {
    double ej = 0.0;  ///< Josephson energy, GHz
    double ec = 0.0;  ///< charging energy, GHz
    double ng = 0.25;  ///< offset gate charge
    int charge_cutoff = kDefaultChargeCutoff;

    int dimension() const noexcept { return 2 * charge_cutoff + 1; }

    /// Structural checks every numerical routine needs: finite values,
    /// ec > 0, ej >= 0, cutoff >= 10. Throws ConfigError.
    void check_numeric() const;

    /// Full physical validation (adds ej > 0 and ej/ec > 1). Throws ConfigError.
    void validate() const;
};

/// Diagonalized transmon. Immutable once built.
struct TransmonSpectrum {
    TransmonParams params;
    Eigen::VectorXd energies;       ///< ascending, GHz
    Eigen::MatrixXd eigenvectors;   ///< columns are eigenstates in the charge basis
    Eigen::MatrixXd charge_matrix;  ///< <f|n|i> in the eigenbasis (real, gauge of the solver)

    int size() const noexcept { return static_cast<int>(energies.size()); }

    /// |<f|n|i>|
    Eigen::MatrixXd charge_elements() const { return charge_matrix.cwiseAbs(); }

    double transition(int from, int to) const { return energies(to) - energies(from); }
    double omega01() const { return transition(0, 1); }
    double anharmonicity() const { return transition(1, 2) - transition(0, 1); }
};

/// Unchecked charge-basis Hamiltonian builder (any cutoff >= 0).
Eigen::MatrixXd charge_hamiltonian(double ej, double ec, double ng, int cutoff);

/// Charge operator n, diagonal in the charge basis.
Eigen::MatrixXd charge_operator(int cutoff);

/// Hamiltonian for validated params; throws ConfigError when cutoff < 10.
Eigen::MatrixXd build_hamiltonian(const TransmonParams& p);

TransmonSpectrum diagonalize(const TransmonParams& p);

/// Number of levels bound in the cosine well: ceil(2^{-1/4} sqrt(ej/ec)).
int n_bound(double ej, double ec);

/// |E_level(ng = 0.5) - E_level(ng = 0)|.
double charge_dispersion(const TransmonParams& p, int level);

/// Charge zero-point fluctuation (E_J / 32 E_C)^{1/4}.
double n_zpf(const TransmonParams& p);

/// Asymptotic transmon estimate used to seed fit_ej_ec.
TransmonParams asymptotic_seed(double omega01, double alpha, double ng, int cutoff = kDefaultChargeCutoff);

/// Solve for (E_J, E_C) reproducing omega01 and alpha = omega12 - omega01
/// exactly. Damped Newton with a central-difference Jacobian.
/// Throws FitError after 100 iterations without convergence.
TransmonParams fit_ej_ec(double omega01, double alpha, double ng, int cutoff = kDefaultChargeCutoff);

}  // namespace cqed::transmon
