#pragma once

// Floquet analysis of a charge-driven system H(t) = H0 + E_d cos(w_d t) N.
//
// Propagation runs in an undriven eigenbasis (FloquetBasis) so the same
// machinery serves the bare transmon and the dressed transmon-mode system.
// Frequencies are linear GHz; time is in ns (one period = 1/w_d).

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqed/linalg.hpp"
#include "cqed/transmon.hpp"

namespace cqed::floquet {

inline constexpr int kMinTimeSteps = 64;
inline constexpr int kDefaultTimeSteps = 256;
inline constexpr int kDefaultFloquetLevels = 30;

struct DriveSpec {
    double omega_d = 0.0;          ///< GHz
    std::vector<double> xi_grid;   ///< starts at 0, strictly increasing
    int time_steps = kDefaultTimeSteps;  ///< multiple of 4, >= 64

    void validate() const;
};

/// Undriven eigenbasis used for propagation.
struct FloquetBasis {
    Eigen::VectorXd energies;   ///< GHz, ascending
    Eigen::MatrixXd drive_op;   ///< drive operator in this basis, real symmetric
    /// Columns express each basis state in the bare reference basis
    /// (identity for the transmon, product states for a joint system).
    Eigen::MatrixXd bare_states;
    Eigen::VectorXd bare_excitation;  ///< weight j per bare state, used for N_i
    Eigen::VectorXd mode_excitation;  ///< optional second weight (joint systems)

    int size() const noexcept { return static_cast<int>(energies.size()); }
};

/// Lowest `levels` transmon eigenstates (all when levels <= 0).
FloquetBasis transmon_basis(const transmon::TransmonSpectrum& spectrum, int levels);

// Drive strength conversions.

/// E_d = xi (w_d^2 - w_q^2) / (2 n_zpf w_d). Throws DomainError when w_d = w_q.
double xi_to_drive_energy(double xi, double omega_d, double omega_q, double nzpf);
double drive_energy_to_xi(double ed, double omega_d, double omega_q, double nzpf);

/// AC-Stark shift of the qubit transition, xi^2 alpha / 2.
double stark_shift_from_xi(double xi, double alpha);

// Propagation.

/// U(T/4 + T, T/4): one drive period starting at the quarter period, where
/// cos(w_d t) crosses zero. Each of the `time_steps` slices (a multiple of 4)
/// is a fourth-order Magnus step with two Gauss points. The drive is even
/// about T/2, so only the first half period V is integrated:
/// U = W V^T V W^dag with W the first quarter.
/// Floquet modes are therefore sampled at t = T/4. At this origin a sign
/// flip of the drive operator (ng -> 1 - ng) conjugates the modes, so
/// Theta is symmetric in the gate charge.
/// Throws NumericError when ||U^dag U - I||_max > 1e-6.
Eigen::MatrixXcd one_period_propagator(const FloquetBasis& basis, double omega_d, double ed,
                                       int time_steps = kDefaultTimeSteps);

struct PeriodPropagator {
    Eigen::MatrixXcd period;   ///< U(T/4 + T, T/4)
    Eigen::MatrixXcd quarter;  ///< W = U(T/4, 0)
};

/// Same integration, also returning W so modes can be carried to t = 0.
PeriodPropagator period_propagator(const FloquetBasis& basis, double omega_d, double ed,
                                   int time_steps = kDefaultTimeSteps);

/// Same, in the full transmon eigenbasis of `p`.
Eigen::MatrixXcd one_period_propagator(const transmon::TransmonParams& p, double omega_d, double ed,
                                       int time_steps = kDefaultTimeSteps);

double fold_quasienergy(double e, double omega_d);

struct FloquetModes {
    Eigen::VectorXd quasienergies;  ///< GHz, in (-w_d/2, w_d/2]
    Eigen::MatrixXcd modes;         ///< orthonormal columns
    Eigen::VectorXcd eigenvalues;
};

/// Eigendecomposition of a unitary via complex Schur form. Throws
/// NumericError when the Schur form is not diagonal (defective input).
FloquetModes floquet_modes(const Eigen::MatrixXcd& u, double omega_d);

// Branch tracking.

struct BranchStep {
    std::vector<int> mode_for_branch;
    bool ambiguous = false;
};

/// Follows Floquet modes across increasing drive. Branches start as the basis
/// states; each step assigns modes to branches by the globally optimal
/// permutation maximizing summed |<branch|mode>|^2, then fixes each mode's
/// phase so its overlap with the previous branch state is real and positive.
class BranchTracker {
public:
    explicit BranchTracker(int dim);

    BranchStep advance(const FloquetModes& modes);

    const Eigen::MatrixXcd& states() const noexcept { return states_; }
    const Eigen::VectorXd& quasienergies() const noexcept { return quasienergies_; }

private:
    Eigen::MatrixXcd states_;
    Eigen::VectorXd quasienergies_;
};

/// Batch form: modes_by_xi[0] seeds the branches.
std::vector<BranchStep> track_branches(const std::vector<Eigen::MatrixXcd>& modes_by_xi);

// Ideal displaced state and hybridization.

struct IdealFitOptions {
    int degree = 4;
    int rejection_iterations = 3;
    double threshold_factor = 10.0;  ///< x median residual
    double residual_floor = 1e-3;
    double max_flag_fraction = 0.6;
};

struct IdealStateFit {
    Eigen::MatrixXcd states;        ///< row x: normalized ideal state at xi[x]
    std::vector<std::uint8_t> flags;  ///< resonant (rejected) points
    std::vector<double> residual;   ///< 1 - |<fit|branch>|^2
    bool failed = false;            ///< more than max_flag_fraction flagged
};

/// Fits every coefficient of a tracked branch (rows = xi points, columns =
/// basis components) with a polynomial in xi pinned to the undriven state at
/// xi = 0, rejecting outliers iteratively.
IdealStateFit ideal_displaced_state(const Eigen::MatrixXcd& coefficients, const std::vector<double>& xi,
                                    const IdealFitOptions& opts = {});

/// 1 - |<a|b>|^2, clamped to [0, 1].
double hybridization(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// sum_j w_j |<j|mode>|^2 over bare states j.
double branch_population(const Eigen::VectorXcd& bare_amplitudes, const Eigen::VectorXd& weights);
double branch_population(const Eigen::VectorXcd& mode, const FloquetBasis& basis);

// Column pipeline shared by the transmon and joint scans.

/// Theta and quasienergies refer to modes at t = T/4; population,
/// mode_population and max_bare_overlap to the same modes carried back to
/// t = 0, the drive crest.
struct BranchTrace {
    std::vector<double> theta;
    std::vector<double> quasienergy;
    std::vector<double> population;
    std::vector<double> mode_population;
    std::vector<double> max_bare_overlap;
    std::vector<std::uint8_t> resonant;
    bool fit_failed = false;
};

struct ColumnResult {
    std::vector<BranchTrace> traces;  ///< one per requested initial index
    int ambiguous_steps = 0;
};

/// Propagates, tracks and fits one (w_d, drive-strength) column.
/// drive_energies[x] is E_d at xi[x]; drive_energies[0] must be 0.
ColumnResult run_column(const FloquetBasis& basis, double omega_d, const std::vector<double>& xi,
                        const std::vector<double>& drive_energies, const std::vector<int>& initial_indices,
                        int time_steps = kDefaultTimeSteps, const IdealFitOptions& fit = {});

// Scans.

struct ScanOptions {
    int time_steps = kDefaultTimeSteps;
    int levels = kDefaultFloquetLevels;  ///< transmon eigenstates propagated
    int workers = 0;                     ///< 0: hardware concurrency
    IdealFitOptions fit;
};

/// Theta, quasienergy and N_i over (initial state, gate charge, w_d, xi).
struct FloquetScan {
    std::vector<double> gate_charges;
    std::vector<double> omega_d;
    std::vector<double> xi;
    std::vector<std::string> state_labels;
    std::vector<double> theta;
    std::vector<double> quasienergy;
    std::vector<double> population;
    std::vector<double> mode_population;  ///< empty for transmon-only scans
    std::vector<std::uint8_t> resonant;
    int failed_columns = 0;

    std::size_t index(std::size_t state, std::size_t gate, std::size_t omega, std::size_t x) const
    {
        return ((state * gate_charges.size() + gate) * omega_d.size() + omega) * xi.size() + x;
    }
    std::size_t size() const noexcept
    {
        return state_labels.size() * gate_charges.size() * omega_d.size() * xi.size();
    }

    /// Arithmetic mean over gate charges (NaN cells skipped).
    double theta_mean(std::size_t state, std::size_t omega, std::size_t x) const;
    double theta_max(std::size_t state, std::size_t omega, std::size_t x) const;

    /// Fraction of gate-averaged cells with Theta > threshold inside
    /// w_d in [omega_lo, omega_hi], xi^2 <= xi2_max.
    double fraction_above(std::size_t state, double threshold, double omega_lo, double omega_hi,
                          double xi2_max) const;
};

FloquetScan scar_map(const transmon::TransmonParams& p, const std::vector<double>& omega_d,
                     const std::vector<double>& xi, const std::vector<double>& gate_charges,
                     const std::vector<int>& initial_states, const ScanOptions& opts = {});

struct QuantumClassicalScan {
    std::vector<double> xi;
    std::vector<int> states;
    std::vector<std::vector<double>> max_overlap;   ///< [state][xi]
    std::vector<std::vector<double>> quasienergy;   ///< [state][xi]
    std::vector<double> onset_xi;                   ///< NaN when never below 0.5
};

QuantumClassicalScan quantum_classical_scan(const transmon::TransmonParams& p, double omega_d,
                                            const std::vector<double>& xi, const std::vector<int>& states,
                                            const ScanOptions& opts = {});

/// Evenly spaced grid, inclusive of both ends.
std::vector<double> linspace(double start, double stop, int count);

}  // namespace cqed::floquet
