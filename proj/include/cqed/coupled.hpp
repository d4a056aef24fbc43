#pragma once

// Transmon coupled to one linear mode:
//   H = H_transmon + w_a a^dag a - i g n (a - a^dag)
// in the product basis |t> (x) |r> of transmon eigenstates and Fock states.
// Product index = t * mode_levels + r. Fock states are rephased by i^r, which
// makes the coupling g n (a + a^dag) and the whole matrix real symmetric.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cqed/floquet.hpp"
#include "cqed/transmon.hpp"

namespace cqed::coupled {

struct JointSystemParams {
    transmon::TransmonParams transmon;
    double mode_freq = 0.0;  ///< w_a, GHz
    double g = 0.0;          ///< GHz
    int transmon_levels = 41;
    int mode_levels = 5;
    int keep_dressed = 45;

    void validate() const;  ///< throws ConfigError
};

using Label = std::pair<int, int>;  ///< (transmon t, mode r)

std::string label_string(const Label& l);

struct DressedSystem {
    int transmon_levels = 0;
    int mode_levels = 0;
    Eigen::VectorXd energies;        ///< ascending, GHz
    Eigen::MatrixXd dressed_states;  ///< product basis x kept
    std::vector<Label> labels;
    std::vector<double> label_weight;       ///< |overlap|^2 with the label
    std::vector<std::uint8_t> hybridized;   ///< label weight <= 0.5
    std::vector<std::uint8_t> reassigned;   ///< label is not the state's best overlap
    Eigen::MatrixXd charge_op;       ///< transmon charge (x) 1 in the dressed basis (empty unless built from params)

    int size() const noexcept { return static_cast<int>(energies.size()); }
    /// Kept state carrying the label, or -1.
    int index_of(const Label& l) const;
    /// Throws RangeError when the label is not kept.
    double energy(const Label& l) const;
};

/// Product-basis matrix. Throws ConfigError on truncation overflow.
Eigen::MatrixXd build_joint_hamiltonian(const JointSystemParams& p);

/// Lowest `keep` eigenpairs with injective (t, r) labels. States are labeled
/// in order of decreasing best overlap; a state whose best label is taken gets
/// its next-best unused label and is marked reassigned.
DressedSystem dress_and_truncate(const Eigen::MatrixXd& h, int transmon_levels, int mode_levels, int keep);

/// Build, diagonalize and attach the dressed charge operator.
DressedSystem dress(const JointSystemParams& p);

/// chi_n = [E(n,1) - E(n,0)] - [E(0,1) - E(0,0)]
double cross_kerr(const DressedSystem& d, int n);

struct JointTargets {
    double omega01 = 0.0;  ///< dressed E(1,0) - E(0,0)
    double alpha = 0.0;    ///< dressed E(2,0) - 2 E(1,0) + E(0,0)
    double omega_r = 0.0;  ///< dressed E(0,1) - E(0,0)
    double chi1 = 0.0;
};

JointTargets measure(const DressedSystem& d);

/// Fit (E_J, E_C, w_a, g) to dressed targets, alternating two 2D Newton
/// solves: (E_J, E_C) against (omega01, alpha), then (w_a, g) against
/// (omega_r, chi1). Residuals < 1e-4 GHz on all four targets. `base`
/// supplies ng, truncations and the starting point (w_a and g filled from
/// the targets when zero). Throws FitError on a degenerate Jacobian or
/// non-convergence.
JointSystemParams fit_joint(const JointTargets& targets, const JointSystemParams& base);

/// g = ((w_r - w_1)(w_r + w_1)/w_r) sqrt(chi1 / (8 alpha)). Throws DomainError
/// unless chi1 and alpha share a sign.
double g_from_chi(double omega_r, double omega_1, double chi1, double alpha);

struct TransitionFrequencies {
    double omega_mode = 0.0;
    double omega01 = 0.0;
    double omega12 = 0.0;
    double omega02 = 0.0;
    double omega13 = 0.0;
};

TransitionFrequencies transition_frequencies(const DressedSystem& d);

struct ResonanceCondition {
    std::string process;
    int drive_photons = 1;
    double omega_d = 0.0;  ///< GHz
};

/// Drive frequencies of the mode-mediated processes at AC-Stark shift `stark`:
///   exchange      2 w_d = w_r - w01 - stark
///   pair-01       2 w_d = w_r + w01 + stark
///   pair-12       2 w_d = w_r + w12 + stark
///   mode-02         w_d = w_s - w02 - stark
///   mode-13         w_d = w_s - w13 - stark
std::vector<ResonanceCondition> resonance_conditions(const TransitionFrequencies& f, double stark);
std::vector<ResonanceCondition> resonance_conditions(const DressedSystem& d, double stark);

struct CoupledScanOptions {
    floquet::ScanOptions scan;
    double mode_linewidth = 1.997e-3;  ///< GHz; drives within 5 linewidths of the mode are rejected
};

/// Joint-basis Floquet basis of a dressed system (charge_op must be present).
floquet::FloquetBasis joint_basis(const DressedSystem& d);

/// Scar map over the dressed joint basis. Initial states are (t, r) labels.
/// Populations: `population` is the transmon excitation, `mode_population`
/// the mode excitation.
floquet::FloquetScan coupled_scar_map(const JointSystemParams& p, const std::vector<double>& omega_d,
                                      const std::vector<double>& xi, const std::vector<double>& gate_charges,
                                      const std::vector<Label>& initial_states, const CoupledScanOptions& opts = {});

}  // namespace cqed::coupled
