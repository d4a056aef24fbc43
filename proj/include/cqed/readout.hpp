#pragma once

// Dispersive readout: steady-state cavity fields, Gaussian-mixture I/Q shots
// with a single decay jump, circular separatrix, and efficiency bookkeeping.
//
// Model frequencies are linear GHz; times are seconds. Rates returned by
// measurement_rate and dephasing_rate are angular (s^-1).

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace cqed::readout {

/// 2 pi f, f in GHz -> rad/s
double angular(double ghz);

struct ReadoutModel {
    double omega_r = 34.670;                                    ///< GHz
    double kappa = 1.997e-3;                                    ///< full linewidth, GHz
    std::vector<double> chi = {0.0, -1.515e-3, -3.002e-3, -4.457e-3};  ///< chi_n, GHz, chi_0 = 0
    double probe_detuning = 0.0;                                ///< GHz from omega_r
    double nbar_r = 1.0;                                        ///< photons with the transmon in |0>
    double tau_r = 780e-9;                                      ///< s
    double eta = 1.0;
    double t1 = 110e-6;                                         ///< s; infinity disables decay
    double thermal_pop = 0.0;

    void validate() const;  ///< throws ConfigError
};

/// alpha_n = eps / (kappa/2 + i 2 pi (Delta - chi_n)), eps fixed by |alpha_0|^2 = nbar_r.
std::complex<double> steady_state_field(const ReadoutModel& m, int n);

/// nbar0 (Delta^2 + kappa^2) / ((Delta - n chi)^2 + kappa^2), with kappa (not kappa/2)
/// in both terms as the calibration formula is usually quoted.
double lorentzian_drive_correction(double nbar0, double delta_d, double kappa, double chi, int n);

struct Shot {
    double i = 0.0;
    double q = 0.0;
    int prepared = 0;
    int initial = 0;  ///< state after thermal resampling
};

struct ShotSet {
    std::vector<Shot> shots;
    std::uint64_t seed = 0;
    int prepared = 0;

    std::size_t size() const noexcept { return shots.size(); }
};

inline constexpr std::size_t kShotChunk = 4096;
inline constexpr std::size_t kMaxInMemoryShots = 20'000'000;

/// Per shot: thermal resampling of the prepared label, a single n -> n-1
/// jump at an exponential time, mean sqrt(2 eta kappa tau) times the
/// time-averaged field, circular Gaussian noise of variance 1/2 per
/// quadrature. Shots are generated in fixed chunks seeded from (seed, chunk),
/// so output is independent of the worker count. Throws RangeError when
/// count exceeds kMaxInMemoryShots (use the streaming overload).
ShotSet simulate_shots(const ReadoutModel& m, int prepared, std::size_t count, std::uint64_t seed, int workers = 0);

/// Streaming form: chunks are delivered to `sink` in order.
void simulate_shots(const ReadoutModel& m, int prepared, std::size_t count, std::uint64_t seed, int workers,
                    const std::function<void(const std::vector<Shot>&)>& sink);

/// Separation of the means over the quadrature sum of the widths projected on
/// the separation axis. Throws DomainError for zero width.
double snr(const ShotSet& s0, const ShotSet& s1);

/// SNR^2 / (4 tau_r)
double measurement_rate(double snr, double tau_r);

/// 2 nbar kappa chi^2 / (kappa^2 + chi^2), kappa and chi given in GHz and
/// converted to angular units; result in rad/s.
double dephasing_rate(double nbar_r, double kappa, double chi1);

struct Efficiency {
    double eta = 0.0;
    double nbar_sys = 0.0;
    bool unphysical = false;  ///< eta > 1
};

Efficiency efficiency_and_noise(double gamma_m, double gamma_phi);

struct Separatrix {
    std::complex<double> center;
    double radius = 0.0;
};

struct SeparatrixResult {
    Separatrix separatrix;
    double f0 = 0.0;
    double f1 = 0.0;
    bool crossed = true;  ///< false: no equal-fidelity point, boundary optimum returned
};

/// (F0, F1): fraction of s0 inside (r <= radius) and of s1 outside.
std::pair<double, double> separatrix_fidelities(const ShotSet& s0, const ShotSet& s1, const Separatrix& sep);

/// Center at the component-wise median of s0; radius by bisection on F0 - F1.
SeparatrixResult optimize_separatrix(const ShotSet& s0, const ShotSet& s1);

/// F_n / (1 + F_n - F_other)
double bayes_credence(double f_n, double f_other);

std::complex<double> median_point(const ShotSet& s);

/// Nearest template; ties go to the lowest label. Throws ConfigError when two
/// templates coincide.
std::vector<int> multi_state_assign(const ShotSet& shots, const std::vector<std::complex<double>>& templates);

/// (c/2) sqrt(1/l2^2 + 1/l3^2), lengths in m, result in GHz.
double empty_cavity_frequency(double l2, double l3);

}  // namespace cqed::readout
