#pragma once

// AC-Stark power calibration and transition-search statistics.

#include <vector>

namespace cqed::calib {

/// shift / chi1. A negative result (shift and chi1 of opposite sign) is
/// returned as is; check stark_sign_consistent to flag it.
double stark_to_photons(double shift, double chi1);
bool stark_sign_consistent(double shift, double chi1);

struct CalibrationCurve {
    std::vector<double> amplitudes;    ///< drive units, >= 0
    std::vector<double> stark_shifts;  ///< GHz
    std::vector<double> sigmas;        ///< GHz, > 0
    double chi1 = -1.515e-3;           ///< GHz

    void validate() const;  ///< throws ConfigError
};

/// nbar_d = a * amplitude^2, fitted by weighted least squares through the origin.
struct CalibrationFit {
    double a = 0.0;
    double sigma_a = 0.0;
    double max_fitted_amplitude = 0.0;
    int points = 0;

    double photons(double amplitude) const { return a * amplitude * amplitude; }
    /// (amplitude / max fitted amplitude)^2; > 1 means extrapolation.
    double extrapolation_factor(double amplitude) const;
    /// a +/- z sigma_a
    double lower(double z = 1.959963984540054) const { return a - z * sigma_a; }
    double upper(double z = 1.959963984540054) const { return a + z * sigma_a; }
};

/// Throws FitError when the design is rank deficient (all amplitudes zero).
CalibrationFit fit_quadratic_calibration(const CalibrationCurve& c);

struct DetectionThreshold {
    double delta = 0.0;     ///< minimum detectable increase of the leave probability
    int critical_count = 0; ///< leave events needed to reject the baseline
};

/// Exact one-tailed binomial test on the number of shots that leave the
/// prepared state, baseline leave probability q0 = 1 - p_baseline. The test
/// rejects at K >= k_crit with P(K >= k_crit | q0) <= 1 - confidence; delta is
/// the smallest q1 - q0 for which the test fires with probability >= confidence.
DetectionThreshold detection_threshold(int n_shots, double p_baseline, double confidence);

/// exp(-tau_total / t1); t1 = infinity gives 1.
double decay_survival(double tau_total, double t1);

}  // namespace cqed::calib
