#include "cqed/calib.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/binomial.hpp>

#include "cqed/errors.hpp"

namespace cqed::calib {

double stark_to_photons(double shift, double chi1)
{
    if (chi1 == 0.0) throw DomainError("stark_to_photons: chi1 must be nonzero");
    return shift / chi1;
}

bool stark_sign_consistent(double shift, double chi1)
{
    return shift == 0.0 || (shift > 0.0) == (chi1 > 0.0);
}

void CalibrationCurve::validate() const
{
    if (amplitudes.size() != stark_shifts.size() || amplitudes.size() != sigmas.size()) {
        throw ConfigError("calibration: amplitudes, shifts and sigmas must have equal length");
    }
    if (amplitudes.size() < 3) throw ConfigError("calibration: need at least 3 points");
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        if (!(amplitudes[k] >= 0.0)) throw ConfigError("calibration.amplitude: must be >= 0");
        if (!(sigmas[k] > 0.0)) throw ConfigError("calibration.sigma: must be > 0");
        if (!std::isfinite(stark_shifts[k])) throw ConfigError("calibration.shift: must be finite");
    }
    if (chi1 == 0.0) throw ConfigError("calibration.chi1: must be nonzero");
}

double CalibrationFit::extrapolation_factor(double amplitude) const
{
    return (amplitude / max_fitted_amplitude) * (amplitude / max_fitted_amplitude);
}

CalibrationFit fit_quadratic_calibration(const CalibrationCurve& c)
{
    c.validate();
    double sxx = 0.0, sxy = 0.0, amax = 0.0;
    for (std::size_t k = 0; k < c.amplitudes.size(); ++k) {
        const double x = c.amplitudes[k] * c.amplitudes[k];
        const double y = stark_to_photons(c.stark_shifts[k], c.chi1);
        const double sy = c.sigmas[k] / std::abs(c.chi1);
        const double w = 1.0 / (sy * sy);
        sxx += w * x * x;
        sxy += w * x * y;
        amax = std::max(amax, c.amplitudes[k]);
    }
    if (!(sxx > 0.0)) throw FitError("fit_quadratic_calibration: all amplitudes are zero", {});
    CalibrationFit f;
    f.a = sxy / sxx;
    f.sigma_a = 1.0 / std::sqrt(sxx);
    f.max_fitted_amplitude = amax;
    f.points = static_cast<int>(c.amplitudes.size());
    return f;
}

DetectionThreshold detection_threshold(int n_shots, double p_baseline, double confidence)
{
    if (n_shots < 100) throw DomainError("detection_threshold: n_shots must be >= 100");
    if (!(p_baseline > 0.0 && p_baseline < 1.0)) throw DomainError("detection_threshold: p_baseline in (0, 1)");
    if (!(confidence > 0.5 && confidence < 1.0)) throw DomainError("detection_threshold: confidence in (0.5, 1)");

    using boost::math::binomial;
    using boost::math::cdf;
    using boost::math::complement;
    const double q0 = 1.0 - p_baseline;
    const double alpha = 1.0 - confidence;
    // P(K >= k | q)
    const auto tail = [&](int k, double q) {
        if (k <= 0) return 1.0;
        return cdf(complement(binomial(n_shots, q), k - 1));
    };

    int lo = 0, hi = n_shots + 1;  // tail(hi) = 0 <= alpha
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (tail(mid, q0) <= alpha ? hi : lo) = mid;
    }
    DetectionThreshold out;
    out.critical_count = hi;
    if (hi > n_shots) {
        out.delta = 1.0 - q0;
        return out;
    }

    double qa = q0, qb = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (qa + qb);
        (tail(hi, mid) >= confidence ? qb : qa) = mid;
        if (qb - qa < 1e-14) break;
    }
    out.delta = qb - q0;
    return out;
}

double decay_survival(double tau_total, double t1)
{
    if (!(tau_total >= 0.0) || !(t1 > 0.0)) throw DomainError("decay_survival: times must be positive");
    if (std::isinf(t1)) return 1.0;
    return std::exp(-tau_total / t1);
}

}  // namespace cqed::calib
