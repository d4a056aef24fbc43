#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "cqed/errors.hpp"
#include "cqed/readout.hpp"

using namespace cqed;
using namespace cqed::readout;

namespace {

constexpr double kPi = 3.14159265358979323846;

ReadoutModel ideal(double nbar, double tau)
{
    ReadoutModel m;
    m.nbar_r = nbar;
    m.tau_r = tau;
    m.eta = 1.0;
    m.t1 = std::numeric_limits<double>::infinity();
    m.thermal_pop = 0.0;
    return m;
}

ShotSet gaussian_set(double mean_i, double mean_q, double sigma, std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    ShotSet s;
    for (std::size_t k = 0; k < n; ++k) s.shots.push_back({mean_i + g(rng), mean_q + g(rng), 0, 0});
    return s;
}

double fidelity(const ReadoutModel& m, std::size_t n, std::uint64_t seed)
{
    const auto s0 = simulate_shots(m, 0, n, seed);
    const auto s1 = simulate_shots(m, 1, n, seed + 1);
    const auto r = optimize_separatrix(s0, s1);
    return 0.5 * (r.f0 + r.f1);
}

}  // namespace

TEST_CASE("cavity field response")
{
    ReadoutModel m;
    m.nbar_r = 3.0;
    m.probe_detuning = 0.4e-3;
    CHECK(std::norm(steady_state_field(m, 0)) == doctest::Approx(3.0).epsilon(1e-12));
    const double hk = 0.5 * m.kappa;
    for (int n = 1; n < 4; ++n) {
        const double d = m.probe_detuning, c = m.chi[n];
        const double expected = (d * d + hk * hk) / ((d - c) * (d - c) + hk * hk);
        CHECK(std::norm(steady_state_field(m, n)) / std::norm(steady_state_field(m, 0))
              == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(steady_state_field(m, 4), RangeError);

    // Fixed drive: |alpha_1|^2 peaks when the probe sits on the shifted line.
    auto drive_response = [&](double detuning) {
        ReadoutModel q = m;
        q.probe_detuning = detuning;
        // rescale to a fixed drive amplitude
        return std::norm(steady_state_field(q, 1)) / std::norm(steady_state_field(q, 0))
               / (detuning * detuning + hk * hk);
    };
    const double peak = drive_response(m.chi[1]);
    for (double off : {-1e-4, -1e-5, 1e-5, 1e-4}) CHECK(drive_response(m.chi[1] + off) < peak);
}

TEST_CASE("Lorentzian drive-photon correction")
{
    const double dd = 1.626e-3, kappa = 1.997e-3, chi = -1.515e-3;
    CHECK(lorentzian_drive_correction(100.0, dd, kappa, chi, 0) == 100.0);
    CHECK(lorentzian_drive_correction(100.0, dd, kappa, chi, 1) == doctest::Approx(47.9).epsilon(0.001));
    CHECK(lorentzian_drive_correction(1.0, dd, kappa, chi, 1) == doctest::Approx(0.479).epsilon(0.001));
    // The quoted 0.254 uses a rounded 2 chi; the exact value is 0.2584.
    CHECK(lorentzian_drive_correction(1.0, dd, kappa, chi, 2) == doctest::Approx(0.254).epsilon(0.02));
}

TEST_CASE("model validation")
{
    ReadoutModel m;
    CHECK_NOTHROW(m.validate());
    m.eta = 0.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = {};
    m.thermal_pop = 0.5;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = {};
    m.chi[0] = 1e-4;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = {};
    CHECK_THROWS_AS(simulate_shots(m, 0, 0, 1), ConfigError);
    CHECK_THROWS_AS(simulate_shots(m, 7, 10, 1), RangeError);
    CHECK_THROWS_AS(simulate_shots(m, 0, kMaxInMemoryShots + 1, 1), RangeError);
}

TEST_CASE("shots are reproducible across worker counts")
{
    ReadoutModel m;
    m.nbar_r = 10.0;
    m.thermal_pop = 0.012;
    m.eta = 0.0174;
    const auto a = simulate_shots(m, 1, 3 * kShotChunk + 17, 99, 1);
    const auto b = simulate_shots(m, 1, 3 * kShotChunk + 17, 99, 3);
    const auto c = simulate_shots(m, 1, 3 * kShotChunk + 17, 100, 1);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        same = same && a.shots[k].i == b.shots[k].i && a.shots[k].q == b.shots[k].q
               && a.shots[k].initial == b.shots[k].initial;
        differs = differs || a.shots[k].i != c.shots[k].i;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("streaming matches the in-memory shots")
{
    ReadoutModel m;
    m.nbar_r = 5.0;
    const std::size_t n = 2 * kShotChunk + 100;
    const auto whole = simulate_shots(m, 1, n, 5, 2);
    std::vector<Shot> streamed;
    simulate_shots(m, 1, n, 5, 2, [&](const std::vector<Shot>& chunk) {
        streamed.insert(streamed.end(), chunk.begin(), chunk.end());
    });
    REQUIRE(streamed.size() == n);
    bool same = true;
    for (std::size_t k = 0; k < n; ++k) same = same && streamed[k].i == whole.shots[k].i && streamed[k].q == whole.shots[k].q;
    CHECK(same);
}

TEST_CASE("thermal resampling and decay")
{
    ReadoutModel m;
    m.thermal_pop = 0.1;
    m.t1 = 1e-6;
    m.tau_r = 1e-6;
    const auto s = simulate_shots(m, 0, 40000, 3);
    double flipped = 0.0;
    for (const auto& x : s.shots) flipped += x.initial != 0;
    const double p = flipped / s.size();
    CHECK(std::abs(p - 0.1) < 4.0 * std::sqrt(0.1 * 0.9 / s.size()));
}

TEST_CASE("SNR of synthetic Gaussians")
{
    const auto a = gaussian_set(0.0, 0.0, 1.0, 200000, 1);
    const auto b = gaussian_set(2.0, 0.0, 1.0, 200000, 2);
    CHECK(snr(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
    CHECK(snr(a, a) == 0.0);
    ShotSet flat, shifted;
    flat.shots.assign(10, Shot{1.0, 1.0, 0, 0});
    shifted.shots.assign(10, Shot{2.0, 1.0, 0, 0});
    CHECK(snr(flat, flat) == 0.0);
    CHECK_THROWS_AS(snr(flat, shifted), DomainError);
    CHECK_THROWS_AS(snr(ShotSet{}, a), DomainError);
}

TEST_CASE("SNR grows as the square root of the readout time")
{
    std::vector<double> tau, snr2;
    for (int k = 1; k <= 5; ++k) {
        const auto m = ideal(0.2, k * 200e-9);
        const auto s0 = simulate_shots(m, 0, 20000, 10 + k);
        const auto s1 = simulate_shots(m, 1, 20000, 20 + k);
        tau.push_back(m.tau_r);
        const double s = snr(s0, s1);
        snr2.push_back(s * s);
    }
    const double n = tau.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        sx += tau[k];
        sy += snr2[k];
        sxx += tau[k] * tau[k];
        sxy += tau[k] * snr2[k];
        syy += snr2[k] * snr2[k];
    }
    const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
    CHECK(cov * cov / (vx * vy) > 0.99);
    CHECK(std::sqrt(snr2[3] / snr2[0]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("measurement rate")
{
    const double gamma = angular(0.258e-3);
    const double tau = 5.06 / (4.0 * gamma);
    CHECK(measurement_rate(std::sqrt(5.06), tau) == doctest::Approx(gamma).epsilon(1e-12));
    CHECK(measurement_rate(0.0, tau) == 0.0);
    CHECK(measurement_rate(2.0, tau) == doctest::Approx(4.0 * measurement_rate(1.0, tau)).epsilon(1e-14));
    CHECK_THROWS_AS(measurement_rate(1.0, 0.0), DomainError);
}

TEST_CASE("dephasing rate")
{
    const double g = dephasing_rate(10.12, 1.997e-3, -1.515e-3);
    // Four significant figures: within half a unit of the fourth digit.
    CHECK(std::abs(g / (2.0 * kPi * 1e6) - 14.767) < 0.005);
    CHECK(dephasing_rate(0.0, 1.997e-3, -1.515e-3) == 0.0);
    CHECK(dephasing_rate(3.0, 1.997e-3, 1e3) == doctest::Approx(2.0 * 3.0 * angular(1.997e-3)).epsilon(1e-9));
}

TEST_CASE("efficiency and system noise")
{
    const auto e = efficiency_and_noise(angular(0.258e-3), angular(14.767e-3));
    CHECK(e.eta == doctest::Approx(0.0175).epsilon(0.01));
    CHECK(e.nbar_sys == doctest::Approx(28.1).epsilon(0.01));
    CHECK_FALSE(e.unphysical);
    CHECK(efficiency_and_noise(1.0, 1.0).nbar_sys == 0.0);
    CHECK(efficiency_and_noise(1.0, 2.0).nbar_sys == doctest::Approx(0.5));
    CHECK(efficiency_and_noise(3.0, 2.0).unphysical);
    CHECK_THROWS_AS(efficiency_and_noise(1.0, 0.0), DomainError);
}

TEST_CASE("efficiency loop recovers the injected efficiency")
{
    // The simulated separation corresponds to the cavity response with the
    // half linewidth, while the dephasing formula uses kappa^2 + chi^2. The
    // loop therefore returns eta (kappa^2 + chi^2) / (kappa^2 + 4 chi^2).
    ReadoutModel m = ideal(10.12, 780e-9);
    m.eta = 0.0174;
    const auto s0 = simulate_shots(m, 0, 50000, 31);
    const auto s1 = simulate_shots(m, 1, 50000, 32);
    const double gm = measurement_rate(snr(s0, s1), m.tau_r);
    const auto e = efficiency_and_noise(gm, dephasing_rate(m.nbar_r, m.kappa, m.chi[1]));
    const double k2 = m.kappa * m.kappa, c2 = m.chi[1] * m.chi[1];
    CHECK(e.eta == doctest::Approx(m.eta * (k2 + c2) / (k2 + 4.0 * c2)).epsilon(0.15));
}

TEST_CASE("separatrix fidelities are monotone in radius")
{
    ReadoutModel m;
    m.nbar_r = 10.0;
    m.eta = 0.0174;
    m.thermal_pop = 0.012;
    const auto s0 = simulate_shots(m, 0, 20000, 41);
    const auto s1 = simulate_shots(m, 1, 20000, 42);
    const auto c = median_point(s0);
    double f0_prev = -1.0, f1_prev = 2.0;
    for (double r = 0.0; r < 6.0; r += 0.05) {
        const auto [f0, f1] = separatrix_fidelities(s0, s1, {c, r});
        CHECK(f0 >= f0_prev);
        CHECK(f1 <= f1_prev);
        f0_prev = f0;
        f1_prev = f1;
    }
    const auto opt = optimize_separatrix(s0, s1);
    CHECK(opt.crossed);
    CHECK(std::abs(opt.f0 - opt.f1) < 1e-3);
    CHECK(opt.separatrix.radius >= 0.0);
}

TEST_CASE("separatrix limiting cases")
{
    const auto a = gaussian_set(0.0, 0.0, 0.1, 5000, 3);
    const auto far = gaussian_set(10.0, 0.0, 0.1, 5000, 4);
    const auto sep = optimize_separatrix(a, far);
    CHECK(sep.f0 == 1.0);
    CHECK(sep.f1 == 1.0);

    const auto same = optimize_separatrix(a, a);
    CHECK(same.f0 + same.f1 == doctest::Approx(1.0));
    CHECK(same.f0 == doctest::Approx(0.5).epsilon(0.01));
    for (double r : {0.05, 0.1, 0.2}) {
        const auto [f0, f1] = separatrix_fidelities(a, a, {median_point(a), r});
        CHECK(f0 + f1 == doctest::Approx(1.0));
    }
}

TEST_CASE("assignment error matches the two-Gaussian overlap")
{
    // eta = 1, no decay, no thermal population: each cluster is a circular
    // Gaussian with variance 1/2 per quadrature, so the distance to the
    // separatrix centre is Rician and F follows from a noncentral chi-squared
    // distribution with two degrees of freedom.
    ReadoutModel m = ideal(0.1, 780e-9);
    const std::size_t n = 50000;
    const auto s0 = simulate_shots(m, 0, n, 51);
    const auto s1 = simulate_shots(m, 1, n, 52);
    const auto opt = optimize_separatrix(s0, s1);
    const double scale = std::sqrt(2.0 * m.eta * angular(m.kappa) * m.tau_r);
    const auto c = opt.separatrix.center;
    const double r2 = opt.separatrix.radius * opt.separatrix.radius;
    auto inside = [&](std::complex<double> mu) {
        const double lambda = std::norm(scale * mu - c) / 0.5;
        boost::math::non_central_chi_squared dist(2.0, lambda);
        return boost::math::cdf(dist, r2 / 0.5);
    };
    const double f0 = inside(steady_state_field(m, 0));
    const double f1 = 1.0 - inside(steady_state_field(m, 1));
    CHECK(f0 > 0.6);
    CHECK(std::abs(opt.f0 - f0) < 3.0 * std::sqrt(f0 * (1.0 - f0) / n));
    CHECK(std::abs(opt.f1 - f1) < 3.0 * std::sqrt(f1 * (1.0 - f1) / n));
}

TEST_CASE("fidelity rises with the photon number")
{
    ReadoutModel m;
    m.eta = 0.0174;
    m.thermal_pop = 0.012;
    double previous = 0.0;
    for (double nbar : {1.0, 10.0, 109.0}) {
        m.nbar_r = nbar;
        const double f = fidelity(m, 20000, 61);
        CHECK(f > previous);
        previous = f;
    }
}

TEST_CASE("Bayes credence")
{
    CHECK(bayes_credence(0.8, 0.8) == doctest::Approx(0.8));
    CHECK(bayes_credence(0.9, 1.0) == doctest::Approx(1.0));
    CHECK(bayes_credence(1.0, 0.9) == doctest::Approx(1.0 / 1.1));
    CHECK_THROWS_AS(bayes_credence(1.2, 0.9), DomainError);
}

TEST_CASE("multi-state assignment")
{
    const std::vector<std::complex<double>> t{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    ShotSet s;
    s.shots = {{0.0, 0.0, 0, 0}, {1.0, 0.0, 0, 0}, {0.0, 1.0, 0, 0}, {0.5, 0.0, 0, 0}, {0.5, 0.5, 0, 0}};
    const auto labels = multi_state_assign(s, t);
    CHECK(labels == std::vector<int>{0, 1, 2, 0, 0});  // ties go to the lowest label
    CHECK_THROWS_AS(multi_state_assign(s, {{0.0, 0.0}, {0.0, 0.0}}), ConfigError);
}

TEST_CASE("four-state confusion matrix")
{
    ReadoutModel m;
    m.nbar_r = 8.0;
    m.tau_r = 10e-6;
    m.eta = 0.0174;
    m.t1 = std::numeric_limits<double>::infinity();
    m.thermal_pop = 0.0;
    m.probe_detuning = 0.5 * (m.chi[1] + m.chi[2]);
    std::vector<std::complex<double>> templates;
    for (int n = 0; n < 4; ++n) templates.push_back(median_point(simulate_shots(m, n, 5000, 70 + n)));
    for (int n = 0; n < 4; ++n) {
        const auto s = simulate_shots(m, n, 10000, 80 + n);
        const auto labels = multi_state_assign(s, templates);
        double hits = 0.0;
        for (int l : labels) hits += l == n;
        CHECK_MESSAGE(hits / s.size() > 0.95, "state " << n);
    }
}

TEST_CASE("empty cavity frequency")
{
    CHECK(empty_cavity_frequency(3.56e-3, 4.06e-3) == doctest::Approx(56.0).epsilon(0.5 / 56.0));
    const double c = 299792458.0, f = 40.0;
    const double l = c / (2.0 * f * 1e9) * std::sqrt(2.0);
    CHECK(empty_cavity_frequency(l, l) == doctest::Approx(f).epsilon(1e-12));
    CHECK(empty_cavity_frequency(2 * 3.56e-3, 2 * 4.06e-3)
          == doctest::Approx(0.5 * empty_cavity_frequency(3.56e-3, 4.06e-3)).epsilon(1e-14));
    CHECK_THROWS_AS(empty_cavity_frequency(0.0, 1.0), DomainError);
}
