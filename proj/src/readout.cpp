#include "cqed/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "cqed/errors.hpp"
#include "cqed/linalg.hpp"
#include "cqed/parallel.hpp"

namespace cqed::readout {

double angular(double ghz)
{
    return 2.0 * std::numbers::pi * ghz * 1e9;
}

void ReadoutModel::validate() const
{
    if (!(kappa > 0.0)) throw ConfigError("readout.kappa: must be > 0");
    if (!(tau_r > 0.0)) throw ConfigError("readout.tau_r: must be > 0");
    if (!(eta > 0.0) || eta > 1.0) throw ConfigError("readout.eta: must lie in (0, 1]");
    if (!(thermal_pop >= 0.0) || thermal_pop >= 0.5) throw ConfigError("readout.thermal_pop: must lie in [0, 0.5)");
    if (!(nbar_r >= 0.0) || !std::isfinite(nbar_r)) throw ConfigError("readout.nbar_r: must be >= 0");
    if (!(t1 > 0.0)) throw ConfigError("readout.t1: must be > 0");
    if (chi.size() < 2) throw ConfigError("readout.chi: need at least chi_0 and chi_1");
    if (chi[0] != 0.0) throw ConfigError("readout.chi: chi_0 must be 0");
    if (!std::isfinite(probe_detuning)) throw ConfigError("readout.probe_detuning: must be finite");
}

std::complex<double> steady_state_field(const ReadoutModel& m, int n)
{
    if (n < 0 || n >= static_cast<int>(m.chi.size())) {
        throw RangeError("steady_state_field: no chi for state " + std::to_string(n));
    }
    const double half_k = 0.5 * angular(m.kappa);
    const auto response = [&](int k) {
        return 1.0 / std::complex<double>(half_k, angular(m.probe_detuning - m.chi[k]));
    };
    const double eps = std::sqrt(m.nbar_r) / std::abs(response(0));
    return eps * response(n);
}

double lorentzian_drive_correction(double nbar0, double delta_d, double kappa, double chi, int n)
{
    const double shifted = delta_d - n * chi;
    return nbar0 * (delta_d * delta_d + kappa * kappa) / (shifted * shifted + kappa * kappa);
}

namespace {

void fill_chunk(const ReadoutModel& m, int prepared, std::uint64_t seed, std::size_t chunk, std::size_t count,
                const std::vector<std::complex<double>>& alpha, Shot* out)
{
    std::mt19937_64 rng(mix_seed(seed, chunk));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::exponential_distribution<double> jump(1.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
    const double scale = std::sqrt(2.0 * m.eta * angular(m.kappa) * m.tau_r);
    const bool decays = std::isfinite(m.t1);

    for (std::size_t k = 0; k < count; ++k) {
        int state = prepared;
        if (uniform(rng) < m.thermal_pop) state = prepared == 0 ? 1 : 0;
        const double tj = jump(rng) * m.t1;  // drawn every shot to keep the stream aligned
        std::complex<double> mean = alpha[state];
        if (decays && state > 0 && tj < m.tau_r) {
            const double f = tj / m.tau_r;
            mean = f * alpha[state] + (1.0 - f) * alpha[state - 1];
        }
        mean *= scale;
        Shot& s = out[k];
        s.i = mean.real() + noise(rng);
        s.q = mean.imag() + noise(rng);
        s.prepared = prepared;
        s.initial = state;
    }
}

std::vector<std::complex<double>> fields(const ReadoutModel& m)
{
    std::vector<std::complex<double>> a;
    for (std::size_t n = 0; n < m.chi.size(); ++n) a.push_back(steady_state_field(m, static_cast<int>(n)));
    return a;
}

void check_shot_request(const ReadoutModel& m, int prepared, std::size_t count)
{
    m.validate();
    if (count < 1) throw ConfigError("simulate_shots: count must be >= 1");
    if (prepared < 0 || prepared >= static_cast<int>(m.chi.size())) {
        throw RangeError("simulate_shots: prepared state " + std::to_string(prepared) + " has no chi entry");
    }
}

}  // namespace

ShotSet simulate_shots(const ReadoutModel& m, int prepared, std::size_t count, std::uint64_t seed, int workers)
{
    check_shot_request(m, prepared, count);
    if (count > kMaxInMemoryShots) {
        throw RangeError("simulate_shots: " + std::to_string(count) + " shots exceed the in-memory budget of "
                         + std::to_string(kMaxInMemoryShots) + "; use the streaming overload");
    }
    const auto alpha = fields(m);
    ShotSet set;
    set.seed = seed;
    set.prepared = prepared;
    set.shots.resize(count);
    const std::size_t chunks = (count + kShotChunk - 1) / kShotChunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t begin = c * kShotChunk;
        fill_chunk(m, prepared, seed, c, std::min(kShotChunk, count - begin), alpha, set.shots.data() + begin);
    });
    return set;
}

void simulate_shots(const ReadoutModel& m, int prepared, std::size_t count, std::uint64_t seed, int workers,
                    const std::function<void(const std::vector<Shot>&)>& sink)
{
    check_shot_request(m, prepared, count);
    const auto alpha = fields(m);
    const std::size_t chunks = (count + kShotChunk - 1) / kShotChunk;
    const std::size_t batch = static_cast<std::size_t>(std::max(1, workers <= 0 ? default_workers() : workers));
    std::vector<std::vector<Shot>> buffers(batch);
    for (std::size_t first = 0; first < chunks; first += batch) {
        const std::size_t n = std::min(batch, chunks - first);
        parallel_for(n, workers, [&](std::size_t b) {
            const std::size_t c = first + b;
            const std::size_t len = std::min(kShotChunk, count - c * kShotChunk);
            buffers[b].resize(len);
            fill_chunk(m, prepared, seed, c, len, alpha, buffers[b].data());
        });
        for (std::size_t b = 0; b < n; ++b) sink(buffers[b]);
    }
}

namespace {

std::complex<double> mean_point(const ShotSet& s)
{
    std::complex<double> acc = 0.0;
    for (const auto& x : s.shots) acc += std::complex<double>(x.i, x.q);
    return acc / static_cast<double>(s.size());
}

double projected_variance(const ShotSet& s, std::complex<double> mean, std::complex<double> axis)
{
    double acc = 0.0;
    for (const auto& x : s.shots) {
        const double p = std::real(std::conj(axis) * (std::complex<double>(x.i, x.q) - mean));
        acc += p * p;
    }
    return s.size() > 1 ? acc / static_cast<double>(s.size() - 1) : 0.0;
}

}  // namespace

double snr(const ShotSet& s0, const ShotSet& s1)
{
    if (s0.shots.empty() || s1.shots.empty()) throw DomainError("snr: empty shot set");
    const auto m0 = mean_point(s0), m1 = mean_point(s1);
    const double sep = std::abs(m1 - m0);
    if (sep == 0.0) return 0.0;
    const auto axis = (m1 - m0) / sep;
    const double width = std::sqrt(projected_variance(s0, m0, axis) + projected_variance(s1, m1, axis));
    if (!(width > 0.0)) throw DomainError("snr: zero projected width");
    return sep / width;
}

double measurement_rate(double snr_value, double tau_r)
{
    if (!(tau_r > 0.0)) throw DomainError("measurement_rate: tau_r must be > 0");
    return snr_value * snr_value / (4.0 * tau_r);
}

double dephasing_rate(double nbar_r, double kappa, double chi1)
{
    const double k = angular(kappa), c = angular(chi1);
    if (k == 0.0 && c == 0.0) return 0.0;
    return 2.0 * nbar_r * k * c * c / (k * k + c * c);
}

Efficiency efficiency_and_noise(double gamma_m, double gamma_phi)
{
    if (!(gamma_phi > 0.0)) throw DomainError("efficiency_and_noise: gamma_phi must be > 0");
    Efficiency e;
    e.eta = gamma_m / gamma_phi;
    e.nbar_sys = (1.0 / e.eta - 1.0) / 2.0;
    e.unphysical = e.eta > 1.0;
    return e;
}

std::complex<double> median_point(const ShotSet& s)
{
    if (s.shots.empty()) throw DomainError("median_point: empty shot set");
    std::vector<double> i, q;
    i.reserve(s.size());
    q.reserve(s.size());
    for (const auto& x : s.shots) {
        i.push_back(x.i);
        q.push_back(x.q);
    }
    return {linalg::median(std::move(i)), linalg::median(std::move(q))};
}

namespace {

std::vector<double> sorted_radii(const ShotSet& s, std::complex<double> c)
{
    std::vector<double> r;
    r.reserve(s.size());
    for (const auto& x : s.shots) r.push_back(std::abs(std::complex<double>(x.i, x.q) - c));
    std::sort(r.begin(), r.end());
    return r;
}

double fraction_within(const std::vector<double>& sorted, double radius)
{
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), radius);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

}  // namespace

std::pair<double, double> separatrix_fidelities(const ShotSet& s0, const ShotSet& s1, const Separatrix& sep)
{
    if (s0.shots.empty() || s1.shots.empty()) throw DomainError("separatrix_fidelities: empty shot set");
    const auto r0 = sorted_radii(s0, sep.center), r1 = sorted_radii(s1, sep.center);
    return {fraction_within(r0, sep.radius), 1.0 - fraction_within(r1, sep.radius)};
}

SeparatrixResult optimize_separatrix(const ShotSet& s0, const ShotSet& s1)
{
    if (s0.shots.empty() || s1.shots.empty()) throw DomainError("optimize_separatrix: empty shot set");
    SeparatrixResult out;
    out.separatrix.center = median_point(s0);
    const auto r0 = sorted_radii(s0, out.separatrix.center), r1 = sorted_radii(s1, out.separatrix.center);
    const auto gap = [&](double r) { return fraction_within(r0, r) - (1.0 - fraction_within(r1, r)); };

    // gap(r) is nondecreasing; find the smallest radius where it turns >= 0.
    double lo = 0.0, hi = std::max(r0.back(), r1.back());
    if (gap(lo) >= 0.0) {
        hi = lo;
        out.crossed = gap(lo) == 0.0;
    } else {
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (gap(mid) >= 0.0 ? hi : lo) = mid;
        }
    }
    // Closest of the two bracketing radii to the equal-fidelity point.
    const double r = std::abs(gap(lo)) < std::abs(gap(hi)) ? lo : hi;
    out.separatrix.radius = r;
    out.f0 = fraction_within(r0, r);
    out.f1 = 1.0 - fraction_within(r1, r);
    return out;
}

double bayes_credence(double f_n, double f_other)
{
    if (f_n < 0.0 || f_n > 1.0 || f_other < 0.0 || f_other > 1.0) {
        throw DomainError("bayes_credence: fidelities must lie in [0, 1]");
    }
    return f_n / (1.0 + f_n - f_other);
}

std::vector<int> multi_state_assign(const ShotSet& shots, const std::vector<std::complex<double>>& templates)
{
    if (templates.empty()) throw ConfigError("multi_state_assign: no templates");
    for (std::size_t a = 0; a < templates.size(); ++a)
        for (std::size_t b = a + 1; b < templates.size(); ++b)
            if (std::abs(templates[a] - templates[b]) < 1e-12) {
                throw ConfigError("multi_state_assign: templates " + std::to_string(a) + " and "
                                  + std::to_string(b) + " coincide");
            }
    std::vector<int> labels(shots.size());
    for (std::size_t k = 0; k < shots.size(); ++k) {
        const std::complex<double> z(shots.shots[k].i, shots.shots[k].q);
        int best = 0;
        double dbest = std::norm(z - templates[0]);
        for (std::size_t t = 1; t < templates.size(); ++t) {
            const double d = std::norm(z - templates[t]);
            if (d < dbest) {
                dbest = d;
                best = static_cast<int>(t);
            }
        }
        labels[k] = best;
    }
    return labels;
}

double empty_cavity_frequency(double l2, double l3)
{
    if (!(l2 > 0.0) || !(l3 > 0.0)) throw DomainError("empty_cavity_frequency: lengths must be > 0");
    constexpr double c = 299792458.0;
    return 0.5 * c * std::sqrt(1.0 / (l2 * l2) + 1.0 / (l3 * l3)) * 1e-9;
}

}  // namespace cqed::readout
