#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqed/errors.hpp"
#include "cqed/floquet.hpp"
#include "cqed/linalg.hpp"
#include "cqed/transmon.hpp"

using namespace cqed;
using namespace cqed::floquet;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

transmon::TransmonParams device(double ng = 0.25)
{
    transmon::TransmonParams p;
    p.ej = 10.23;
    p.ec = 0.129;
    p.ng = ng;
    return p;
}

FloquetBasis toy_basis()
{
    FloquetBasis b;
    b.energies = Eigen::Vector3d(0.0, 4.1, 7.9);
    b.drive_op = Eigen::Matrix3d::Zero();
    b.drive_op(0, 1) = b.drive_op(1, 0) = 1.0;
    b.drive_op(1, 2) = b.drive_op(2, 1) = 1.4;
    b.drive_op(0, 0) = 0.2;
    b.drive_op(2, 2) = -0.3;
    b.bare_states = Eigen::Matrix3d::Identity();
    b.bare_excitation = Eigen::Vector3d(0.0, 1.0, 2.0);
    return b;
}

// Brute-force RK4 integration of i d/dt psi = 2 pi H(t) psi, t in ns,
// starting at the quarter period like the propagator.
VectorXcd rk4_evolve(const FloquetBasis& b, double omega_d, double ed, VectorXcd psi, int periods, int steps_per_period)
{
    const Eigen::MatrixXd h0 = b.energies.asDiagonal();
    const double dt = 1.0 / (omega_d * steps_per_period);
    const double t0 = 0.25 / omega_d;
    const auto rhs = [&](double t, const VectorXcd& y) -> VectorXcd {
        const Eigen::MatrixXd h = h0 + ed * std::cos(kTwoPi * omega_d * t) * b.drive_op;
        return cplx(0.0, -kTwoPi) * (h.cast<cplx>() * y);
    };
    for (int n = 0; n < periods * steps_per_period; ++n) {
        const double t = t0 + n * dt;
        const VectorXcd k1 = rhs(t, psi);
        const VectorXcd k2 = rhs(t + dt / 2, psi + dt / 2 * k1);
        const VectorXcd k3 = rhs(t + dt / 2, psi + dt / 2 * k2);
        const VectorXcd k4 = rhs(t + dt, psi + dt * k3);
        psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return psi;
}

double fold_distance(double a, double b, double omega_d)
{
    return std::abs(fold_quasienergy(a - b, omega_d));
}

}  // namespace

TEST_CASE("drive strength conversion")
{
    CHECK(xi_to_drive_energy(0.0, 34.670, 3.083, 1.255) == 0.0);
    const double expected = (34.670 * 34.670 - 3.083 * 3.083) / (2.0 * 1.255 * 34.670);
    CHECK(xi_to_drive_energy(1.0, 34.670, 3.083, 1.255) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(13.70).epsilon(1e-3));
    for (double xi : {0.1, 1.7, 4.2}) {
        const double ed = xi_to_drive_energy(xi, 5.0, 3.083, 1.255);
        CHECK(std::abs(drive_energy_to_xi(ed, 5.0, 3.083, 1.255) - xi) < 1e-12);
    }
    CHECK_THROWS_AS(xi_to_drive_energy(1.0, 3.083, 3.083, 1.255), DomainError);
}

TEST_CASE("stark shift and photon number")
{
    CHECK(stark_shift_from_xi(0.0, -0.141) == 0.0);
    CHECK(stark_shift_from_xi(std::sqrt(2.0), -0.141) == doctest::Approx(-0.141).epsilon(1e-14));
    const double nbar = stark_shift_from_xi(std::sqrt(21.5), -0.141) / -1.515e-3;
    CHECK(nbar == doctest::Approx(1000.0).epsilon(0.01));
}

TEST_CASE("drive spec validation")
{
    DriveSpec d;
    d.omega_d = 5.0;
    d.xi_grid = {0.0, 0.1, 0.2};
    CHECK_NOTHROW(d.validate());
    d.time_steps = 32;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d.time_steps = 256;
    d.xi_grid = {0.1, 0.2};
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d.xi_grid = {0.0, 0.2, 0.2};
    CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("undriven propagator")
{
    const auto spec = transmon::diagonalize(device());
    const auto basis = transmon_basis(spec, 12);
    const double w = 7.3;
    const auto u = one_period_propagator(basis, w, 0.0);
    for (int j = 0; j < basis.size(); ++j) {
        const cplx expected = std::exp(cplx(0.0, -kTwoPi * basis.energies(j) / w));
        CHECK(std::abs(u(j, j) - expected) < 1e-12);
    }
    CHECK((u - MatrixXcd(u.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("propagator unitarity and step doubling")
{
    const auto spec = transmon::diagonalize(device());
    const auto basis = transmon_basis(spec, 30);
    const double wq = spec.omega01(), nz = transmon::n_zpf(device());
    for (double w : {5.0, 34.67}) {
        for (double xi : {1.0, 3.0, 5.0}) {
            const double ed = xi_to_drive_energy(xi, w, wq, nz);
            const auto u128 = one_period_propagator(basis, w, ed, 128);
            const auto u256 = one_period_propagator(basis, w, ed, 256);
            CHECK(linalg::unitarity_error(u256) < 1e-8);
            CHECK((u256 - u128).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
    CHECK_THROWS_AS(one_period_propagator(basis, 5.0, 1.0, 66), ConfigError);
    CHECK_THROWS_AS(one_period_propagator(basis, 5.0, 1.0, 32), ConfigError);
}

TEST_CASE("full-basis propagator overload")
{
    auto p = device();
    p.charge_cutoff = 10;
    const auto u = one_period_propagator(p, 9.0, 2.0, 64);
    CHECK(u.rows() == p.dimension());
    CHECK(linalg::unitarity_error(u) < 1e-8);
}

TEST_CASE("quasienergy folding")
{
    const double w = 4.0;
    CHECK(fold_quasienergy(2.0, w) == doctest::Approx(2.0));
    CHECK(fold_quasienergy(-2.0, w) == doctest::Approx(2.0));
    CHECK(fold_quasienergy(0.0, w) == 0.0);
    CHECK(fold_quasienergy(5.0, w) == doctest::Approx(1.0));
    CHECK(fold_quasienergy(-5.0, w) == doctest::Approx(-1.0));
    for (double e = -37.0; e < 37.0; e += 0.731) {
        const double f = fold_quasienergy(e, w);
        CHECK(f > -w / 2);
        CHECK(f <= w / 2);
        const double k = (e - f) / w;
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
}

TEST_CASE("floquet modes of simple unitaries")
{
    const auto id = floquet_modes(MatrixXcd::Identity(5, 5), 6.0);
    CHECK(id.quasienergies.cwiseAbs().maxCoeff() < 1e-12);

    const auto spec = transmon::diagonalize(device());
    const auto basis = transmon_basis(spec, 10);
    const double w = 6.1;
    const auto m = floquet_modes(one_period_propagator(basis, w, 0.0), w);
    std::vector<double> got(m.quasienergies.data(), m.quasienergies.data() + m.quasienergies.size());
    for (int j = 0; j < basis.size(); ++j) {
        const double expected = fold_quasienergy(basis.energies(j), w);
        bool found = false;
        for (double g : got) found = found || fold_distance(g, expected, w) < 1e-9;
        CHECK(found);
    }
    for (int k = 0; k < m.eigenvalues.size(); ++k) CHECK(std::abs(std::abs(m.eigenvalues(k)) - 1.0) < 1e-8);
    CHECK(linalg::unitarity_error(m.modes) < 1e-10);
}

TEST_CASE("toy system quasienergies match brute-force integration over 50 periods")
{
    const auto b = toy_basis();
    for (double w : {2.9, 5.3}) {
        for (double ed : {0.4, 1.5}) {
            const auto modes = floquet_modes(one_period_propagator(b, w, ed, 256), w);
            for (int k = 0; k < 3; ++k) {
                const VectorXcd phi = modes.modes.col(k);
                VectorXcd psi = phi;
                double phase = 0.0;
                for (int period = 0; period < 50; ++period) {
                    const VectorXcd next = rk4_evolve(b, w, ed, psi, 1, 4000);
                    phase += std::arg(phi.dot(next) / phi.dot(psi));
                    psi = next;
                }
                CHECK(std::abs(phi.dot(psi)) == doctest::Approx(1.0).epsilon(1e-6));
                const double oracle = fold_quasienergy(-phase * w / (kTwoPi * 50.0), w);
                CHECK(fold_distance(modes.quasienergies(k), oracle, w) < 1e-6);
            }
        }
    }
}

TEST_CASE("branch tracker")
{
    const auto b = toy_basis();
    const double w = 3.3;
    BranchTracker t(3);
    const auto m1 = floquet_modes(one_period_propagator(b, w, 0.0, 64), w);
    const auto s1 = t.advance(m1);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::abs(t.states()(k, k)) - 1.0) < 1e-12);

    // Same modes again: identity permutation.
    const auto s2 = t.advance(m1);
    CHECK(s2.mode_for_branch == s1.mode_for_branch);

    for (double ed = 0.05; ed < 1.0; ed += 0.05) {
        const auto step = t.advance(floquet_modes(one_period_propagator(b, w, ed, 64), w));
        std::vector<int> sorted = step.mode_for_branch;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::vector<int>{0, 1, 2});
        // Completeness over bare states.
        const double total = t.states().cwiseAbs2().sum();
        CHECK(total == doctest::Approx(3.0).epsilon(1e-8));
    }
}

TEST_CASE("batch branch tracking starts at the basis")
{
    std::vector<MatrixXcd> seq(4, MatrixXcd::Identity(3, 3));
    MatrixXcd swapped = MatrixXcd::Zero(3, 3);
    swapped(0, 1) = swapped(1, 0) = swapped(2, 2) = 1.0;
    seq[2] = swapped;
    seq[3] = swapped;
    const auto steps = track_branches(seq);
    REQUIRE(steps.size() == 4);
    CHECK(steps[1].mode_for_branch == std::vector<int>{0, 1, 2});
    CHECK(steps[2].mode_for_branch == std::vector<int>{1, 0, 2});
    CHECK(steps[3].mode_for_branch == std::vector<int>{1, 0, 2});
}

TEST_CASE("hybridization metric")
{
    VectorXcd a = VectorXcd::Zero(3), b = VectorXcd::Zero(3);
    a(0) = 1.0;
    b(1) = 1.0;
    CHECK(hybridization(a, a) == 0.0);
    CHECK(hybridization(a, b) == 1.0);
    VectorXcd s = VectorXcd::Zero(3);
    s(0) = s(1) = 1.0 / std::sqrt(2.0);
    CHECK(hybridization(a, s) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("branch population")
{
    Eigen::VectorXd w(4);
    w << 0, 1, 2, 3;
    VectorXcd m = VectorXcd::Zero(4);
    m(3) = 1.0;
    CHECK(branch_population(m, w) == 3.0);
    m.setZero();
    m(0) = m(2) = 1.0 / std::sqrt(2.0);
    CHECK(branch_population(m, w) == doctest::Approx(1.0).epsilon(1e-14));

    const auto spec = transmon::diagonalize(device());
    const auto basis = transmon_basis(spec, 8);
    for (int k = 0; k < 8; ++k) CHECK(branch_population(VectorXcd(MatrixXcd::Identity(8, 8).col(k)), basis) == k);
}

TEST_CASE("ideal displaced state: undriven branch")
{
    std::vector<double> xi;
    for (int k = 0; k < 12; ++k) xi.push_back(0.1 * k);
    MatrixXcd c = MatrixXcd::Zero(12, 4);
    c.col(1).setConstant(1.0);
    const auto fit = ideal_displaced_state(c, xi);
    CHECK_FALSE(fit.failed);
    for (std::size_t x = 0; x < xi.size(); ++x) {
        CHECK(fit.flags[x] == 0);
        CHECK(std::abs(fit.states(x, 1)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.states.row(x).norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("ideal displaced state: narrow avoided crossing")
{
    // Branch a smoothly deformed by the drive, passing a narrow crossing with
    // state b at xi0. Analytic two-level mixing: sin^2 = (1 - |d|/sqrt(d^2+g^2))/2.
    const double xi0 = 1.2, slope = 2.0, gap = 0.005;
    std::vector<double> xi;
    for (int k = 0; k < 41; ++k) xi.push_back(0.05 * k);
    MatrixXcd c(41, 3);
    std::vector<double> mixing(41);
    for (int k = 0; k < 41; ++k) {
        const double x = xi[k];
        VectorXcd smooth(3);
        smooth << std::cos(0.2 * x), cplx(0.0, std::sin(0.2 * x)), 0.0;
        const double d = slope * (x - xi0);
        const double s2 = 0.5 * (1.0 - std::abs(d) / std::sqrt(d * d + gap * gap));
        mixing[k] = s2;
        VectorXcd state = std::sqrt(1.0 - s2) * smooth;
        state(2) = std::sqrt(s2);
        c.row(k) = state.transpose();
    }
    const auto fit = ideal_displaced_state(c, xi);
    CHECK_FALSE(fit.failed);
    int flagged = 0;
    for (int k = 0; k < 41; ++k) {
        const double theta = hybridization(fit.states.row(k).transpose(), c.row(k).transpose());
        // The polynomial absorbs part of the crossing's amplitude tail.
        CHECK(std::abs(theta - mixing[k]) < (k == 24 ? 0.02 : 1e-3));
        flagged += fit.flags[k];
        if (mixing[k] > 0.01) CHECK(fit.flags[k] == 1);
    }
    CHECK(fit.flags[24] == 1);
    CHECK(mixing[24] == doctest::Approx(0.5));
    CHECK(flagged < 4);
}

TEST_CASE("ideal displaced state preconditions")
{
    std::vector<double> xi = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    CHECK_THROWS_AS(ideal_displaced_state(MatrixXcd::Identity(7, 3), xi), ConfigError);
    xi.push_back(0.7);
    xi[0] = 0.01;
    CHECK_THROWS_AS(ideal_displaced_state(MatrixXcd::Identity(8, 3), xi), ConfigError);
}

TEST_CASE("toy column: two-photon resonance shows up only near its frequency")
{
    // 2 w_d = E_2 - E_0 at weak drive; the Stark shift of the 0-2 splitting
    // tunes the crossing to finite drive when w_d starts slightly above it.
    const auto b = toy_basis();
    std::vector<double> xi, ed;
    for (int k = 0; k <= 40; ++k) {
        xi.push_back(0.025 * k);
        ed.push_back(xi.back());
    }
    double peak = 0.0;
    const double resonant = 0.5 * (b.energies(2) - b.energies(0));
    for (double w : {resonant - 0.02, resonant, resonant + 0.02}) {
        const auto col = run_column(b, w, xi, ed, {0}, 128);
        peak = std::max(peak, *std::max_element(col.traces[0].theta.begin(), col.traces[0].theta.end()));
    }
    CHECK(peak > 0.2);
    for (double w : {resonant - 0.8, resonant + 0.9}) {
        const auto col = run_column(b, w, xi, ed, {0}, 128);
        for (double t : col.traces[0].theta) CHECK(t < 0.05);
    }
}

TEST_CASE("column traces: theta range and zero drive")
{
    const auto spec = transmon::diagonalize(device());
    const auto basis = transmon_basis(spec, 16);
    const auto xi = linspace(0.0, 3.0, 31);
    std::vector<double> ed;
    for (double x : xi) ed.push_back(xi_to_drive_energy(x, 8.0, spec.omega01(), transmon::n_zpf(device())));
    const auto col = run_column(basis, 8.0, xi, ed, {0, 1, 2}, 128);
    REQUIRE(col.traces.size() == 3);
    for (int s = 0; s < 3; ++s) {
        const auto& tr = col.traces[s];
        CHECK(tr.theta[0] == 0.0);
        CHECK(tr.population[0] == doctest::Approx(s).epsilon(1e-12));
        CHECK(tr.max_bare_overlap[0] == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t x = 0; x < xi.size(); ++x) {
            CHECK(tr.theta[x] >= 0.0);
            CHECK(tr.theta[x] <= 1.0);
            CHECK(tr.quasienergy[x] > -4.0);
            CHECK(tr.quasienergy[x] <= 4.0);
        }
    }
}

TEST_CASE("step halving keeps branch labels away from flagged points")
{
    const auto p = device();
    const auto spec = transmon::diagonalize(p);
    const auto basis = transmon_basis(spec, 20);
    const double w = 9.0;
    const auto coarse = linspace(0.0, 2.0, 41);
    const auto fine = linspace(0.0, 2.0, 81);
    const auto energies = [&](const std::vector<double>& xi) {
        std::vector<double> e;
        for (double x : xi) e.push_back(xi_to_drive_energy(x, w, spec.omega01(), transmon::n_zpf(p)));
        return e;
    };
    const auto a = run_column(basis, w, coarse, energies(coarse), {0, 1}, 128);
    const auto b = run_column(basis, w, fine, energies(fine), {0, 1}, 128);
    int compared = 0;
    for (int s = 0; s < 2; ++s) {
        for (std::size_t x = 0; x < coarse.size(); ++x) {
            if (a.traces[s].resonant[x] || b.traces[s].resonant[2 * x]) continue;
            CHECK(std::abs(a.traces[s].quasienergy[x] - b.traces[s].quasienergy[2 * x]) < 1e-9);
            ++compared;
        }
    }
    CHECK(compared >= 50);
}

TEST_CASE("scar map invariants")
{
    auto p = device();
    ScanOptions opt;
    opt.levels = 14;
    opt.time_steps = 64;
    opt.workers = 1;
    const std::vector<double> omega = {5.5, 7.0, 33.0};
    const auto xi = linspace(0.0, 2.0, 11);
    const std::vector<double> gates = {0.1, 0.9, 0.25, 0.75};
    const auto scan = scar_map(p, omega, xi, gates, {0, 1}, opt);
    REQUIRE(scan.size() == scan.theta.size());
    CHECK(scan.failed_columns == 0);
    CHECK(scan.mode_population.empty());
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t g = 0; g < gates.size(); ++g)
            for (std::size_t w = 0; w < omega.size(); ++w) {
                CHECK(scan.theta[scan.index(s, g, w, 0)] == 0.0);
                for (std::size_t x = 0; x < xi.size(); ++x) {
                    const auto i = scan.index(s, g, w, x);
                    CHECK(scan.theta[i] >= 0.0);
                    CHECK(scan.theta[i] <= 1.0);
                    CHECK(scan.quasienergy[i] > -omega[w] / 2);
                    CHECK(scan.quasienergy[i] <= omega[w] / 2);
                }
            }

    // ng and 1 - ng give identical maps.
    double worst = 0.0;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t w = 0; w < omega.size(); ++w)
            for (std::size_t x = 0; x < xi.size(); ++x) {
                worst = std::max(worst, std::abs(scan.theta[scan.index(s, 0, w, x)] - scan.theta[scan.index(s, 1, w, x)]));
                worst = std::max(worst, std::abs(scan.theta[scan.index(s, 2, w, x)] - scan.theta[scan.index(s, 3, w, x)]));
            }
    CHECK(worst < 1e-8);

    // Gate-averaged statistics.
    const double mean = scan.theta_mean(0, 1, 5);
    double manual = 0.0;
    for (std::size_t g = 0; g < gates.size(); ++g) manual += scan.theta[scan.index(0, g, 1, 5)];
    CHECK(mean == doctest::Approx(manual / gates.size()));
    CHECK(scan.theta_max(0, 1, 5) >= mean);
    CHECK(scan.fraction_above(0, 2.0, 0.0, 100.0, 100.0) == 0.0);
}

TEST_CASE("scar map is deterministic across worker counts")
{
    ScanOptions opt;
    opt.levels = 12;
    opt.time_steps = 64;
    opt.workers = 1;
    const std::vector<double> omega = {6.0, 6.5, 8.0};
    const auto xi = linspace(0.0, 1.5, 9);
    const auto a = scar_map(device(), omega, xi, {0.0, 0.5}, {0, 1}, opt);
    opt.workers = 3;
    const auto b = scar_map(device(), omega, xi, {0.0, 0.5}, {0, 1}, opt);
    CHECK(a.theta == b.theta);
    CHECK(a.quasienergy == b.quasienergy);
    CHECK(a.population == b.population);
}

TEST_CASE("time-step doubling changes theta by less than 1e-4")
{
    ScanOptions opt;
    opt.levels = 20;
    opt.time_steps = 128;
    opt.workers = 1;
    const std::vector<double> omega = {6.3, 12.0, 34.67};
    const auto xi = linspace(0.0, 3.0, 16);
    const auto a = scar_map(device(), omega, xi, {0.25}, {0, 1}, opt);
    opt.time_steps = 256;
    const auto b = scar_map(device(), omega, xi, {0.25}, {0, 1}, opt);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.resonant[i] || b.resonant[i]) continue;
        CHECK(std::abs(a.theta[i] - b.theta[i]) < 1e-4);
    }
}

TEST_CASE("quantum-classical scan starts from bare states")
{
    ScanOptions opt;
    opt.levels = 20;
    opt.time_steps = 64;
    const auto xi = linspace(0.0, 1.0, 9);
    const auto qc = quantum_classical_scan(device(), 34.67, xi, {0, 1, 2}, opt);
    REQUIRE(qc.max_overlap.size() == 3);
    for (int s = 0; s < 3; ++s) {
        CHECK(qc.max_overlap[s][0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::isnan(qc.onset_xi[s]));
        for (double o : qc.max_overlap[s]) CHECK(o > 0.5);
    }
}

TEST_CASE("linspace")
{
    const auto v = linspace(1.0, 2.0, 5);
    REQUIRE(v.size() == 5);
    CHECK(v.front() == 1.0);
    CHECK(v.back() == 2.0);
    CHECK(v[2] == doctest::Approx(1.5));
}
