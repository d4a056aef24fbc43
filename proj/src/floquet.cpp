#include "cqed/floquet.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqed/errors.hpp"
#include "cqed/parallel.hpp"

namespace cqed::floquet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void DriveSpec::validate() const
{
    if (!(omega_d > 0.0) || !std::isfinite(omega_d)) {
        throw ConfigError("drive.omega_d: must be a positive finite frequency");
    }
    if (xi_grid.empty() || xi_grid.front() != 0.0) {
        throw ConfigError("drive.xi: grid must start at 0 (branches are initialized to bare states there)");
    }
    for (std::size_t i = 1; i < xi_grid.size(); ++i) {
        if (!(xi_grid[i] > xi_grid[i - 1])) throw ConfigError("drive.xi: grid must be strictly increasing");
    }
    if (time_steps < kMinTimeSteps || time_steps % 4 != 0) {
        throw ConfigError("drive.time_steps: must be a multiple of 4 and >= " + std::to_string(kMinTimeSteps));
    }
}

FloquetBasis transmon_basis(const transmon::TransmonSpectrum& spectrum, int levels)
{
    const int m = (levels <= 0 || levels > spectrum.size()) ? spectrum.size() : levels;
    FloquetBasis b;
    b.energies = spectrum.energies.head(m);
    b.drive_op = spectrum.charge_matrix.topLeftCorner(m, m);
    b.bare_states = Eigen::MatrixXd::Identity(m, m);
    b.bare_excitation = Eigen::VectorXd::LinSpaced(m, 0.0, m - 1.0);
    return b;
}

double xi_to_drive_energy(double xi, double omega_d, double omega_q, double nzpf)
{
    if (omega_d == omega_q) throw DomainError("xi_to_drive_energy: drive on qubit resonance (omega_d = omega_q)");
    if (!(nzpf > 0.0) || !(omega_d > 0.0)) throw DomainError("xi_to_drive_energy: omega_d and nzpf must be > 0");
    return xi * (omega_d * omega_d - omega_q * omega_q) / (2.0 * nzpf * omega_d);
}

double drive_energy_to_xi(double ed, double omega_d, double omega_q, double nzpf)
{
    if (omega_d == omega_q) throw DomainError("drive_energy_to_xi: drive on qubit resonance (omega_d = omega_q)");
    if (!(nzpf > 0.0) || !(omega_d > 0.0)) throw DomainError("drive_energy_to_xi: omega_d and nzpf must be > 0");
    return ed * 2.0 * nzpf * omega_d / (omega_d * omega_d - omega_q * omega_q);
}

double stark_shift_from_xi(double xi, double alpha)
{
    return xi * xi * alpha / 2.0;
}

PeriodPropagator period_propagator(const FloquetBasis& basis, double omega_d, double ed, int time_steps)
{
    if (time_steps < kMinTimeSteps || time_steps % 4 != 0) {
        throw ConfigError("time_steps: must be a multiple of 4 and >= " + std::to_string(kMinTimeSteps));
    }
    if (!(omega_d > 0.0)) throw ConfigError("omega_d: must be > 0");
    const int m = basis.size();
    const double period = 1.0 / omega_d;
    const double h = period / time_steps;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const double comm_scale = kTwoPi * std::sqrt(3.0) / 12.0 * h;

    const Eigen::MatrixXcd n = basis.drive_op.cast<cplx>();
    // [H0, N]_ij = (E_i - E_j) N_ij
    Eigen::MatrixXcd comm(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) comm(i, j) = (basis.energies(i) - basis.energies(j)) * basis.drive_op(i, j);
    const Eigen::MatrixXcd h0 = basis.energies.cast<cplx>().asDiagonal();

    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(m, m);
    Eigen::MatrixXcd quarter;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    Eigen::MatrixXcd heff(m, m);
    for (int k = 0; k < time_steps / 2; ++k) {
        const double t = k * h;
        const double f1 = ed * std::cos(kTwoPi * omega_d * (t + c1 * h));
        const double f2 = ed * std::cos(kTwoPi * omega_d * (t + c2 * h));
        heff = h0 + (0.5 * (f1 + f2)) * n - cplx(0.0, comm_scale * (f1 - f2)) * comm;
        solver.compute(heff);
        if (solver.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "propagator step eigensolver failed (step " << k << ", E_d " << ed << ")";
            throw NumericError(msg.str());
        }
        const Eigen::VectorXcd phase =
            (solver.eigenvalues() * (-kTwoPi * h)).unaryExpr([](double a) { return std::polar(1.0, a); });
        const Eigen::MatrixXcd& w = solver.eigenvectors();
        v = (w * phase.asDiagonal() * w.adjoint() * v).eval();
        if (k + 1 == time_steps / 4) quarter = v;
    }
    // Second half is the transpose of the first (drive even about T/2).
    // Shifting the origin to T/4 maps ng -> 1 - ng onto complex conjugation.
    PeriodPropagator out;
    out.period = quarter * (v.transpose() * v) * quarter.adjoint();
    out.quarter = std::move(quarter);

    const double err = linalg::unitarity_error(out.period);
    if (err > 1e-6) {
        std::ostringstream msg;
        msg << "propagator lost unitarity (" << err << ") at E_d " << ed << ", omega_d " << omega_d
            << "; increase time_steps (now " << time_steps << ")";
        throw NumericError(msg.str());
    }
    return out;
}

Eigen::MatrixXcd one_period_propagator(const FloquetBasis& basis, double omega_d, double ed, int time_steps)
{
    return period_propagator(basis, omega_d, ed, time_steps).period;
}

Eigen::MatrixXcd one_period_propagator(const transmon::TransmonParams& p, double omega_d, double ed, int time_steps)
{
    return one_period_propagator(transmon_basis(transmon::diagonalize(p), 0), omega_d, ed, time_steps);
}

double fold_quasienergy(double e, double omega_d)
{
    double r = e - omega_d * std::ceil(e / omega_d - 0.5);
    if (r <= -0.5 * omega_d) r += omega_d;
    if (r > 0.5 * omega_d) r -= omega_d;
    return r;
}

FloquetModes floquet_modes(const Eigen::MatrixXcd& u, double omega_d)
{
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
    if (schur.info() != Eigen::Success) throw NumericError("floquet_modes: Schur decomposition did not converge");
    const Eigen::MatrixXcd& t = schur.matrixT();
    const int m = static_cast<int>(u.rows());
    double off = 0.0;
    for (int j = 1; j < m; ++j)
        for (int i = 0; i < j; ++i) off = std::max(off, std::abs(t(i, j)));
    if (off > 1e-6) {
        throw NumericError("floquet_modes: Schur form not diagonal (off-diagonal " + std::to_string(off)
                           + "); input is not unitary");
    }
    FloquetModes fm;
    fm.eigenvalues = t.diagonal();
    fm.modes = schur.matrixU();
    fm.quasienergies.resize(m);
    for (int k = 0; k < m; ++k) {
        fm.quasienergies(k) = fold_quasienergy(-std::arg(fm.eigenvalues(k)) * omega_d / kTwoPi, omega_d);
    }
    return fm;
}

BranchTracker::BranchTracker(int dim)
    : states_(Eigen::MatrixXcd::Identity(dim, dim)), quasienergies_(Eigen::VectorXd::Zero(dim))
{
}

BranchStep BranchTracker::advance(const FloquetModes& modes)
{
    const Eigen::MatrixXcd ov = states_.adjoint() * modes.modes;
    const Eigen::MatrixXd score = ov.cwiseAbs2();
    BranchStep step;
    step.mode_for_branch = linalg::max_weight_assignment(score);

    const int m = static_cast<int>(states_.cols());
    Eigen::MatrixXcd next(states_.rows(), m);
    for (int b = 0; b < m; ++b) {
        const int j = step.mode_for_branch[b];
        for (int k = 0; k < m; ++k) {
            if (k != j && std::abs(score(b, k) - score(b, j)) < 1e-6) step.ambiguous = true;
        }
        const cplx o = ov(b, j);
        const double mag = std::abs(o);
        next.col(b) = mag > 1e-14 ? Eigen::VectorXcd(modes.modes.col(j) * (std::conj(o) / mag))
                                  : Eigen::VectorXcd(modes.modes.col(j));
        quasienergies_(b) = modes.quasienergies(j);
    }
    states_ = std::move(next);
    return step;
}

std::vector<BranchStep> track_branches(const std::vector<Eigen::MatrixXcd>& modes_by_xi)
{
    std::vector<BranchStep> out;
    if (modes_by_xi.empty()) return out;
    const int m = static_cast<int>(modes_by_xi.front().cols());
    BranchStep first;
    for (int b = 0; b < m; ++b) first.mode_for_branch.push_back(b);
    out.push_back(first);

    Eigen::MatrixXcd prev = modes_by_xi.front();
    for (std::size_t x = 1; x < modes_by_xi.size(); ++x) {
        const Eigen::MatrixXcd& cur = modes_by_xi[x];
        const Eigen::MatrixXd score = (prev.adjoint() * cur).cwiseAbs2();
        BranchStep step;
        step.mode_for_branch = linalg::max_weight_assignment(score);
        Eigen::MatrixXcd next(cur.rows(), m);
        for (int b = 0; b < m; ++b) {
            const int j = step.mode_for_branch[b];
            for (int k = 0; k < m; ++k) {
                if (k != j && std::abs(score(b, k) - score(b, j)) < 1e-6) step.ambiguous = true;
            }
            next.col(b) = cur.col(j);
        }
        prev = std::move(next);
        out.push_back(std::move(step));
    }
    return out;
}

namespace {

struct PolyFit {
    Eigen::MatrixXd re, im;  // (degree x components)
};

}  // namespace

IdealStateFit ideal_displaced_state(const Eigen::MatrixXcd& coefficients, const std::vector<double>& xi,
                                    const IdealFitOptions& opts)
{
    const int n = static_cast<int>(coefficients.rows());
    const int m = static_cast<int>(coefficients.cols());
    if (n < 8) throw ConfigError("ideal_displaced_state: needs at least 8 xi points");
    if (static_cast<int>(xi.size()) != n) throw ConfigError("ideal_displaced_state: xi grid size mismatch");
    if (xi.front() != 0.0) throw ConfigError("ideal_displaced_state: xi grid must start at 0");
    if (opts.degree < 1) throw ConfigError("ideal_displaced_state: degree must be >= 1");

    // c(xi) = c(0) + sum_{k=1..d} a_k (xi/xi_max)^k, so the fit is pinned at xi = 0.
    const int d = opts.degree;
    const double scale = xi.back();
    Eigen::MatrixXd x(n, d);
    for (int r = 0; r < n; ++r) {
        double p = 1.0;
        for (int k = 0; k < d; ++k) {
            p *= xi[r] / scale;
            x(r, k) = p;
        }
    }
    const Eigen::RowVectorXcd c0 = coefficients.row(0);
    const Eigen::MatrixXcd y = coefficients.rowwise() - c0;

    auto solve = [&](const std::vector<std::uint8_t>& good, PolyFit& out) {
        std::vector<int> rows;
        for (int r = 1; r < n; ++r)
            if (good[r]) rows.push_back(r);
        if (static_cast<int>(rows.size()) < d) return false;
        Eigen::MatrixXd xg(rows.size(), d), yr(rows.size(), m), yi(rows.size(), m);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            xg.row(i) = x.row(rows[i]);
            yr.row(i) = y.row(rows[i]).real();
            yi.row(i) = y.row(rows[i]).imag();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xg);
        if (qr.rank() < d) return false;
        out.re = qr.solve(yr);
        out.im = qr.solve(yi);
        return true;
    };

    auto evaluate = [&](const PolyFit& f, Eigen::MatrixXcd& states, std::vector<double>& residual) {
        Eigen::MatrixXcd delta(n, m);
        delta.real() = x * f.re;
        delta.imag() = x * f.im;
        states = delta.rowwise() + c0;
        residual.assign(n, 0.0);
        for (int r = 0; r < n; ++r) {
            const double norm = states.row(r).norm();
            if (norm > 0.0) states.row(r) /= norm;
            residual[r] = r == 0 ? 0.0 : hybridization(states.row(r).transpose(), coefficients.row(r).transpose());
        }
    };

    auto threshold = [&](const std::vector<double>& residual, const std::vector<std::uint8_t>& good) {
        std::vector<double> kept;
        for (int r = 0; r < n; ++r)
            if (good[r]) kept.push_back(residual[r]);
        return std::max(opts.threshold_factor * linalg::median(kept), opts.residual_floor);
    };

    IdealStateFit out;
    std::vector<std::uint8_t> good(n, 1);
    PolyFit fit;
    if (!solve(good, fit)) throw NumericError("ideal_displaced_state: polynomial fit is rank deficient");
    evaluate(fit, out.states, out.residual);

    for (int it = 0; it < opts.rejection_iterations; ++it) {
        const double thr = threshold(out.residual, good);
        std::vector<std::uint8_t> next(n, 1);
        for (int r = 1; r < n; ++r) next[r] = out.residual[r] <= thr;
        if (next == good) break;
        PolyFit trial;
        if (!solve(next, trial)) break;  // too few survivors; keep the last good fit
        good = std::move(next);
        fit = std::move(trial);
        evaluate(fit, out.states, out.residual);
    }

    const double thr = threshold(out.residual, good);
    out.flags.assign(n, 0);
    int flagged = 0;
    for (int r = 1; r < n; ++r) {
        out.flags[r] = out.residual[r] > thr;
        flagged += out.flags[r];
    }
    out.failed = flagged > opts.max_flag_fraction * n;
    return out;
}

double hybridization(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b)
{
    const double o = std::norm(a.dot(b));
    return std::clamp(1.0 - o, 0.0, 1.0);
}

double branch_population(const Eigen::VectorXcd& bare_amplitudes, const Eigen::VectorXd& weights)
{
    return bare_amplitudes.cwiseAbs2().dot(weights);
}

double branch_population(const Eigen::VectorXcd& mode, const FloquetBasis& basis)
{
    return branch_population(Eigen::VectorXcd(basis.bare_states.cast<cplx>() * mode), basis.bare_excitation);
}

ColumnResult run_column(const FloquetBasis& basis, double omega_d, const std::vector<double>& xi,
                        const std::vector<double>& drive_energies, const std::vector<int>& initial_indices,
                        int time_steps, const IdealFitOptions& fit)
{
    const int n = static_cast<int>(xi.size());
    const int m = basis.size();
    if (static_cast<int>(drive_energies.size()) != n) throw ConfigError("run_column: drive energy grid size mismatch");
    if (n == 0 || xi.front() != 0.0 || drive_energies.front() != 0.0) {
        throw ConfigError("run_column: grid must start at zero drive");
    }
    for (int i : initial_indices) {
        if (i < 0 || i >= m) throw RangeError("run_column: initial state " + std::to_string(i) + " outside basis");
    }

    BranchTracker tracker(m);
    const std::size_t nb = initial_indices.size();
    const bool has_mode = basis.mode_excitation.size() > 0;
    std::vector<Eigen::MatrixXcd> coeffs(nb, Eigen::MatrixXcd(n, m));
    ColumnResult out;
    out.traces.resize(nb);
    for (auto& tr : out.traces) {
        tr.quasienergy.resize(n);
        tr.population.resize(n);
        tr.max_bare_overlap.resize(n);
        if (has_mode) tr.mode_population.resize(n);
    }

    const Eigen::MatrixXcd bare = basis.bare_states.cast<cplx>();
    for (int x = 0; x < n; ++x) {
        // Bare-state observables use the mode carried back to t = 0.
        Eigen::MatrixXcd to_origin = Eigen::MatrixXcd::Identity(m, m);
        if (x > 0) {
            const auto prop = period_propagator(basis, omega_d, drive_energies[x], time_steps);
            if (tracker.advance(floquet_modes(prop.period, omega_d)).ambiguous) ++out.ambiguous_steps;
            to_origin = prop.quarter.adjoint();
        }
        for (std::size_t b = 0; b < nb; ++b) {
            const int i = initial_indices[b];
            BranchTrace& tr = out.traces[b];
            coeffs[b].row(x) = tracker.states().col(i).transpose();
            tr.quasienergy[x] = x == 0 ? fold_quasienergy(basis.energies(i), omega_d) : tracker.quasienergies()(i);
            const Eigen::VectorXd p = (bare * (to_origin * tracker.states().col(i))).cwiseAbs2();
            tr.population[x] = p.dot(basis.bare_excitation);
            tr.max_bare_overlap[x] = p.maxCoeff();
            if (has_mode) tr.mode_population[x] = p.dot(basis.mode_excitation);
        }
    }

    for (std::size_t b = 0; b < nb; ++b) {
        BranchTrace& tr = out.traces[b];
        const auto ideal = ideal_displaced_state(coeffs[b], xi, fit);
        tr.fit_failed = ideal.failed;
        tr.resonant = ideal.flags;
        tr.theta.resize(n);
        for (int x = 0; x < n; ++x) {
            tr.theta[x] = x == 0 ? 0.0 : hybridization(ideal.states.row(x).transpose(), coeffs[b].row(x).transpose());
        }
    }
    return out;
}

double FloquetScan::theta_mean(std::size_t state, std::size_t omega, std::size_t x) const
{
    double sum = 0.0;
    int count = 0;
    for (std::size_t g = 0; g < gate_charges.size(); ++g) {
        const double t = theta[index(state, g, omega, x)];
        if (std::isnan(t)) continue;
        sum += t;
        ++count;
    }
    return count ? sum / count : kNaN;
}

double FloquetScan::theta_max(std::size_t state, std::size_t omega, std::size_t x) const
{
    double best = kNaN;
    for (std::size_t g = 0; g < gate_charges.size(); ++g) {
        const double t = theta[index(state, g, omega, x)];
        if (std::isnan(t)) continue;
        best = std::isnan(best) ? t : std::max(best, t);
    }
    return best;
}

double FloquetScan::fraction_above(std::size_t state, double threshold, double omega_lo, double omega_hi,
                                   double xi2_max) const
{
    int total = 0, above = 0;
    for (std::size_t w = 0; w < omega_d.size(); ++w) {
        if (omega_d[w] < omega_lo || omega_d[w] > omega_hi) continue;
        for (std::size_t x = 0; x < xi.size(); ++x) {
            if (xi[x] * xi[x] > xi2_max) continue;
            const double t = theta_mean(state, w, x);
            if (std::isnan(t)) continue;
            ++total;
            above += t > threshold;
        }
    }
    return total ? static_cast<double>(above) / total : kNaN;
}

namespace {

void check_grid(const std::vector<double>& omega_d, const std::vector<double>& xi, const ScanOptions& opts)
{
    if (omega_d.empty()) throw ConfigError("scan: omega_d grid is empty");
    DriveSpec spec{omega_d.front(), xi, opts.time_steps};
    for (double w : omega_d) {
        spec.omega_d = w;
        spec.validate();
    }
    if (xi.size() < 8) throw ConfigError("scan: xi grid needs at least 8 points for the ideal-state fit");
}

}  // namespace

FloquetScan scar_map(const transmon::TransmonParams& p, const std::vector<double>& omega_d,
                     const std::vector<double>& xi, const std::vector<double>& gate_charges,
                     const std::vector<int>& initial_states, const ScanOptions& opts)
{
    p.validate();
    check_grid(omega_d, xi, opts);
    if (gate_charges.empty()) throw ConfigError("scar_map: gate charge list is empty");
    if (initial_states.empty()) throw ConfigError("scar_map: no initial states");

    const auto nominal = transmon::diagonalize(p);
    const double omega_q = nominal.omega01();
    const double nzpf = transmon::n_zpf(p);
    for (double w : omega_d) {
        if (w == omega_q) throw DomainError("scar_map: omega_d coincides with the qubit frequency");
    }

    std::vector<FloquetBasis> bases;
    for (double ng : gate_charges) {
        auto q = p;
        q.ng = ng;
        bases.push_back(transmon_basis(transmon::diagonalize(q), opts.levels));
    }
    for (int s : initial_states) {
        if (s < 0 || s >= bases.front().size()) throw RangeError("scar_map: initial state outside propagated levels");
    }

    FloquetScan scan;
    scan.gate_charges = gate_charges;
    scan.omega_d = omega_d;
    scan.xi = xi;
    for (int s : initial_states) scan.state_labels.push_back(std::to_string(s));
    const std::size_t total = scan.size();
    scan.theta.assign(total, kNaN);
    scan.quasienergy.assign(total, kNaN);
    scan.population.assign(total, kNaN);
    scan.resonant.assign(total, 1);

    std::atomic<int> failed{0};
    const std::size_t nw = omega_d.size();
    parallel_for(gate_charges.size() * nw, opts.workers, [&](std::size_t task) {
        const std::size_t g = task / nw, w = task % nw;
        std::vector<double> ed(xi.size());
        for (std::size_t x = 0; x < xi.size(); ++x) ed[x] = xi_to_drive_energy(xi[x], omega_d[w], omega_q, nzpf);
        ColumnResult col;
        try {
            col = run_column(bases[g], omega_d[w], xi, ed, initial_states, opts.time_steps, opts.fit);
        } catch (const NumericError&) {
            ++failed;
            return;
        }
        for (std::size_t s = 0; s < initial_states.size(); ++s) {
            const auto& tr = col.traces[s];
            for (std::size_t x = 0; x < xi.size(); ++x) {
                const std::size_t i = scan.index(s, g, w, x);
                scan.theta[i] = tr.theta[x];
                scan.quasienergy[i] = tr.quasienergy[x];
                scan.population[i] = tr.population[x];
                scan.resonant[i] = tr.resonant[x];
            }
        }
    });
    scan.failed_columns = failed.load();
    return scan;
}

QuantumClassicalScan quantum_classical_scan(const transmon::TransmonParams& p, double omega_d,
                                            const std::vector<double>& xi, const std::vector<int>& states,
                                            const ScanOptions& opts)
{
    p.validate();
    check_grid({omega_d}, xi, opts);
    const auto spectrum = transmon::diagonalize(p);
    const auto basis = transmon_basis(spectrum, opts.levels);
    std::vector<double> ed(xi.size());
    for (std::size_t x = 0; x < xi.size(); ++x) {
        ed[x] = xi_to_drive_energy(xi[x], omega_d, spectrum.omega01(), transmon::n_zpf(p));
    }
    const auto col = run_column(basis, omega_d, xi, ed, states, opts.time_steps, opts.fit);

    QuantumClassicalScan out;
    out.xi = xi;
    out.states = states;
    for (const auto& tr : col.traces) {
        out.max_overlap.push_back(tr.max_bare_overlap);
        out.quasienergy.push_back(tr.quasienergy);
        double onset = kNaN;
        for (std::size_t x = 0; x < xi.size(); ++x) {
            if (tr.max_bare_overlap[x] < 0.5) {
                onset = xi[x];
                break;
            }
        }
        out.onset_xi.push_back(onset);
    }
    return out;
}

std::vector<double> linspace(double start, double stop, int count)
{
    if (count < 1) throw ConfigError("linspace: count must be >= 1");
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    if (count > 1) v.back() = stop;
    return v;
}

}  // namespace cqed::floquet
