#include "cqed/coupled.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/parallel.hpp"

namespace cqed::coupled {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void JointSystemParams::validate() const
{
    transmon.validate();
    if (!std::isfinite(mode_freq) || !(mode_freq > 0.0)) throw ConfigError("joint.mode_freq: must be > 0");
    if (!std::isfinite(g) || g < 0.0) throw ConfigError("joint.g: must be >= 0");
    if (transmon_levels < 2) throw ConfigError("joint.transmon_levels: must be >= 2");
    if (mode_levels < 2) throw ConfigError("joint.mode_levels: must be >= 2");
    if (transmon_levels > transmon.dimension()) {
        throw ConfigError("joint.transmon_levels: " + std::to_string(transmon_levels)
                          + " exceeds the charge-basis dimension " + std::to_string(transmon.dimension()));
    }
    if (keep_dressed < 1 || keep_dressed > transmon_levels * mode_levels) {
        throw ConfigError("joint.keep_dressed: must lie in [1, transmon_levels * mode_levels]");
    }
}

std::string label_string(const Label& l)
{
    return std::to_string(l.first) + "," + std::to_string(l.second);
}

int DressedSystem::index_of(const Label& l) const
{
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (labels[k] == l) return static_cast<int>(k);
    return -1;
}

double DressedSystem::energy(const Label& l) const
{
    const int k = index_of(l);
    if (k < 0) throw RangeError("dressed system: label (" + label_string(l) + ") not among kept states");
    return energies(k);
}

namespace {

// Transmon block and the a + a^dag ladder, shared by the Hamiltonian and the dressed charge operator.
struct TransmonBlock {
    Eigen::VectorXd energies;
    Eigen::MatrixXd charge;
};

TransmonBlock transmon_block(const JointSystemParams& p)
{
    const auto s = transmon::diagonalize(p.transmon);
    const int t = p.transmon_levels;
    return {s.energies.head(t).array() - s.energies(0), s.charge_matrix.topLeftCorner(t, t)};
}

Eigen::MatrixXd assemble(const JointSystemParams& p, const TransmonBlock& tb)
{
    const int nt = p.transmon_levels, nr = p.mode_levels, dim = nt * nr;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int t = 0; t < nt; ++t) {
        for (int r = 0; r < nr; ++r) h(t * nr + r, t * nr + r) = tb.energies(t) + r * p.mode_freq;
    }
    if (p.g != 0.0) {
        for (int t = 0; t < nt; ++t) {
            for (int u = 0; u < nt; ++u) {
                const double c = p.g * tb.charge(t, u);
                for (int r = 0; r + 1 < nr; ++r) {
                    const double v = c * std::sqrt(r + 1.0);
                    h(t * nr + r, u * nr + r + 1) += v;
                    h(t * nr + r + 1, u * nr + r) += v;
                }
            }
        }
    }
    return h;
}

}  // namespace

Eigen::MatrixXd build_joint_hamiltonian(const JointSystemParams& p)
{
    p.validate();
    return assemble(p, transmon_block(p));
}

DressedSystem dress_and_truncate(const Eigen::MatrixXd& h, int transmon_levels, int mode_levels, int keep)
{
    const int dim = static_cast<int>(h.rows());
    if (dim != transmon_levels * mode_levels || h.cols() != dim) {
        throw ConfigError("dress_and_truncate: matrix size does not match transmon_levels * mode_levels");
    }
    if (keep < 1 || keep > dim) throw ConfigError("dress_and_truncate: keep outside [1, dimension]");
    if (linalg::hermiticity_error(h) > 1e-10) throw NumericError("dress_and_truncate: input is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericError("dress_and_truncate: eigensolver did not converge");

    DressedSystem d;
    d.transmon_levels = transmon_levels;
    d.mode_levels = mode_levels;
    d.energies = solver.eigenvalues().head(keep);
    d.dressed_states = solver.eigenvectors().leftCols(keep);
    for (int k = 0; k < keep; ++k) {
        Eigen::Index imax = 0;
        d.dressed_states.col(k).cwiseAbs().maxCoeff(&imax);
        if (d.dressed_states(imax, k) < 0.0) d.dressed_states.col(k) *= -1.0;
    }

    const Eigen::MatrixXd weight = d.dressed_states.cwiseAbs2();
    std::vector<int> order(keep);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> best(keep);
    for (int k = 0; k < keep; ++k) best[k] = weight.col(k).maxCoeff();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return best[a] > best[b]; });

    d.labels.assign(keep, {-1, -1});
    d.label_weight.assign(keep, 0.0);
    d.hybridized.assign(keep, 0);
    d.reassigned.assign(keep, 0);
    std::vector<std::uint8_t> used(dim, 0);
    for (int k : order) {
        int pick = -1;
        for (int i = 0; i < dim; ++i) {
            if (used[i]) continue;
            if (pick < 0 || weight(i, k) > weight(pick, k)) pick = i;
        }
        if (pick < 0) throw NumericError("dress_and_truncate: no unused product label left for dressed state "
                                         + std::to_string(k));
        used[pick] = 1;
        d.labels[k] = {pick / mode_levels, pick % mode_levels};
        d.label_weight[k] = weight(pick, k);
        d.reassigned[k] = weight(pick, k) < best[k];
        d.hybridized[k] = weight(pick, k) <= 0.5;
    }
    return d;
}

DressedSystem dress(const JointSystemParams& p)
{
    p.validate();
    const auto tb = transmon_block(p);
    auto d = dress_and_truncate(assemble(p, tb), p.transmon_levels, p.mode_levels, p.keep_dressed);
    const int nr = p.mode_levels, dim = p.transmon_levels * nr;
    Eigen::MatrixXd n_full = Eigen::MatrixXd::Zero(dim, dim);
    for (int t = 0; t < p.transmon_levels; ++t)
        for (int u = 0; u < p.transmon_levels; ++u)
            for (int r = 0; r < nr; ++r) n_full(t * nr + r, u * nr + r) = tb.charge(t, u);
    d.charge_op = d.dressed_states.transpose() * n_full * d.dressed_states;
    d.charge_op = 0.5 * (d.charge_op + d.charge_op.transpose()).eval();
    return d;
}

double cross_kerr(const DressedSystem& d, int n)
{
    if (n == 0) {
        d.energy({0, 0});
        d.energy({0, 1});
        return 0.0;
    }
    return (d.energy({n, 1}) - d.energy({n, 0})) - (d.energy({0, 1}) - d.energy({0, 0}));
}

JointTargets measure(const DressedSystem& d)
{
    JointTargets m;
    const double e00 = d.energy({0, 0}), e10 = d.energy({1, 0});
    m.omega01 = e10 - e00;
    m.alpha = d.energy({2, 0}) - 2.0 * e10 + e00;
    m.omega_r = d.energy({0, 1}) - e00;
    m.chi1 = cross_kerr(d, 1);
    return m;
}

namespace {

using Residual2 = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

// Central-difference Jacobian; throws FitError when it is (numerically) singular.
Eigen::Matrix2d checked_jacobian(const Residual2& f, const Eigen::Vector2d& x, const Eigen::Vector2d& step,
                                 const Eigen::Vector2d& r, const char* what)
{
    Eigen::Matrix2d jac;
    for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d xp = x, xm = x;
        xp(c) += step(c);
        xm(c) -= step(c);
        jac.col(c) = (f(xp) - f(xm)) / (2.0 * step(c));
    }
    // Scale-free degeneracy test: smallest singular value vs largest.
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(jac);
    const auto sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(1) < 1e-9 * sv(0)) {
        throw FitError(std::string(what) + ": degenerate Jacobian (targets do not constrain the parameters)",
                       {r(0), r(1)});
    }
    return jac;
}

// Damped Newton on two unknowns with central differences. Returns the root;
// throws FitError on a degenerate Jacobian or stall.
Eigen::Vector2d newton2(const Residual2& f, Eigen::Vector2d x, const Eigen::Vector2d& step, double tol,
                        const char* what)
{
    Eigen::Vector2d r = f(x);
    for (int iter = 0; iter < 100; ++iter) {
        if (r.cwiseAbs().maxCoeff() < tol) return x;
        const Eigen::Matrix2d jac = checked_jacobian(f, x, step, r, what);
        const Eigen::Vector2d dx = -jac.partialPivLu().solve(r);
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const Eigen::Vector2d xn = x + lambda * dx;
            Eigen::Vector2d rn;
            try {
                rn = f(xn);
            } catch (const ConfigError&) {
                continue;  // stepped outside the physical domain
            } catch (const RangeError&) {
                continue;  // label lost; shorten the step
            }
            if (rn.norm() < r.norm()) {
                x = xn;
                r = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (r.cwiseAbs().maxCoeff() < 10.0 * tol) return x;
    throw FitError(std::string(what) + ": no convergence", {r(0), r(1)});
}

}  // namespace

JointSystemParams fit_joint(const JointTargets& targets, const JointSystemParams& base)
{
    if (!(targets.omega01 > 0.0) || !(targets.alpha < 0.0) || !(targets.omega_r > 0.0)) {
        throw DomainError("fit_joint: requires omega01 > 0, alpha < 0, omega_r > 0");
    }
    constexpr double kTol = 1e-4;  // GHz

    JointSystemParams p = base;
    const auto seed = transmon::fit_ej_ec(targets.omega01, targets.alpha, base.transmon.ng, base.transmon.charge_cutoff);
    p.transmon.ej = seed.ej;
    p.transmon.ec = seed.ec;
    if (p.mode_freq <= 0.0) p.mode_freq = targets.omega_r;
    if (p.g <= 0.0) {
        p.g = targets.chi1 * targets.alpha > 0.0
                  ? g_from_chi(targets.omega_r, targets.omega01, targets.chi1, targets.alpha)
                  : 0.0;
    }

    auto measured = [&](const JointSystemParams& q) { return measure(dress(q)); };
    auto all_residuals = [&](const JointTargets& m) {
        return std::vector<double>{m.omega01 - targets.omega01, m.alpha - targets.alpha, m.omega_r - targets.omega_r,
                                   m.chi1 - targets.chi1};
    };

    // chi1 is weighted up so both residuals of the mode pair are comparable.
    const double chi_weight = 100.0;
    auto mode_residual = [&](const Eigen::Vector2d& x) {
        JointSystemParams q = p;
        q.mode_freq = x(0);
        q.g = std::abs(x(1));  // chi depends on g^2
        const auto mm = measured(q);
        return Eigen::Vector2d(mm.omega_r - targets.omega_r, chi_weight * (mm.chi1 - targets.chi1));
    };
    for (int outer = 0; outer < 30; ++outer) {
        const auto m = measured(p);
        const auto res = all_residuals(m);
        double worst = 0.0;
        for (double v : res) worst = std::max(worst, std::abs(v));
        if (worst < kTol) {
            // A converged point can still leave (w_a, g) unconstrained, e.g. chi1 = 0 at g = 0.
            checked_jacobian(mode_residual, {p.mode_freq, p.g}, {1e-4, 1e-4}, {res[2], res[3]},
                             "fit_joint (w_a, g)");
            return p;
        }

        const Eigen::Vector2d tx = newton2(
            [&](const Eigen::Vector2d& x) {
                JointSystemParams q = p;
                q.transmon.ej = x(0);
                q.transmon.ec = x(1);
                const auto mm = measured(q);
                return Eigen::Vector2d(mm.omega01 - targets.omega01, mm.alpha - targets.alpha);
            },
            {p.transmon.ej, p.transmon.ec}, {1e-4, 1e-4}, 0.1 * kTol, "fit_joint (E_J, E_C)");
        p.transmon.ej = tx(0);
        p.transmon.ec = tx(1);

        const Eigen::Vector2d mx =
            newton2(mode_residual, {p.mode_freq, p.g}, {1e-4, 1e-4}, 0.1 * kTol, "fit_joint (w_a, g)");
        p.mode_freq = mx(0);
        p.g = mx(1);
        if (p.g < 0.0) p.g = -p.g;  // chi depends on g^2
    }
    throw FitError("fit_joint: alternating solves did not converge", all_residuals(measured(p)));
}

double g_from_chi(double omega_r, double omega_1, double chi1, double alpha)
{
    if (!(chi1 / alpha >= 0.0) || alpha == 0.0) {
        throw DomainError("g_from_chi: chi1 and alpha must share a sign");
    }
    if (omega_r == 0.0) throw DomainError("g_from_chi: omega_r must be nonzero");
    return (omega_r - omega_1) * (omega_r + omega_1) / omega_r * std::sqrt(chi1 / (8.0 * alpha));
}

TransitionFrequencies transition_frequencies(const DressedSystem& d)
{
    TransitionFrequencies f;
    const double e0 = d.energy({0, 0}), e1 = d.energy({1, 0}), e2 = d.energy({2, 0}), e3 = d.energy({3, 0});
    f.omega_mode = d.energy({0, 1}) - e0;
    f.omega01 = e1 - e0;
    f.omega12 = e2 - e1;
    f.omega02 = e2 - e0;
    f.omega13 = e3 - e1;
    return f;
}

std::vector<ResonanceCondition> resonance_conditions(const TransitionFrequencies& f, double stark)
{
    return {
        {"exchange", 2, 0.5 * (f.omega_mode - f.omega01 - stark)},
        {"pair-01", 2, 0.5 * (f.omega_mode + f.omega01 + stark)},
        {"pair-12", 2, 0.5 * (f.omega_mode + f.omega12 + stark)},
        {"mode-02", 1, f.omega_mode - f.omega02 - stark},
        {"mode-13", 1, f.omega_mode - f.omega13 - stark},
    };
}

std::vector<ResonanceCondition> resonance_conditions(const DressedSystem& d, double stark)
{
    return resonance_conditions(transition_frequencies(d), stark);
}

floquet::FloquetBasis joint_basis(const DressedSystem& d)
{
    if (d.charge_op.rows() != d.size()) throw ConfigError("joint_basis: dressed system has no charge operator");
    floquet::FloquetBasis b;
    b.energies = d.energies;
    b.drive_op = d.charge_op;
    b.bare_states = d.dressed_states;
    const int dim = d.transmon_levels * d.mode_levels;
    b.bare_excitation.resize(dim);
    b.mode_excitation.resize(dim);
    for (int i = 0; i < dim; ++i) {
        b.bare_excitation(i) = i / d.mode_levels;
        b.mode_excitation(i) = i % d.mode_levels;
    }
    return b;
}

floquet::FloquetScan coupled_scar_map(const JointSystemParams& p, const std::vector<double>& omega_d,
                                      const std::vector<double>& xi, const std::vector<double>& gate_charges,
                                      const std::vector<Label>& initial_states, const CoupledScanOptions& opts)
{
    p.validate();
    if (omega_d.empty()) throw ConfigError("coupled_scar_map: omega_d grid is empty");
    if (gate_charges.empty()) throw ConfigError("coupled_scar_map: gate charge list is empty");
    if (initial_states.empty()) throw ConfigError("coupled_scar_map: no initial states");
    if (xi.size() < 8) throw ConfigError("coupled_scar_map: xi grid needs at least 8 points");
    floquet::DriveSpec spec{omega_d.front(), xi, opts.scan.time_steps};
    spec.validate();

    const auto nominal = dress(p);
    const double omega_q = nominal.energy({1, 0}) - nominal.energy({0, 0});
    const double omega_mode = nominal.energy({0, 1}) - nominal.energy({0, 0});
    const double nzpf = transmon::n_zpf(p.transmon);
    for (double w : omega_d) {
        spec.omega_d = w;
        spec.validate();
        if (std::abs(w - omega_mode) < 5.0 * opts.mode_linewidth) {
            std::ostringstream msg;
            msg << "coupled_scar_map: omega_d " << w << " GHz lies within 5 linewidths of the mode at " << omega_mode
                << " GHz; the resonantly driven mode cannot be tracked in the (t, r) basis";
            throw ConfigError(msg.str());
        }
        if (w == omega_q) throw DomainError("coupled_scar_map: omega_d coincides with the qubit frequency");
    }

    std::vector<floquet::FloquetBasis> bases;
    std::vector<std::vector<int>> starts;
    for (double ng : gate_charges) {
        JointSystemParams q = p;
        q.transmon.ng = ng;
        const auto d = dress(q);
        bases.push_back(joint_basis(d));
        std::vector<int> idx;
        for (const auto& l : initial_states) {
            const int k = d.index_of(l);
            if (k < 0) throw RangeError("coupled_scar_map: initial state (" + label_string(l) + ") not kept");
            idx.push_back(k);
        }
        starts.push_back(std::move(idx));
    }

    floquet::FloquetScan scan;
    scan.gate_charges = gate_charges;
    scan.omega_d = omega_d;
    scan.xi = xi;
    for (const auto& l : initial_states) scan.state_labels.push_back(label_string(l));
    const std::size_t total = scan.size();
    scan.theta.assign(total, kNaN);
    scan.quasienergy.assign(total, kNaN);
    scan.population.assign(total, kNaN);
    scan.mode_population.assign(total, kNaN);
    scan.resonant.assign(total, 1);

    std::atomic<int> failed{0};
    const std::size_t nw = omega_d.size();
    parallel_for(gate_charges.size() * nw, opts.scan.workers, [&](std::size_t task) {
        const std::size_t g = task / nw, w = task % nw;
        std::vector<double> ed(xi.size());
        for (std::size_t x = 0; x < xi.size(); ++x) {
            ed[x] = floquet::xi_to_drive_energy(xi[x], omega_d[w], omega_q, nzpf);
        }
        floquet::ColumnResult col;
        try {
            col = floquet::run_column(bases[g], omega_d[w], xi, ed, starts[g], opts.scan.time_steps, opts.scan.fit);
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
                scan.mode_population[i] = tr.mode_population[x];
                scan.resonant[i] = tr.resonant[x];
            }
        }
    });
    scan.failed_columns = failed.load();
    return scan;
}

}  // namespace cqed::coupled
