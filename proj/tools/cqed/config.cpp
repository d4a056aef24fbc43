#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "cqed/errors.hpp"

namespace cqed::cli {

const char* kind_name(Kind k)
{
    switch (k) {
    case Kind::Spectrum: return "spectrum";
    case Kind::ScarMap: return "scar-map";
    case Kind::CoupledMap: return "coupled-map";
    case Kind::ReadoutFidelity: return "readout-fidelity";
    case Kind::Efficiency: return "efficiency";
    case Kind::Calibrate: return "calibrate";
    case Kind::Thresholds: return "thresholds";
    case Kind::TableCheck: return "table-check";
    }
    return "?";
}

double parse_duration(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse duration '" + text + "'");
    }
    const std::string unit = s.substr(pos);
    static const std::map<std::string, double> scale = {{"", 1.0}, {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
    const auto it = scale.find(unit);
    if (it == scale.end()) throw ConfigError("unknown time unit '" + unit + "' in '" + text + "' (use s, ms, us, ns)");
    return v * it->second;
}

std::string config_hash(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char c;
    while (f.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Strict view of one TOML table: every key must be consumed before finish().
class Section {
public:
    Section(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

    bool present() const { return t_ != nullptr; }
    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return t_ && t_->contains(key); }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const toml::node* node(const std::string& key)
    {
        if (!t_) return nullptr;
        const toml::node* n = t_->get(key);
        if (n) used_.insert(key);
        return n;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError(key_path(key) + ": " + what);
    }

    std::optional<double> number(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        if (auto v = n->value<double>(); v && (n->is_integer() || n->is_floating_point())) return *v;
        fail(key, "expected a number");
    }

    double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

    double required_number(const std::string& key)
    {
        auto v = number(key);
        if (!v) fail(key, "required");
        return *v;
    }

    std::optional<std::int64_t> integer(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        if (!n->is_integer()) fail(key, "expected an integer");
        return n->value<std::int64_t>();
    }

    int integer(const std::string& key, int fallback)
    {
        auto v = integer(key);
        if (!v) return fallback;
        if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) fail(key, "out of range");
        return static_cast<int>(*v);
    }

    std::optional<std::string> string(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        if (!n->is_string()) fail(key, "expected a string");
        return n->value<std::string>();
    }

    std::optional<double> duration(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return std::nullopt;
        if (n->is_string()) {
            try {
                return parse_duration(*n->value<std::string>());
            } catch (const ConfigError& e) {
                fail(key, e.what());
            }
        }
        if (n->is_integer() || n->is_floating_point()) return *n->value<double>();
        fail(key, "expected a duration such as \"780ns\" or a number of seconds");
    }

    std::vector<double> numbers(const std::string& key, bool allow_scalar = false)
    {
        const toml::node* n = node(key);
        if (!n) return {};
        if (allow_scalar && (n->is_integer() || n->is_floating_point())) return {*n->value<double>()};
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : *a) {
            auto v = e.value<double>();
            if (!v || !(e.is_integer() || e.is_floating_point())) fail(key, "expected an array of numbers");
            out.push_back(*v);
        }
        return out;
    }

    std::vector<double> durations(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return {};
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array of durations");
        std::vector<double> out;
        for (const auto& e : *a) {
            if (e.is_string()) {
                try {
                    out.push_back(parse_duration(*e.value<std::string>()));
                } catch (const ConfigError& err) {
                    fail(key, err.what());
                }
            } else if (e.is_integer() || e.is_floating_point()) {
                out.push_back(*e.value<double>());
            } else {
                fail(key, "expected an array of durations");
            }
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return {};
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array of strings");
        std::vector<std::string> out;
        for (const auto& e : *a) {
            if (!e.is_string()) fail(key, "expected an array of strings");
            out.push_back(*e.value<std::string>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return {};
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array of integers");
        std::vector<int> out;
        for (const auto& e : *a) {
            if (!e.is_integer()) fail(key, "expected an array of integers");
            out.push_back(static_cast<int>(*e.value<std::int64_t>()));
        }
        return out;
    }

    /// Array of numbers, or {start, stop, count} / {start, stop, step}.
    std::vector<double> grid(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return {};
        if (n->is_array()) {
            used_.erase(key);
            return numbers(key);
        }
        const toml::table* t = n->as_table();
        if (!t) fail(key, "expected an array or a {start, stop, count|step} table");
        Section g(t, key_path(key));
        const double start = g.required_number("start");
        const double stop = g.required_number("stop");
        const auto count = g.integer("count");
        const auto step = g.number("step");
        g.finish();
        if (count.has_value() == step.has_value()) fail(key, "give exactly one of count or step");
        if (count) {
            if (*count < 1) fail(key + ".count", "must be >= 1");
            return floquet::linspace(start, stop, static_cast<int>(*count));
        }
        if (!(*step > 0.0) || stop < start) fail(key + ".step", "must be > 0 with stop >= start");
        const int m = static_cast<int>(std::floor((stop - start) / *step + 1e-9)) + 1;
        std::vector<double> out(m);
        for (int k = 0; k < m; ++k) out[k] = start + k * *step;
        return out;
    }

    Section table(const std::string& key)
    {
        const toml::node* n = node(key);
        if (!n) return Section(nullptr, key_path(key));
        if (!n->is_table()) fail(key, "expected a table");
        return Section(n->as_table(), key_path(key));
    }

    std::vector<std::string> keys() const
    {
        std::vector<std::string> out;
        if (t_)
            for (const auto& [k, v] : *t_) out.emplace_back(k.str());
        return out;
    }

    void finish() const
    {
        if (!t_) return;
        for (const auto& [k, v] : *t_) {
            const std::string key(k.str());
            if (!used_.count(key)) {
                throw ConfigError(key_path(key) + ": unknown key");
            }
        }
    }

private:
    const toml::table* t_;
    std::string path_;
    std::set<std::string> used_;
};

Kind parse_kind(const std::string& s)
{
    static const std::map<std::string, Kind> kinds = {
        {"spectrum", Kind::Spectrum},       {"scar-map", Kind::ScarMap},
        {"coupled-map", Kind::CoupledMap},  {"readout-fidelity", Kind::ReadoutFidelity},
        {"efficiency", Kind::Efficiency},   {"calibrate", Kind::Calibrate},
        {"thresholds", Kind::Thresholds},   {"table-check", Kind::TableCheck},
    };
    const auto it = kinds.find(s);
    if (it == kinds.end()) throw ConfigError("kind: unknown experiment kind '" + s + "'");
    return it->second;
}

transmon::TransmonParams parse_transmon(Section s)
{
    if (!s.present()) throw ConfigError("transmon: table required");
    transmon::TransmonParams p;
    p.ej = s.required_number("ej");
    p.ec = s.required_number("ec");
    p.ng = s.number("ng", p.ng);
    p.charge_cutoff = s.integer("charge_cutoff", p.charge_cutoff);
    s.finish();
    p.validate();
    return p;
}

void check_xi(const std::vector<double>& xi, const std::string& where)
{
    if (xi.empty()) throw ConfigError(where + ": required");
    if (xi.front() != 0.0) {
        throw ConfigError(where + ": Floquet branch tracking requires the xi grid to start at 0 (got "
                          + std::to_string(xi.front()) + ")");
    }
    for (std::size_t k = 1; k < xi.size(); ++k) {
        if (!(xi[k] > xi[k - 1])) throw ConfigError(where + ": must be strictly increasing");
    }
    if (xi.size() < 8) throw ConfigError(where + ": the ideal-state fit needs at least 8 points");
}

void parse_fit_options(Section& d, floquet::IdealFitOptions& fit)
{
    Section f = d.table("fit");
    if (!f.present()) return;
    fit.degree = f.integer("degree", fit.degree);
    fit.rejection_iterations = f.integer("rejection_iterations", fit.rejection_iterations);
    fit.threshold_factor = f.number("threshold_factor", fit.threshold_factor);
    fit.residual_floor = f.number("residual_floor", fit.residual_floor);
    fit.max_flag_fraction = f.number("max_flag_fraction", fit.max_flag_fraction);
    f.finish();
    if (fit.degree < 1) throw ConfigError(f.key_path("degree") + ": must be >= 1");
    if (fit.rejection_iterations < 0) throw ConfigError(f.key_path("rejection_iterations") + ": must be >= 0");
    if (!(fit.threshold_factor > 0.0)) throw ConfigError(f.key_path("threshold_factor") + ": must be > 0");
    if (!(fit.residual_floor >= 0.0)) throw ConfigError(f.key_path("residual_floor") + ": must be >= 0");
    if (!(fit.max_flag_fraction > 0.0 && fit.max_flag_fraction <= 1.0)) {
        throw ConfigError(f.key_path("max_flag_fraction") + ": must lie in (0, 1]");
    }
}

// Shared [drive] grid block for scar-map and coupled-map.
struct DriveGrid {
    std::vector<double> omega_d, xi, gate_charges;
    floquet::ScanOptions options;
};

DriveGrid parse_drive(Section& d)
{
    if (!d.present()) throw ConfigError("drive: table required");
    DriveGrid g;
    g.omega_d = d.grid("omega_d");
    g.xi = d.grid("xi");
    g.gate_charges = d.grid("gate_charges");
    if (g.gate_charges.empty()) g.gate_charges = {0.25};
    g.options.time_steps = d.integer("time_steps", g.options.time_steps);
    g.options.levels = d.integer("levels", g.options.levels);
    parse_fit_options(d, g.options.fit);

    if (g.omega_d.empty()) throw ConfigError("drive.omega_d: required");
    for (double w : g.omega_d)
        if (!(w > 0.0)) throw ConfigError("drive.omega_d: frequencies must be > 0");
    check_xi(g.xi, "drive.xi");
    if (g.options.time_steps < floquet::kMinTimeSteps || g.options.time_steps % 4 != 0) {
        throw ConfigError("drive.time_steps: must be a multiple of 4 and >= " + std::to_string(floquet::kMinTimeSteps));
    }
    if (g.options.levels < 2) throw ConfigError("drive.levels: must be >= 2");
    return g;
}

readout::ReadoutModel parse_readout_model(Section& r, std::vector<double>* nbar_list)
{
    if (!r.present()) throw ConfigError("readout: table required");
    readout::ReadoutModel m;
    m.omega_r = r.number("omega_r", m.omega_r);
    m.kappa = r.number("kappa", m.kappa);
    if (r.has("chi")) m.chi = r.numbers("chi");
    m.probe_detuning = r.number("probe_detuning", m.probe_detuning);
    if (nbar_list) {
        *nbar_list = r.numbers("nbar_r", true);
        if (nbar_list->empty()) throw ConfigError("readout.nbar_r: required");
        m.nbar_r = nbar_list->front();
    } else {
        m.nbar_r = r.required_number("nbar_r");
    }
    m.tau_r = r.duration("tau_r").value_or(m.tau_r);
    m.eta = r.number("eta", m.eta);
    m.t1 = r.duration("t1").value_or(m.t1);
    m.thermal_pop = r.number("thermal_pop", m.thermal_pop);
    m.validate();
    if (nbar_list) {
        for (double n : *nbar_list)
            if (!(n >= 0.0)) throw ConfigError("readout.nbar_r: photon numbers must be >= 0");
    }
    return m;
}

coupled::Label parse_label(const std::string& text, const std::string& where)
{
    int t = -1, r = -1, used = 0;
    if (std::sscanf(text.c_str(), " %d , %d %n", &t, &r, &used) != 2 || used != static_cast<int>(text.size())
        || t < 0 || r < 0) {
        throw ConfigError(where + ": expected labels like \"2,0\" (got '" + text + "')");
    }
    return {t, r};
}

std::size_t shot_count(Section& s, const std::string& key, std::size_t fallback)
{
    const auto v = s.integer(key);
    if (!v) return fallback;
    if (*v < 1) throw ConfigError(s.key_path(key) + ": must be >= 1");
    return static_cast<std::size_t>(*v);
}

}  // namespace

ExperimentConfig load_config(const std::string& path)
{
    toml::table root;
    try {
        root = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
        throw ConfigError(msg.str());
    }

    ExperimentConfig c;
    c.path = path;
    Section top(&root, "");
    const auto kind = top.string("kind");
    if (!kind) throw ConfigError("kind: required");
    c.kind = parse_kind(*kind);
    c.name = top.string("name").value_or(kind_name(c.kind));
    if (auto seed = top.integer("seed")) {
        if (*seed < 0) throw ConfigError("seed: must be >= 0");
        c.seed = static_cast<std::uint64_t>(*seed);
    }
    c.output_dir = top.string("output_dir").value_or("out/" + c.name);
    c.workers = top.integer("workers", 0);
    if (c.workers < 0) throw ConfigError("workers: must be >= 0");
    if (top.has("formats")) {
        c.formats.clear();
        for (const auto& f : top.strings("formats")) {
            if (f != "csv" && f != "json" && f != "svg") throw ConfigError("formats: unknown format '" + f + "'");
            c.formats.insert(f);
        }
    }

    switch (c.kind) {
    case Kind::Spectrum: {
        c.transmon = parse_transmon(top.table("transmon"));
        Section s = top.table("spectrum");
        c.spectrum.levels = s.integer("levels", c.spectrum.levels);
        c.spectrum.dispersion_levels = s.integers("dispersion_levels");
        c.spectrum.fit_omega01 = s.number("fit_omega01");
        c.spectrum.fit_alpha = s.number("fit_alpha");
        s.finish();
        if (c.spectrum.levels < 2 || c.spectrum.levels > c.transmon.dimension()) {
            throw ConfigError("spectrum.levels: must lie in [2, charge-basis dimension]");
        }
        for (int l : c.spectrum.dispersion_levels) {
            if (l < 0 || l >= c.transmon.dimension() - 2) {
                throw ConfigError("spectrum.dispersion_levels: level " + std::to_string(l)
                                  + " outside the truncation-safe range");
            }
        }
        if (c.spectrum.fit_omega01.has_value() != c.spectrum.fit_alpha.has_value()) {
            throw ConfigError("spectrum: fit_omega01 and fit_alpha go together");
        }
        if (c.spectrum.fit_alpha && !(*c.spectrum.fit_alpha < 0.0 && *c.spectrum.fit_omega01 > 0.0
                                      && -*c.spectrum.fit_alpha < *c.spectrum.fit_omega01)) {
            throw ConfigError("spectrum.fit_alpha: requires omega01 > 0, alpha < 0, |alpha| < omega01");
        }
        break;
    }
    case Kind::ScarMap: {
        c.transmon = parse_transmon(top.table("transmon"));
        Section d = top.table("drive");
        auto g = parse_drive(d);
        c.scan.states = d.integers("states");
        if (c.scan.states.empty()) c.scan.states = {0, 1};
        d.finish();
        c.scan.omega_d = g.omega_d;
        c.scan.xi = g.xi;
        c.scan.gate_charges = g.gate_charges;
        c.scan.options = g.options;
        c.scan.options.workers = c.workers;
        for (int s : c.scan.states)
            if (s < 0 || s >= c.scan.options.levels) throw ConfigError("drive.states: state outside drive.levels");
        if (c.scan.options.levels > c.transmon.dimension()) {
            throw ConfigError("drive.levels: exceeds the charge-basis dimension");
        }
        break;
    }
    case Kind::CoupledMap: {
        c.transmon = parse_transmon(top.table("transmon"));
        Section j = top.table("joint");
        if (!j.present()) throw ConfigError("joint: table required");
        auto& jp = c.coupled.joint;
        jp.transmon = c.transmon;
        jp.mode_freq = j.number("mode_freq", 0.0);
        jp.g = j.number("g", 0.0);
        jp.transmon_levels = j.integer("transmon_levels", jp.transmon_levels);
        jp.mode_levels = j.integer("mode_levels", jp.mode_levels);
        jp.keep_dressed = j.integer("keep_dressed", jp.keep_dressed);
        c.coupled.options.mode_linewidth = j.number("mode_linewidth", c.coupled.options.mode_linewidth);
        for (const auto& l : j.strings("states")) c.coupled.states.push_back(parse_label(l, "joint.states"));
        if (c.coupled.states.empty()) c.coupled.states = {{0, 0}, {1, 0}};
        Section f = j.table("fit");
        if (f.present()) {
            coupled::JointTargets t;
            t.omega01 = f.required_number("omega01");
            t.alpha = f.required_number("alpha");
            t.omega_r = f.required_number("omega_r");
            t.chi1 = f.required_number("chi1");
            f.finish();
            if (!(t.omega01 > 0.0) || !(t.alpha < 0.0) || !(t.omega_r > 0.0)) {
                throw ConfigError("joint.fit: requires omega01 > 0, alpha < 0, omega_r > 0");
            }
            c.coupled.fit = t;
        }
        j.finish();
        if (!c.coupled.fit) jp.validate();
        else {
            auto probe = jp;
            if (probe.mode_freq <= 0.0) probe.mode_freq = c.coupled.fit->omega_r;
            probe.validate();
        }
        if (!(c.coupled.options.mode_linewidth > 0.0)) throw ConfigError("joint.mode_linewidth: must be > 0");

        Section d = top.table("drive");
        auto g = parse_drive(d);
        d.finish();
        c.coupled.omega_d = g.omega_d;
        c.coupled.xi = g.xi;
        c.coupled.gate_charges = g.gate_charges;
        c.coupled.options.scan = g.options;
        c.coupled.options.scan.workers = c.workers;
        const double mode = c.coupled.fit ? c.coupled.fit->omega_r : jp.mode_freq;
        for (double w : g.omega_d) {
            if (std::abs(w - mode) < 5.0 * c.coupled.options.mode_linewidth) {
                throw ConfigError("drive.omega_d: " + std::to_string(w)
                                  + " GHz is within 5 linewidths of the linear mode; resonantly driven modes are "
                                    "not tracked");
            }
        }
        break;
    }
    case Kind::ReadoutFidelity: {
        Section r = top.table("readout");
        c.readout.model = parse_readout_model(r, &c.readout.nbar_r);
        c.readout.shots = shot_count(r, "shots", c.readout.shots);
        c.readout.plot_points = shot_count(r, "plot_points", c.readout.plot_points);
        r.finish();
        break;
    }
    case Kind::Efficiency: {
        Section r = top.table("readout");
        c.efficiency.model = parse_readout_model(r, nullptr);
        r.finish();
        Section e = top.table("efficiency");
        if (!e.present()) throw ConfigError("efficiency: table required");
        c.efficiency.tau_r = e.durations("tau_r");
        c.efficiency.shots = shot_count(e, "shots", c.efficiency.shots);
        e.finish();
        if (c.efficiency.tau_r.size() < 2) throw ConfigError("efficiency.tau_r: need at least 2 readout times");
        for (double t : c.efficiency.tau_r)
            if (!(t > 0.0)) throw ConfigError("efficiency.tau_r: times must be > 0");
        break;
    }
    case Kind::Calibrate: {
        Section s = top.table("calibration");
        if (!s.present()) throw ConfigError("calibration: table required");
        auto& cv = c.calibrate.curve;
        cv.chi1 = s.number("chi1", cv.chi1);
        cv.amplitudes = s.numbers("amplitudes");
        cv.stark_shifts = s.numbers("shifts");
        cv.sigmas = s.numbers("sigmas");
        c.calibrate.extrapolate = s.numbers("extrapolate");
        s.finish();
        cv.validate();
        break;
    }
    case Kind::Thresholds: {
        Section s = top.table("thresholds");
        if (!s.present()) throw ConfigError("thresholds: table required");
        auto& t = c.thresholds;
        t.n_shots = s.integer("n_shots", t.n_shots);
        t.p_baseline = s.numbers("p_baseline", true);
        if (t.p_baseline.empty()) throw ConfigError("thresholds.p_baseline: required");
        t.confidence = s.number("confidence", t.confidence);
        t.tau_total = s.duration("tau_total").value_or(t.tau_total);
        t.t1 = s.duration("t1").value_or(t.t1);
        t.measured_survival = s.number("measured_survival");
        s.finish();
        if (t.n_shots < 100) throw ConfigError("thresholds.n_shots: must be >= 100");
        for (double p : t.p_baseline)
            if (!(p > 0.0 && p < 1.0)) throw ConfigError("thresholds.p_baseline: must lie in (0, 1)");
        if (!(t.confidence > 0.5 && t.confidence < 1.0)) throw ConfigError("thresholds.confidence: must lie in (0.5, 1)");
        if (!(t.tau_total >= 0.0)) throw ConfigError("thresholds.tau_total: must be >= 0");
        if (!(t.t1 > 0.0)) throw ConfigError("thresholds.t1: must be > 0");
        break;
    }
    case Kind::TableCheck: {
        Section s = top.table("table");
        if (!s.present()) throw ConfigError("table: table required");
        auto& t = c.table;
        t.omega_r = s.required_number("omega_r");
        t.omega01 = s.required_number("omega01");
        t.alpha = s.required_number("alpha");
        t.chi1 = s.required_number("chi1");
        t.ej = s.required_number("ej");
        t.ec = s.required_number("ec");
        t.nbar_r = s.required_number("nbar_r");
        t.kappa = s.required_number("kappa");
        t.gamma_m = s.required_number("gamma_m");
        t.cavity_l2 = s.required_number("cavity_l2");
        t.cavity_l3 = s.required_number("cavity_l3");
        Section e = s.table("expected");
        static const std::set<std::string> known = {"g",   "n_bound",  "eta", "nbar_sys", "gamma_phi_MHz",
                                                    "cavity_GHz"};
        for (const auto& key : e.keys()) {
            if (!known.count(key)) throw ConfigError(e.key_path(key) + ": unknown quantity");
            Section q = e.table(key);
            if (!q.present()) throw ConfigError(e.key_path(key) + ": expected {value, tol}");
            Expectation x;
            x.value = q.required_number("value");
            x.tol = q.required_number("tol");
            q.finish();
            if (!(x.tol >= 0.0)) throw ConfigError(q.key_path("tol") + ": must be >= 0");
            t.expected.emplace_back(key, x);
        }
        e.finish();
        s.finish();
        if (!(t.ej / t.ec > 1.0) || !(t.ec > 0.0)) throw ConfigError("table: ej/ec must exceed 1");
        if (!(t.cavity_l2 > 0.0) || !(t.cavity_l3 > 0.0)) throw ConfigError("table.cavity_l2/l3: must be > 0");
        if (!(t.kappa > 0.0)) throw ConfigError("table.kappa: must be > 0");
        break;
    }
    }
    top.finish();
    return c;
}

}  // namespace cqed::cli
