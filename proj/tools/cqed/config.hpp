#pragma once

// Experiment configuration: a strict TOML dialect. Every table has a fixed key
// set and unknown keys are rejected with their dotted path.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqed/calib.hpp"
#include "cqed/coupled.hpp"
#include "cqed/floquet.hpp"
#include "cqed/readout.hpp"
#include "cqed/transmon.hpp"

namespace cqed::cli {

enum class Kind { Spectrum, ScarMap, CoupledMap, ReadoutFidelity, Efficiency, Calibrate, Thresholds, TableCheck };

const char* kind_name(Kind k);

struct SpectrumConfig {
    int levels = 10;
    std::vector<int> dispersion_levels;
    std::optional<double> fit_omega01;
    std::optional<double> fit_alpha;
};

struct ScanConfig {
    std::vector<double> omega_d;
    std::vector<double> xi;
    std::vector<double> gate_charges;
    std::vector<int> states;
    floquet::ScanOptions options;
};

struct CoupledConfig {
    coupled::JointSystemParams joint;
    std::optional<coupled::JointTargets> fit;
    std::vector<double> omega_d;
    std::vector<double> xi;
    std::vector<double> gate_charges;
    std::vector<coupled::Label> states;
    coupled::CoupledScanOptions options;
};

struct ReadoutConfig {
    readout::ReadoutModel model;
    std::vector<double> nbar_r;
    std::size_t shots = 50000;
    std::size_t plot_points = 3000;
};

struct EfficiencyConfig {
    readout::ReadoutModel model;
    std::vector<double> tau_r;
    std::size_t shots = 20000;
};

struct CalibrateConfig {
    calib::CalibrationCurve curve;
    std::vector<double> extrapolate;
};

struct ThresholdsConfig {
    int n_shots = 20000;
    std::vector<double> p_baseline;
    double confidence = 0.95;
    double tau_total = 21e-6;
    double t1 = 110e-6;
    std::optional<double> measured_survival;
};

struct Expectation {
    double value = 0.0;
    double tol = 0.0;
};

struct TableConfig {
    double omega_r = 0.0, omega01 = 0.0, alpha = 0.0, chi1 = 0.0;
    double ej = 0.0, ec = 0.0;
    double nbar_r = 0.0, kappa = 0.0, gamma_m = 0.0;  ///< gamma_m in GHz (linear)
    double cavity_l2 = 0.0, cavity_l3 = 0.0;          ///< m
    std::vector<std::pair<std::string, Expectation>> expected;
};

struct ExperimentConfig {
    std::string path;
    Kind kind = Kind::Spectrum;
    std::string name;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::set<std::string> formats = {"csv", "json", "svg"};
    int workers = 0;

    transmon::TransmonParams transmon;
    SpectrumConfig spectrum;
    ScanConfig scan;
    CoupledConfig coupled;
    ReadoutConfig readout;
    EfficiencyConfig efficiency;
    CalibrateConfig calibrate;
    ThresholdsConfig thresholds;
    TableConfig table;

    bool wants(const std::string& format) const { return formats.count(format) > 0; }
};

/// Parses and validates against module preconditions; throws ConfigError
/// naming the offending key.
ExperimentConfig load_config(const std::string& path);

/// "780ns", "110 us", "1ms", "2s" or a bare number of seconds.
double parse_duration(const std::string& text);

/// 64-bit FNV-1a of the raw config bytes, hex.
std::string config_hash(const std::string& path);

}  // namespace cqed::cli
