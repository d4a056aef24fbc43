#pragma once

// CSV and minimal SVG output. Number formatting is locale-independent and
// deterministic so reruns produce byte-identical files.

#include <string>
#include <vector>

#include "cqed/floquet.hpp"
#include "cqed/readout.hpp"

namespace cqed::io {

/// %.10g, with "nan"/"inf" spelled out.
std::string format_double(double v);

std::string csv_line(const std::vector<std::string>& fields);

/// Columns: ng, omega_d_GHz, xi, initial_state, theta, quasienergy_GHz,
/// branch_population, [mode_population,] resonant_flag
std::string scan_csv(const floquet::FloquetScan& scan);

/// Columns: I, Q, prepared, assigned
std::string shots_csv(const std::vector<const readout::ShotSet*>& sets, const std::vector<std::vector<int>>& assigned);

void write_file(const std::string& path, const std::string& content);

struct HeatMap {
    std::vector<double> x;  ///< column centers
    std::vector<double> y;  ///< row centers
    std::vector<double> z;  ///< row-major, y.size() x x.size()
    std::string title, xlabel, ylabel, zlabel;
    bool log_scale = true;
    double floor = 1e-4;  ///< log-scale floor
};

std::string render_heatmap(const HeatMap& map);

struct Series {
    std::vector<double> x, y;
    std::string label;
    std::string color = "#1f77b4";
};

struct Plot {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    bool scatter = false;  ///< points instead of polylines
};

std::string render_plot(const Plot& plot);

}  // namespace cqed::io
