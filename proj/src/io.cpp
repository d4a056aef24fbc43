#include "cqed/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed::io {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_line(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) out += ',';
        const std::string& f = fields[k];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            out += f;
        } else {
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        }
    }
    out += '\n';
    return out;
}

std::string scan_csv(const floquet::FloquetScan& scan)
{
    const bool joint = !scan.mode_population.empty();
    std::vector<std::string> header = {"ng", "omega_d_GHz", "xi", "initial_state", "theta", "quasienergy_GHz",
                                       "branch_population"};
    if (joint) header.push_back("mode_population");
    header.push_back("resonant_flag");
    std::string out = csv_line(header);
    for (std::size_t s = 0; s < scan.state_labels.size(); ++s)
        for (std::size_t g = 0; g < scan.gate_charges.size(); ++g)
            for (std::size_t w = 0; w < scan.omega_d.size(); ++w)
                for (std::size_t x = 0; x < scan.xi.size(); ++x) {
                    const std::size_t i = scan.index(s, g, w, x);
                    std::vector<std::string> row = {format_double(scan.gate_charges[g]),
                                                    format_double(scan.omega_d[w]),
                                                    format_double(scan.xi[x]),
                                                    scan.state_labels[s],
                                                    format_double(scan.theta[i]),
                                                    format_double(scan.quasienergy[i]),
                                                    format_double(scan.population[i])};
                    if (joint) row.push_back(format_double(scan.mode_population[i]));
                    row.push_back(scan.resonant[i] ? "1" : "0");
                    out += csv_line(row);
                }
    return out;
}

std::string shots_csv(const std::vector<const readout::ShotSet*>& sets, const std::vector<std::vector<int>>& assigned)
{
    if (sets.size() != assigned.size()) throw ConfigError("shots_csv: one assignment vector per shot set");
    std::string out = csv_line({"I", "Q", "prepared", "assigned"});
    for (std::size_t k = 0; k < sets.size(); ++k) {
        if (assigned[k].size() != sets[k]->size()) throw ConfigError("shots_csv: assignment length mismatch");
        for (std::size_t j = 0; j < sets[k]->size(); ++j) {
            const auto& s = sets[k]->shots[j];
            out += csv_line({format_double(s.i), format_double(s.q), std::to_string(s.prepared),
                             std::to_string(assigned[k][j])});
        }
    }
    return out;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << content;
    if (!f) throw ConfigError("write failed: " + path);
}

namespace {

constexpr double kWidth = 720, kHeight = 460;
constexpr double kLeft = 80, kRight = 110, kTop = 40, kBottom = 60;

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Viridis anchors.
std::string colormap(double t)
{
    static const std::array<std::array<double, 3>, 5> anchors = {{{68, 1, 84},
                                                                  {59, 82, 139},
                                                                  {33, 145, 140},
                                                                  {94, 201, 98},
                                                                  {253, 231, 37}}};
    if (std::isnan(t)) return "#bbbbbb";
    t = std::clamp(t, 0.0, 1.0) * (anchors.size() - 1);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), anchors.size() - 2);
    const double f = t - k;
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) rgb[c] = static_cast<int>(std::lround(anchors[k][c] + f * (anchors[k + 1][c] - anchors[k][c])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

struct Range {
    double lo = 0, hi = 1;
    double map(double v, double a, double b) const { return hi == lo ? 0.5 * (a + b) : a + (v - lo) / (hi - lo) * (b - a); }
};

Range range_of(const std::vector<double>& v)
{
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double x : v) {
        if (!std::isfinite(x)) continue;
        r.lo = std::min(r.lo, x);
        r.hi = std::max(r.hi, x);
    }
    if (!std::isfinite(r.lo)) return {0, 1};
    return r;
}

// Cell edges halfway between centers.
std::vector<double> edges(const std::vector<double>& c)
{
    std::vector<double> e(c.size() + 1);
    if (c.size() == 1) return {c[0] - 0.5, c[0] + 0.5};
    for (std::size_t k = 1; k < c.size(); ++k) e[k] = 0.5 * (c[k - 1] + c[k]);
    e.front() = c.front() - (e[1] - c.front());
    e.back() = c.back() + (c.back() - e[c.size() - 1]);
    return e;
}

void frame(std::ostringstream& o, const std::string& title, const std::string& xlabel, const std::string& ylabel,
           const Range& xr, const Range& yr)
{
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double vx = xr.lo + (xr.hi - xr.lo) * k / 4.0, px = xr.map(vx, x0, x1);
        o << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px) << "\" y2=\"" << num(y0 + 5)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 20) << "\" text-anchor=\"middle\">" << tick_label(vx)
          << "</text>\n";
        const double vy = yr.lo + (yr.hi - yr.lo) * k / 4.0, py = yr.map(vy, y0, y1);
        o << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick_label(vy)
          << "</text>\n";
    }
    o << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\">"
      << escape(xlabel) << "</text>\n";
    o << "<text transform=\"translate(20," << num(0.5 * (y0 + y1)) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(ylabel) << "</text>\n";
    o << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"24\" text-anchor=\"middle\" font-weight=\"bold\">"
      << escape(title) << "</text>\n";
}

std::string header()
{
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return o.str();
}

}  // namespace

std::string render_heatmap(const HeatMap& m)
{
    if (m.z.size() != m.x.size() * m.y.size() || m.x.empty() || m.y.empty()) {
        throw ConfigError("render_heatmap: z must have x.size() * y.size() entries");
    }
    const auto xe = edges(m.x), ye = edges(m.y);
    const Range xr{xe.front(), xe.back()}, yr{ye.front(), ye.back()};
    auto transform = [&](double v) { return m.log_scale ? std::log10(std::max(v, m.floor)) : v; };
    std::vector<double> tz(m.z.size());
    for (std::size_t k = 0; k < m.z.size(); ++k) tz[k] = std::isnan(m.z[k]) ? m.z[k] : transform(m.z[k]);
    Range zr = m.log_scale ? Range{std::log10(m.floor), 0.0} : range_of(tz);
    if (m.log_scale) zr.hi = std::max(0.0, range_of(tz).hi);

    std::ostringstream o;
    o << header();
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    for (std::size_t r = 0; r < m.y.size(); ++r) {
        const double pa = yr.map(ye[r + 1], y0, y1), pb = yr.map(ye[r], y0, y1);
        for (std::size_t c = 0; c < m.x.size(); ++c) {
            const double qa = xr.map(xe[c], x0, x1), qb = xr.map(xe[c + 1], x0, x1);
            const double v = tz[r * m.x.size() + c];
            o << "<rect x=\"" << num(qa) << "\" y=\"" << num(pa) << "\" width=\"" << num(qb - qa + 0.3)
              << "\" height=\"" << num(pb - pa + 0.3) << "\" fill=\"" << colormap((v - zr.lo) / (zr.hi - zr.lo))
              << "\"/>\n";
        }
    }
    frame(o, m.title, m.xlabel, m.ylabel, xr, yr);

    // Colorbar
    const double bx = kWidth - kRight + 20, bw = 18;
    for (int k = 0; k < 64; ++k) {
        const double t = (k + 0.5) / 64.0;
        const double py = y0 - (y0 - y1) * (k + 1) / 64.0;
        o << "<rect x=\"" << num(bx) << "\" y=\"" << num(py) << "\" width=\"" << num(bw) << "\" height=\""
          << num((y0 - y1) / 64.0 + 0.3) << "\" fill=\"" << colormap(t) << "\"/>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double v = zr.lo + (zr.hi - zr.lo) * k / 4.0;
        const double py = y0 - (y0 - y1) * k / 4.0;
        const std::string text = m.log_scale ? "1e" + tick_label(v) : tick_label(v);
        o << "<text x=\"" << num(bx + bw + 4) << "\" y=\"" << num(py + 4) << "\">" << escape(text) << "</text>\n";
    }
    o << "<text transform=\"translate(" << num(kWidth - 8) << "," << num(0.5 * (y0 + y1))
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(m.zlabel) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string render_plot(const Plot& p)
{
    std::vector<double> xs, ys;
    for (const auto& s : p.series) {
        if (s.x.size() != s.y.size()) throw ConfigError("render_plot: series x and y lengths differ");
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    Range xr = range_of(xs), yr = range_of(ys);
    const double px = 0.03 * (xr.hi - xr.lo), py = 0.05 * (yr.hi - yr.lo);
    xr.lo -= px, xr.hi += px, yr.lo -= py, yr.hi += py;

    std::ostringstream o;
    o << header();
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    for (const auto& s : p.series) {
        if (p.scatter) {
            for (std::size_t k = 0; k < s.x.size(); ++k) {
                if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
                o << "<circle cx=\"" << num(xr.map(s.x[k], x0, x1)) << "\" cy=\"" << num(yr.map(s.y[k], y0, y1))
                  << "\" r=\"1.2\" fill=\"" << s.color << "\" fill-opacity=\"0.5\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t k = 0; k < s.x.size(); ++k) {
                if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
                o << num(xr.map(s.x[k], x0, x1)) << ',' << num(yr.map(s.y[k], y0, y1)) << ' ';
            }
            o << "\"/>\n";
        }
    }
    frame(o, p.title, p.xlabel, p.ylabel, xr, yr);
    // Legend
    double ly = y1 + 14;
    for (const auto& s : p.series) {
        if (s.label.empty()) continue;
        o << "<rect x=\"" << num(x1 + 10) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
          << s.color << "\"/>\n<text x=\"" << num(x1 + 24) << "\" y=\"" << num(ly) << "\">" << escape(s.label)
          << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace cqed::io
