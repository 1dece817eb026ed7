#include "pslab/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pslab {
namespace {

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape_xml(const std::string& s) {
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

std::string provenance_lines(const std::string& provenance) {
    if (provenance.empty()) return {};
    std::string out;
    std::istringstream in(provenance);
    std::string line;
    while (std::getline(in, line)) out += "# " + line + "\n";
    return out;
}

// One plot panel: maps data coordinates into a pixel rectangle and draws
// framed axes with five ticks per side.
class Panel {
public:
    Panel(double px, double py, double width, double height, Rect data)
        : px_(px), py_(py), w_(width), h_(height), data_(data) {}

    double sx(double x) const { return px_ + (x - data_.x_min) / data_.width() * w_; }
    double sy(double y) const { return py_ + h_ - (y - data_.y_min) / data_.height() * h_; }

    void axes(std::ostringstream& out, const std::string& xlabel, const std::string& ylabel,
              const std::string& title) const {
        out << "<g class=\"axes\">\n";
        out << "<rect x=\"" << fixed(px_) << "\" y=\"" << fixed(py_) << "\" width=\"" << fixed(w_)
            << "\" height=\"" << fixed(h_) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double xv = std::lerp(data_.x_min, data_.x_max, k / 4.0);
            const double yv = std::lerp(data_.y_min, data_.y_max, k / 4.0);
            out << "<line x1=\"" << fixed(sx(xv)) << "\" y1=\"" << fixed(py_ + h_) << "\" x2=\""
                << fixed(sx(xv)) << "\" y2=\"" << fixed(py_ + h_ + 5) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(py_ + h_ + 18)
                << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
            out << "<line x1=\"" << fixed(px_ - 5) << "\" y1=\"" << fixed(sy(yv)) << "\" x2=\""
                << fixed(px_) << "\" y2=\"" << fixed(sy(yv)) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << fixed(px_ - 8) << "\" y=\"" << fixed(sy(yv) + 4)
                << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
        }
        out << "<text x=\"" << fixed(px_ + w_ / 2) << "\" y=\"" << fixed(py_ + h_ + 36)
            << "\" font-size=\"13\" text-anchor=\"middle\">" << escape_xml(xlabel) << "</text>\n";
        out << "<text x=\"" << fixed(px_ - 45) << "\" y=\"" << fixed(py_ + h_ / 2)
            << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 " << fixed(px_ - 45)
            << " " << fixed(py_ + h_ / 2) << ")\">" << escape_xml(ylabel) << "</text>\n";
        out << "<text x=\"" << fixed(px_ + w_ / 2) << "\" y=\"" << fixed(py_ - 10)
            << "\" font-size=\"14\" text-anchor=\"middle\">" << escape_xml(title) << "</text>\n";
        out << "</g>\n";
    }

    std::string path(const std::vector<Complex>& pts, bool closed) const {
        std::string d;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            d += (i == 0 ? "M" : " L") + fixed(sx(pts[i].real())) + "," + fixed(sy(pts[i].imag()));
        }
        if (closed) d += " Z";
        return d;
    }

    bool inside(Complex w) const { return data_.contains(w.real(), w.imag()); }

private:
    double px_, py_, w_, h_;
    Rect data_;
};

std::string svg_open(int width, int height, const std::string& provenance) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    if (!provenance.empty()) out << "<metadata>" << escape_xml(provenance) << "</metadata>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::vector<double> split_numbers(const std::string& line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        const std::size_t comma = line.find(',', start);
        const std::string tok = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str()) throw IoError("field csv: bad number '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string field_csv(const SigmaMinField& field, const std::string& provenance) {
    std::string out = provenance_lines(provenance);
    out += "re,im,sigma_min\n";
    const ComplexGrid& g = field.grid;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            out += format_double(g.re_at(ix)) + "," + format_double(g.im_at(iy)) + "," +
                   format_double(field.at(ix, iy)) + "\n";
        }
    }
    return out;
}

SigmaMinField parse_field_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::vector<std::array<double, 3>> rows;
    SigmaMinField field;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                const std::string key = line.substr(2, eq - 2);
                const std::string value = line.substr(eq + 1);
                if (key == "model") field.model = value;
                if (key == "h") field.h = std::strtod(value.c_str(), nullptr);
                if (key == "N") field.dim = std::strtol(value.c_str(), nullptr, 10);
            }
            continue;
        }
        if (!header) {
            if (line != "re,im,sigma_min") throw IoError("field csv: expected header re,im,sigma_min");
            header = true;
            continue;
        }
        const std::vector<double> v = split_numbers(line);
        if (v.size() != 3) throw IoError("field csv: expected 3 columns");
        rows.push_back({v[0], v[1], v[2]});
    }
    if (rows.size() < 4) throw IoError("field csv: need at least a 2x2 grid");
    std::size_t nx = 1;
    while (nx < rows.size() && rows[nx][1] == rows[0][1]) ++nx;
    if (rows.size() % nx != 0) throw IoError("field csv: row count is not a multiple of nx");
    const std::size_t ny = rows.size() / nx;
    field.grid = ComplexGrid{rows[0][0], rows[nx - 1][0], rows[0][1], rows.back()[1], int(nx), int(ny)};
    field.grid.validate();
    field.values.reserve(rows.size());
    for (const auto& r : rows) field.values.push_back(r[2]);
    return field;
}

std::string eigenvalues_csv(const WeylExperimentReport& report, const std::string& provenance) {
    std::string out = provenance_lines(provenance);
    out += "re,im,draw\n";
    for (std::size_t d = 0; d < report.eigenvalues.size(); ++d) {
        for (Complex w : report.eigenvalues[d]) {
            out += format_double(w.real()) + "," + format_double(w.imag()) + "," + std::to_string(d) + "\n";
        }
    }
    return out;
}

std::string contours_svg(const ContourSet& set, const ComplexGrid& frame, const std::string& provenance) {
    const Panel panel(70, 40, 500, 500, Rect{frame.re_min, frame.re_max, frame.im_min, frame.im_max});
    std::ostringstream out;
    out << svg_open(620, 600, provenance);
    panel.axes(out, "Re z", "Im z", "sigma_min(P - z) level sets");
    for (std::size_t k = 0; k < set.levels.size(); ++k) {
        const ContourLevel& level = set.levels[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        out << "<g class=\"level\" data-level=\"" << format_double(level.level) << "\">\n";
        for (const Polyline& line : level.lines) {
            out << "<path data-level=\"" << format_double(level.level) << "\" d=\""
                << panel.path(line.points, line.closed) << "\" fill=\"none\" stroke=\"" << colour
                << "\" stroke-width=\"1.2\"/>\n";
        }
        out << "<text x=\"580\" y=\"" << 60 + 16 * k << "\" font-size=\"11\" fill=\"" << colour
            << "\">eps=" << tick_label(level.level) << "</text>\n";
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string weyl_svg(const WeylExperimentReport& report, const std::string& provenance) {
    // Left frame: Γ enlarged around its center to show the eigenvalue cloud.
    const Rect& g = report.gamma;
    const double cx = 0.5 * (g.x_min + g.x_max);
    const double cy = 0.5 * (g.y_min + g.y_max);
    const double half = 1.5 * std::max(g.width(), g.height());
    const Rect left_frame{cx - half, cx + half, cy - half, cy + half};
    const Panel left(70, 40, 420, 420, left_frame);

    double ymax = 1.0;
    for (double v : report.density.mean_cumulative) ymax = std::max(ymax, v);
    for (double v : report.density.weyl) ymax = std::max(ymax, v);
    const Panel right(600, 40, 420, 420, Rect{g.y_min, g.y_max, 0.0, 1.1 * ymax});

    std::ostringstream out;
    out << svg_open(1080, 520, provenance);
    left.axes(out, "Re z", "Im z", "spectrum of P + delta Q");
    out << "<g class=\"eigenvalues\">\n";
    for (const auto& draw : report.eigenvalues) {
        for (Complex w : draw) {
            if (!left.inside(w)) continue;
            out << "<circle cx=\"" << fixed(left.sx(w.real())) << "\" cy=\"" << fixed(left.sy(w.imag()))
                << "\" r=\"1\" fill=\"#1f77b4\"/>\n";
        }
    }
    out << "</g>\n";
    out << "<rect class=\"gamma\" x=\"" << fixed(left.sx(g.x_min)) << "\" y=\"" << fixed(left.sy(g.y_max))
        << "\" width=\"" << fixed(left.sx(g.x_max) - left.sx(g.x_min)) << "\" height=\""
        << fixed(left.sy(g.y_min) - left.sy(g.y_max)) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

    right.axes(out, "Im z", "eigenvalues in box below Im z", "integrated density");
    auto curve = [&](const std::vector<double>& ys, const char* colour, const char* label) {
        std::vector<Complex> pts;
        for (std::size_t k = 0; k < ys.size(); ++k) pts.emplace_back(report.density.im_levels[k], ys[k]);
        out << "<path class=\"series\" data-series=\"" << label << "\" d=\"" << right.path(pts, false)
            << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"/>\n";
    };
    curve(report.density.mean_cumulative, "black", "experiment");
    curve(report.density.weyl, "#d62728", "weyl");
    out << "<text x=\"620\" y=\"60\" font-size=\"12\">experiment (mean of " << report.counts.size()
        << " draws)</text>\n";
    out << "<text x=\"620\" y=\"76\" font-size=\"12\" fill=\"#d62728\">Weyl law</text>\n";
    out << "</svg>\n";
    return out.str();
}

nlohmann::json to_json(const WeylExperimentReport& r) {
    nlohmann::json j;
    j["seed"] = r.seed;
    j["draws"] = r.draws;
    j["counts"] = r.counts;
    j["dropped_draws"] = r.dropped_draws;
    j["mean_count"] = r.mean_count;
    j["stddev_count"] = r.stddev_count;
    j["weyl_prediction"] = r.weyl_prediction;
    j["relative_discrepancy"] = r.relative_discrepancy;
    j["h"] = r.h;
    j["N"] = r.dim;
    j["delta"] = r.delta;
    j["gamma"] = {r.gamma.x_min, r.gamma.x_max, r.gamma.y_min, r.gamma.y_max};
    j["containment_ratio"] = r.containment_ratio;
    j["containment_violations"] = r.containment_violations;
    j["density"] = {{"im", r.density.im_levels},
                    {"mean_cumulative", r.density.mean_cumulative},
                    {"weyl", r.density.weyl}};
    return j;
}

nlohmann::json to_json(const SSVTailReport& r) {
    nlohmann::json j;
    j["t"] = r.t;
    j["tail"] = r.tail;
    j["delta"] = r.delta;
    j["draws"] = r.draws;
    j["N"] = r.dim;
    j["slope"] = r.slope ? nlohmann::json(*r.slope) : nlohmann::json(nullptr);
    j["bound_constant"] = r.bound_constant;
    j["bound_holds"] = r.bound_holds;
    return j;
}

nlohmann::json to_json(const QuasimodeReport& r) {
    nlohmann::json samples = nlohmann::json::array();
    for (const QuasimodeSample& s : r.samples) {
        samples.push_back({{"h", s.h},
                           {"N", s.dim},
                           {"residual", s.residual},
                           {"residual_doubled_N", s.residual_doubled},
                           {"sigma_min", s.sigma_min},
                           {"truncation_dominated", s.truncation_dominated}});
    }
    return {{"samples", samples}, {"slope", r.slope}};
}

nlohmann::json to_json(const ResolventGrowth& r) {
    return {{"h", r.h},
            {"resolvent_norm", r.norm},
            {"dropped_h", r.dropped_h},
            {"power_slope", r.power_slope},
            {"exponential_rate", r.exponential_rate}};
}

}  // namespace pslab
