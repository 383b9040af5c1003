#include "homoglab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "homoglab/errors.hpp"
#include "homoglab/stats.hpp"

namespace homoglab {
namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(item);
    return out;
}

struct Series {
    std::vector<double> eps;  // decreasing ladder order as read
    std::vector<double> med, lo, hi;
};

Series summarize(const std::map<double, std::vector<double>>& by_eps) {
    Series s;
    // Largest eps first, matching the ladder order of the study output.
    for (auto it = by_eps.rbegin(); it != by_eps.rend(); ++it) {
        s.eps.push_back(it->first);
        s.med.push_back(median(it->second));
        s.lo.push_back(quantile(it->second, 0.25));
        s.hi.push_back(quantile(it->second, 0.75));
    }
    return s;
}

void write_series(const Series& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw validation_error("cannot open output file: " + path);
    os << "# x y yerr\n";
    for (std::size_t i = 0; i < s.eps.size(); ++i)
        os << fmt(s.eps[i]) << ' ' << fmt(s.med[i]) << ' '
           << fmt(0.5 * (s.hi[i] - s.lo[i])) << '\n';
}

// Minimal hand-drawn log-log plot; one polyline per series.
void write_svg(const std::vector<std::pair<std::string, const Series*>>& series,
               double slope, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw validation_error("cannot open output file: " + path);
    const int W = 640, H = 480, M = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, s] : series) {
        for (std::size_t i = 0; i < s->eps.size(); ++i) {
            if (s->eps[i] <= 0 || s->med[i] <= 0) continue;
            xmin = std::min(xmin, s->eps[i]);
            xmax = std::max(xmax, s->eps[i]);
            ymin = std::min(ymin, s->med[i]);
            ymax = std::max(ymax, s->med[i]);
        }
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (xmin < xmax && ymin <= ymax) {
        if (ymin == ymax) ymax = 2.0 * ymin;
        auto px = [&](double x) {
            return M + (std::log(x) - std::log(xmin)) / (std::log(xmax) - std::log(xmin)) *
                           (W - 2 * M);
        };
        auto py = [&](double y) {
            return H - M -
                   (std::log(y) - std::log(ymin)) / (std::log(ymax) - std::log(ymin)) *
                       (H - 2 * M);
        };
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
        int ci = 0;
        for (const auto& [name, s] : series) {
            os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 3]
               << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < s->eps.size(); ++i)
                if (s->eps[i] > 0 && s->med[i] > 0)
                    os << px(s->eps[i]) << ',' << py(s->med[i]) << ' ';
            os << "\"/>\n<text x=\"" << (W - M + 4) << "\" y=\"" << (M + 20 * ci)
               << "\" font-size=\"12\" fill=\"" << colors[ci % 3] << "\">" << name
               << "</text>\n";
            ++ci;
        }
        os << "<line x1=\"" << M << "\" y1=\"" << (H - M) << "\" x2=\"" << (W - M)
           << "\" y2=\"" << (H - M) << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\""
           << (H - M) << "\" stroke=\"black\"/>\n";
    }
    os << "<text x=\"" << M << "\" y=\"30\" font-size=\"14\">log-log convergence, "
          "fitted slope = "
       << fmt(slope) << "</text>\n</svg>\n";
}

}  // namespace

PlotOutputs emit_plot_data(const std::string& csv_path, const std::string& out_prefix) {
    std::ifstream is(csv_path);
    if (!is) throw validation_error("plot: cannot open " + csv_path);
    std::string line;
    if (!std::getline(is, line) || line != "eps,realization,err_u,sup_y,sup_z")
        throw validation_error("plot: unexpected CSV schema in " + csv_path);

    std::map<double, std::vector<double>> err, sup_y, sup_z;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 5)
            throw validation_error("plot: malformed row in " + csv_path);
        const double eps = std::strtod(cols[0].c_str(), nullptr);
        err[eps].push_back(std::strtod(cols[2].c_str(), nullptr));
        sup_y[eps].push_back(std::strtod(cols[3].c_str(), nullptr));
        sup_z[eps].push_back(std::strtod(cols[4].c_str(), nullptr));
    }

    PlotOutputs out;
    const Series se = summarize(err), sy = summarize(sup_y), sz = summarize(sup_z);
    const struct {
        const char* name;
        const Series* s;
    } named[] = {{"err_u", &se}, {"sup_y", &sy}, {"sup_z", &sz}};
    for (const auto& n : named) {
        const std::string path = out_prefix + "_" + n.name + ".dat";
        write_series(*n.s, path);
        out.series_paths.push_back(path);
    }
    if (se.eps.size() >= 2) out.slope = fit_loglog_slope(se.eps, se.med);
    out.svg_path = out_prefix + ".svg";
    write_svg({{"err_u", &se}, {"sup_y", &sy}, {"sup_z", &sz}}, out.slope, out.svg_path);
    return out;
}

}  // namespace homoglab
