#pragma once

#include <string>
#include <vector>

namespace homoglab {

struct PlotOutputs {
    std::vector<std::string> series_paths;  // whitespace (x, y, yerr) files
    std::string svg_path;                   // log-log convergence plot
    double slope = 0;                       // annotated fitted slope
};

// Turns a convergence-study CSV (eps,realization,err_u,sup_y,sup_z) into
// per-quantity median series files and a log-log SVG with the fitted slope
// annotated.  An empty CSV yields empty series and no crash; a different
// schema is a format error.
PlotOutputs emit_plot_data(const std::string& csv_path, const std::string& out_prefix);

}  // namespace homoglab
