#pragma once

#include <string>
#include <vector>

#include "homoglab/config.hpp"
#include "homoglab/homog.hpp"

namespace homoglab {

struct ConvergenceSummaryRow {
    double eps = 0;
    double median_err = 0, q1_err = 0, q3_err = 0;
    double median_y = 0, median_z = 0;
};

struct ConvergenceStudyResult {
    std::string csv_path;      // eps,realization,err_u,sup_y,sup_z
    std::string summary_path;  // per-eps medians/quartiles + fitted slope
    std::vector<ConvergenceSummaryRow> rows;
    double slope = 0;  // log-log slope of median error vs eps
};

ConvergenceStudyResult run_convergence_study(const ExperimentConfig& cfg);

struct MomentRow {
    double eps = 0;
    std::string name;  // Y2, dY2, d2Y2, Z2
    double estimate = 0, std_error = 0;
};

struct MomentStudyResult {
    std::string csv_path;
    std::string summary_path;
    std::vector<MomentRow> rows;
    double slope_y2 = 0, slope_dy2 = 0, slope_d2y2 = 0, slope_z2 = 0;
};

MomentStudyResult run_moment_study(const ExperimentConfig& cfg);

struct VbarStudyRow {
    double eps = 0, t = 0, value = 0, rel_error = 0;
};

struct VbarStudyResult {
    std::string csv_path;
    std::vector<VbarStudyRow> rows;
    double vbar = 0;
};

VbarStudyResult run_vbar_study(const ExperimentConfig& cfg);

// Runs the function-space invariant suite and writes a CSV report
// (check,value,bound,pass); returns false if any check failed.
bool run_spaces_check(const std::string& csv_path);

// One corrector realization: writes Y, Z trajectories and the vbar_eps(t)
// curve as CSVs under out_dir; returns the file paths.
std::vector<std::string> run_corrector(const ExperimentConfig& cfg, double eps);

// Deterministic parallel map: fn(i) for i in [0, n), results owned by the
// caller through index-addressed storage.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace homoglab
