#include "homoglab/studies.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "homoglab/errors.hpp"
#include "homoglab/fields.hpp"
#include "homoglab/heat.hpp"
#include "homoglab/rng.hpp"
#include "homoglab/stats.hpp"
#include "homoglab/weights.hpp"

namespace homoglab {
namespace {

// Round-trip exact formatting: summaries recomputed from the CSV text must
// match the emitted numbers bit-for-bit.
std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw validation_error("cannot open output file: " + path);
    return os;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

// Steps at which the solver stores slices (mirrors its storage rule).
std::vector<std::size_t> stored_steps(std::size_t steps, std::size_t stride) {
    std::vector<std::size_t> out{0};
    for (std::size_t s = 1; s <= steps; ++s)
        if (s % stride == 0 || s == steps) out.push_back(s);
    return out;
}

// Linear-interpolated vbar_eps(t) curve on [0, horizon]; quadrature when the
// model is separable, Monte Carlo node estimates otherwise.
std::function<double(double)> make_vbar_curve(const CovarianceModel& model, double eps,
                                              double alpha, double horizon,
                                              std::uint64_t seed) {
    const bool analytic = dynamic_cast<const SeparableModel*>(&model) != nullptr;
    const std::size_t segments = analytic ? 64 : 8;
    auto ts = std::make_shared<std::vector<double>>();
    auto vs = std::make_shared<std::vector<double>>();
    for (std::size_t k = 0; k <= segments; ++k) {
        const double t = horizon * static_cast<double>(k) / static_cast<double>(segments);
        ts->push_back(t);
        if (k == 0) {
            vs->push_back(0.0);
        } else if (analytic) {
            vs->push_back(vbar_eps_quadrature(model, eps, alpha, t));
        } else {
            vs->push_back(vbar_eps_mc(model, eps, alpha, t, 32, derive_seed(seed, 7, k)).value);
        }
    }
    return [ts, vs](double t) {
        const auto& tt = *ts;
        if (t <= tt.front()) return vs->front();
        if (t >= tt.back()) return vs->back();
        std::size_t k = static_cast<std::size_t>(
            (t - tt.front()) / (tt[1] - tt[0]));
        if (k + 1 >= tt.size()) k = tt.size() - 2;
        const double w = (t - tt[k]) / (tt[k + 1] - tt[k]);
        return (1.0 - w) * (*vs)[k] + w * (*vs)[k + 1];
    };
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const std::string& header) {
    auto os = open_out(path);
    os << "# " << header << "\nt,x,value\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const GridFunction& g = traj.slices[k];
        for (std::size_t i = 0; i < g.size(); ++i)
            os << fmt(traj.times[k]) << ',' << fmt(g.x(i)) << ',' << fmt(g.values[i])
               << '\n';
    }
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const auto k = static_cast<std::size_t>(threads);
    for (std::size_t i = 0; i < std::min(k, n); ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ConvergenceStudyResult run_convergence_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const CovarianceModel& model = *cfg.model;
    const double vbar = vbar_slow(model);

    struct Record {
        double err_u = 0, sup_y = 0, sup_z = 0;
        bool ok = false;
        std::string what;
    };

    ConvergenceStudyResult result;
    result.csv_path = join_path(cfg.out_dir, "convergence.csv");
    result.summary_path = join_path(cfg.out_dir, "convergence_summary.txt");
    auto csv = open_out(result.csv_path);
    csv << "eps,realization,err_u,sup_y,sup_z\n";

    std::vector<double> median_errs;
    for (std::size_t e = 0; e < cfg.eps_ladder.size(); ++e) {
        const double eps = cfg.eps_ladder[e];
        EpsExperiment ex = design_experiment(model, eps, cfg.alpha, cfg.domain_L,
                                             cfg.horizon, cfg.points_per_corr);
        const auto steps =
            static_cast<std::size_t>(std::llround(cfg.horizon / ex.solver.dt));
        const std::size_t stride = std::max<std::size_t>(1, steps / 32);
        SolverConfig stored_cfg = ex.solver;
        stored_cfg.store_stride = stride;
        SolverConfig dense_cfg = ex.solver;  // Y kept dense for the Z source

        const auto vbar_curve =
            make_vbar_curve(model, eps, cfg.alpha, cfg.horizon, cfg.seed);
        GaussianFieldSampler sampler(model, ex.micro_grid);

        GridFunction u0 = sample_on_grid(ex.solver.L, ex.solver.h,
                                         [](double x) { return heat_kernel(x, 1.0); });
        // Homogenized reference at each stored time.
        const auto ssteps = stored_steps(steps, stride);
        std::vector<GridFunction> hom;
        std::vector<double> stimes;
        hom.reserve(ssteps.size());
        for (std::size_t s : ssteps) {
            const double t = static_cast<double>(s) * ex.solver.dt;
            stimes.push_back(t);
            hom.push_back(homogenized_solution(u0, vbar, t));
        }

        // Window masks.
        std::vector<std::size_t> xs_idx;
        for (std::size_t i = 0; i < u0.size(); ++i)
            if (std::abs(u0.x(i)) <= cfg.window_x + 1e-12) xs_idx.push_back(i);

        std::vector<Record> records(cfg.realizations);
        parallel_for(cfg.realizations, cfg.threads, [&](std::size_t r) {
            Record& rec = records[r];
            try {
                FieldRealization base = sampler.sample(derive_seed(cfg.seed, e, r));
                RescaledPotential pot(std::move(base), eps, ex.regime);
                pot.check_coverage(cfg.domain_L, cfg.horizon);
                auto vfun = [&pot](double x, double t) { return pot(x, t); };

                ParabolicProblem up;
                up.u0 = u0;
                up.potential = vfun;
                up.horizon = cfg.horizon;
                Trajectory u = solve_potential(up, stored_cfg);

                Trajectory y = corrector_Y(vfun, cfg.horizon, dense_cfg);
                Trajectory z = corrector_Z(y, vbar_curve, stored_cfg);

                for (std::size_t k = 0; k < u.size(); ++k) {
                    if (u.times[k] < cfg.window_t0 - 1e-12) continue;
                    for (std::size_t i : xs_idx) {
                        rec.err_u = std::max(
                            rec.err_u, std::abs(u.slices[k].values[i] - hom[k].values[i]));
                        rec.sup_z = std::max(rec.sup_z, std::abs(z.slices[k].values[i]));
                    }
                }
                for (std::size_t k = 0; k < y.size(); ++k) {
                    if (y.times[k] < cfg.window_t0 - 1e-12) continue;
                    for (std::size_t i : xs_idx)
                        rec.sup_y = std::max(rec.sup_y, std::abs(y.slices[k].values[i]));
                }
                rec.ok = true;
            } catch (const std::exception& ex_err) {
                rec.ok = false;
                rec.what = ex_err.what();
            }
        });

        std::vector<double> errs, ys, zs;
        std::size_t failures = 0;
        for (std::size_t r = 0; r < cfg.realizations; ++r) {
            const Record& rec = records[r];
            if (!rec.ok) {
                ++failures;
                std::fprintf(stderr, "[homoglab] eps=%g realization %zu failed: %s\n",
                             eps, r, rec.what.c_str());
                continue;
            }
            csv << fmt(eps) << ',' << r << ',' << fmt(rec.err_u) << ',' << fmt(rec.sup_y)
                << ',' << fmt(rec.sup_z) << '\n';
            errs.push_back(rec.err_u);
            ys.push_back(rec.sup_y);
            zs.push_back(rec.sup_z);
        }
        if (failures == cfg.realizations)
            throw numerical_error("convergence study: every realization failed at eps=" +
                                  fmt(eps));

        ConvergenceSummaryRow row;
        row.eps = eps;
        row.median_err = median(errs);
        row.q1_err = quantile(errs, 0.25);
        row.q3_err = quantile(errs, 0.75);
        row.median_y = median(ys);
        row.median_z = median(zs);
        result.rows.push_back(row);
        median_errs.push_back(row.median_err);
    }

    result.slope = fit_loglog_slope(cfg.eps_ladder, median_errs);
    auto summary = open_out(result.summary_path);
    summary << "eps,median_err,q1_err,q3_err,median_sup_y,median_sup_z\n";
    for (const auto& row : result.rows)
        summary << fmt(row.eps) << ',' << fmt(row.median_err) << ',' << fmt(row.q1_err)
                << ',' << fmt(row.q3_err) << ',' << fmt(row.median_y) << ','
                << fmt(row.median_z) << '\n';
    summary << "slope," << fmt(result.slope) << "\n";
    return result;
}

MomentStudyResult run_moment_study(const ExperimentConfig& cfg) {
    cfg.validate();
    const CovarianceModel& model = *cfg.model;
    const double t_obs = cfg.horizon;

    MomentStudyResult result;
    result.csv_path = join_path(cfg.out_dir, "moments.csv");
    result.summary_path = join_path(cfg.out_dir, "moments_summary.txt");
    auto csv = open_out(result.csv_path);
    csv << "eps,moment,estimate,std_error\n";

    std::vector<double> y2s, dy2s, d2y2s, z2s;
    for (std::size_t e = 0; e < cfg.eps_ladder.size(); ++e) {
        const double eps = cfg.eps_ladder[e];
        EpsExperiment ex = design_experiment(model, eps, cfg.alpha, cfg.domain_L, t_obs,
                                             cfg.points_per_corr);
        const auto steps = static_cast<std::size_t>(std::llround(t_obs / ex.solver.dt));
        SolverConfig dense_cfg = ex.solver;
        SolverConfig end_cfg = ex.solver;
        end_cfg.store_stride = steps;

        const auto vbar_curve = make_vbar_curve(model, eps, cfg.alpha, t_obs, cfg.seed);
        GaussianFieldSampler sampler(model, ex.micro_grid);
        const auto n_x =
            static_cast<std::size_t>(std::llround(2.0 * cfg.domain_L / ex.solver.h));
        const std::size_t i0 = n_x / 2;  // x = 0

        struct Sample {
            double y2 = 0, dy2 = 0, d2y2 = 0, z2 = 0;
        };
        std::vector<Sample> samples(cfg.realizations);
        parallel_for(cfg.realizations, cfg.threads, [&](std::size_t r) {
            FieldRealization base = sampler.sample(derive_seed(cfg.seed, e, r));
            RescaledPotential pot(std::move(base), eps, ex.regime);
            pot.check_coverage(cfg.domain_L, t_obs);
            auto vfun = [&pot](double x, double t) { return pot(x, t); };

            Trajectory y = corrector_Y(vfun, t_obs, dense_cfg);
            Trajectory z = corrector_Z(y, vbar_curve, end_cfg);

            const auto& yv = y.back().values;
            const auto& zv = z.back().values;
            const double h = ex.solver.h;
            const std::size_t n = yv.size();
            const double dy = (yv[(i0 + 1) % n] - yv[(i0 + n - 1) % n]) / (2.0 * h);
            const double d2y =
                (yv[(i0 + 1) % n] - 2.0 * yv[i0] + yv[(i0 + n - 1) % n]) / (h * h);
            samples[r] = {yv[i0] * yv[i0], dy * dy, d2y * d2y, zv[i0] * zv[i0]};
        });

        std::vector<double> y2(cfg.realizations), dy2(cfg.realizations),
            d2y2(cfg.realizations), z2(cfg.realizations);
        for (std::size_t r = 0; r < cfg.realizations; ++r) {
            y2[r] = samples[r].y2;
            dy2[r] = samples[r].dy2;
            d2y2[r] = samples[r].d2y2;
            z2[r] = samples[r].z2;
        }
        const struct {
            const char* name;
            std::vector<double>* data;
            std::vector<double>* series;
        } moments[] = {{"Y2", &y2, &y2s},
                       {"dY2", &dy2, &dy2s},
                       {"d2Y2", &d2y2, &d2y2s},
                       {"Z2", &z2, &z2s}};
        for (const auto& m : moments) {
            MomentRow row;
            row.eps = eps;
            row.name = m.name;
            row.estimate = mean(*m.data);
            row.std_error = cfg.realizations >= 2 ? jackknife_se(*m.data) : 0.0;
            result.rows.push_back(row);
            m.series->push_back(row.estimate);
            csv << fmt(eps) << ',' << m.name << ',' << fmt(row.estimate) << ','
                << fmt(row.std_error) << '\n';
        }
    }

    result.slope_y2 = fit_loglog_slope(cfg.eps_ladder, y2s);
    result.slope_dy2 = fit_loglog_slope(cfg.eps_ladder, dy2s);
    result.slope_d2y2 = fit_loglog_slope(cfg.eps_ladder, d2y2s);
    result.slope_z2 = fit_loglog_slope(cfg.eps_ladder, z2s);
    auto summary = open_out(result.summary_path);
    summary << "slope_Y2," << fmt(result.slope_y2) << "\nslope_dY2,"
            << fmt(result.slope_dy2) << "\nslope_d2Y2," << fmt(result.slope_d2y2)
            << "\nslope_Z2," << fmt(result.slope_z2) << "\n";
    return result;
}

VbarStudyResult run_vbar_study(const ExperimentConfig& cfg) {
    cfg.validate();
    VbarStudyResult result;
    result.vbar = vbar_slow(*cfg.model);
    result.csv_path = join_path(cfg.out_dir, "vbar_study.csv");
    auto csv = open_out(result.csv_path);
    csv << "eps,t,vbar_eps,rel_error\n";
    for (double eps : cfg.eps_ladder) {
        for (double t : cfg.t_values) {
            VbarStudyRow row;
            row.eps = eps;
            row.t = t;
            row.value = vbar_eps_quadrature(*cfg.model, eps, cfg.alpha, t);
            row.rel_error = result.vbar != 0.0
                                ? std::abs(row.value - result.vbar) / result.vbar
                                : std::abs(row.value);
            result.rows.push_back(row);
            csv << fmt(eps) << ',' << fmt(t) << ',' << fmt(row.value) << ','
                << fmt(row.rel_error) << '\n';
        }
    }
    return result;
}

bool run_spaces_check(const std::string& csv_path) {
    auto csv = open_out(csv_path);
    csv << "check,value,bound,pass\n";
    bool all_ok = true;
    auto report = [&](const std::string& name, double value, double bound) {
        const bool ok = value <= bound;
        all_ok = all_ok && ok;
        csv << name << ',' << fmt(value) << ',' << fmt(bound) << ','
            << (ok ? "1" : "0") << '\n';
    };

    const double L = 10.0, h = 0.01;
    GridFunction f = sample_on_grid(L, h, [](double x) { return std::sin(3.0 * x); });
    GridFunction g = sample_on_grid(
        L, h, [](double x) { return std::cos(5.0 * x) * std::exp(-0.1 * x * x); });

    // Semigroup property P_s P_t = P_{s+t}.
    {
        GridFunction a = heat_semigroup_apply(heat_semigroup_apply(f, 0.3), 0.2);
        GridFunction b = heat_semigroup_apply(f, 0.5);
        double diff = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        report("semigroup_property", diff, 1e-8);
    }
    // Norm homogeneity, exact.
    {
        const Weight w = Weight::exponential(0.5);
        GridFunction f3 = f;
        for (double& v : f3.values) v *= 3.0;
        const double lhs = weighted_holder_norm(f3, 0.5, w);
        const double rhs = 3.0 * weighted_holder_norm(f, 0.5, w);
        report("norm_homogeneity", std::abs(lhs - rhs), 0.0);
    }
    // Triangle inequality.
    {
        const Weight w = Weight::polynomial(1.0);
        GridFunction s = f;
        for (std::size_t i = 0; i < s.size(); ++i) s.values[i] += g.values[i];
        const double lhs = weighted_holder_norm(s, 0.5, w);
        const double rhs =
            weighted_holder_norm(f, 0.5, w) + weighted_holder_norm(g, 0.5, w);
        report("triangle_inequality", lhs, rhs + 1e-12);
    }
    // Admissibility constants.
    {
        const Weight e1 = Weight::exponential(1.0);
        // Equality is attained at |x-y| = 1; allow rounding in the ratio.
        report("admissibility_exp", e1.max_unit_ratio(10.0, 0.01),
               e1.admissibility_constant() * (1.0 + 1e-12));
        const Weight p_half = Weight::polynomial(0.5);
        report("admissibility_poly", p_half.max_unit_ratio(10.0, 0.01),
               p_half.admissibility_constant());
    }
    // Heat smoothing: ||P_t f||_{3/2} t^{(3/2 - 1/4)/2} bounded (regression
    // constant frozen from the recorded oracle run).
    {
        GridFunction rough = sample_on_grid(L, h, [](double x) {
            return std::asin(std::sin(8.0 * x));  // sawtooth
        });
        std::vector<double> ts;
        for (int k = 2; k <= 10; ++k) ts.push_back(std::pow(2.0, -k));
        const auto rows =
            smoothing_exponent_check(rough, 0.25, 1.5, Weight::polynomial(1.0), ts);
        double worst = 0;
        for (const auto& row : rows) worst = std::max(worst, row.scaled);
        report("smoothing_exponent", worst, 1.5);
    }
    // Weight envelope sweep (regression constant frozen from the oracle run).
    {
        double worst = 0;
        for (double kappa : {0.25, 0.5, 1.0})
            for (double ell : {0.25, 0.5, 1.0})
                worst = std::max(worst, weight_envelope_check(kappa, ell));
        report("weight_envelope", worst, 1.5);
    }
    return all_ok;
}

std::vector<std::string> run_corrector(const ExperimentConfig& cfg, double eps) {
    cfg.validate();
    const CovarianceModel& model = *cfg.model;
    EpsExperiment ex = design_experiment(model, eps, cfg.alpha, cfg.domain_L, cfg.horizon,
                                         cfg.points_per_corr);
    const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / ex.solver.dt));
    const std::size_t stride = std::max<std::size_t>(1, steps / 32);

    const auto vbar_curve = make_vbar_curve(model, eps, cfg.alpha, cfg.horizon, cfg.seed);

    FieldRealization base;
    if (const auto* shot = dynamic_cast<const ShotNoiseModel*>(&model)) {
        base = sample_shot_noise_field(shot->spec(), ex.micro_grid, cfg.seed);
    } else {
        base = sample_gaussian_field(model, ex.micro_grid, cfg.seed);
    }
    RescaledPotential pot(std::move(base), eps, ex.regime);
    pot.check_coverage(cfg.domain_L, cfg.horizon);
    auto vfun = [&pot](double x, double t) { return pot(x, t); };

    Trajectory y = corrector_Y(vfun, cfg.horizon, ex.solver);
    SolverConfig stored_cfg = ex.solver;
    stored_cfg.store_stride = stride;
    Trajectory z = corrector_Z(y, vbar_curve, stored_cfg);

    // thin Y to the same stride for output
    Trajectory y_out;
    for (std::size_t k = 0; k < y.size(); ++k)
        if (k % stride == 0 || k + 1 == y.size()) {
            y_out.times.push_back(y.times[k]);
            y_out.slices.push_back(y.slices[k]);
        }

    std::ostringstream header;
    header << "model=" << model.describe() << " eps=" << fmt(eps)
           << " alpha=" << fmt(cfg.alpha) << " seed=" << cfg.seed;
    const std::string y_path = join_path(cfg.out_dir, "corrector_y.csv");
    const std::string z_path = join_path(cfg.out_dir, "corrector_z.csv");
    const std::string c_path = join_path(cfg.out_dir, "vbar_eps_curve.csv");
    write_trajectory_csv(y_out, y_path, header.str());
    write_trajectory_csv(z, z_path, header.str());
    auto cs = open_out(c_path);
    cs << "# " << header.str() << "\nt,vbar_eps\n";
    for (std::size_t k = 0; k <= 64; ++k) {
        const double t = cfg.horizon * static_cast<double>(k) / 64.0;
        cs << fmt(t) << ',' << fmt(vbar_curve(t)) << '\n';
    }
    return {y_path, z_path, c_path};
}

}  // namespace homoglab
