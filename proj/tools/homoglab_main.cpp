// homoglab: numerical laboratory for homogenization of the 1-D heat
// equation with a rapidly oscillating random potential.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "homoglab/config.hpp"
#include "homoglab/errors.hpp"
#include "homoglab/fields.hpp"
#include "homoglab/homog.hpp"
#include "homoglab/plot.hpp"
#include "homoglab/studies.hpp"

namespace {

using namespace homoglab;

int default_threads() {
    if (const char* env = std::getenv("HOMOGLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

struct Cli {
    std::string config_path;
    std::string out_dir = ".";
    long long seed = -1;
    int threads = 0;
    double eps = 0.0;

    Config load() const {
        Config cfg = config_path.empty() ? Config::parse_string("")
                                         : Config::parse_file(config_path);
        if (seed >= 0) cfg.set("study.seed", std::to_string(seed));
        if (threads >= 1) cfg.set("study.threads", std::to_string(threads));
        if (!cfg.has("study.threads"))
            cfg.set("study.threads", std::to_string(default_threads()));
        cfg.set("study.out", out_dir);
        return cfg;
    }
};

void add_common(CLI::App* sub, Cli& cli, bool config_required) {
    auto* opt = sub->add_option("--config", cli.config_path, "config file (TOML syntax)");
    if (config_required) opt->required();
    sub->add_option("--seed", cli.seed, "master seed override");
    sub->add_option("--threads", cli.threads, "worker thread count");
    sub->add_option("--out", cli.out_dir, "output directory");
}

int run_sample(const Cli& cli) {
    const Config cfg = cli.load();
    const ExperimentConfig ec = ExperimentConfig::from(cfg);
    FieldGrid grid;
    grid.x0 = cfg.get_double("sample.x0", -4.0);
    grid.x1 = cfg.get_double("sample.x1", 4.0);
    grid.hx = cfg.get_double("sample.hx", 0.0625);
    grid.t0 = cfg.get_double("sample.t0", 0.0);
    grid.t1 = cfg.get_double("sample.t1", 1.0);
    grid.ht = cfg.get_double("sample.ht", 0.0625);
    grid.validate();
    FieldRealization field;
    if (const auto* shot = dynamic_cast<const ShotNoiseModel*>(ec.model.get())) {
        field = sample_shot_noise_field(shot->spec(), grid, ec.seed);
    } else {
        field = sample_gaussian_field(*ec.model, grid, ec.seed);
    }
    const std::string path = join_path(ec.out_dir, "field.csv");
    write_field_csv(field, path);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int run_vbar(const Cli& cli) {
    const Config cfg = cli.load();
    const auto model = model_from_config(cfg);
    std::printf("vbar_slow      = %.12g\n", vbar_slow(*model));
    std::printf("vbar_diffusive = %.12g\n", vbar_diffusive(*model));
    std::printf("vbar_fast      = %.12g\n", vbar_fast(*model));
    return 0;
}

int run_corrector_cmd(const Cli& cli) {
    const Config cfg = cli.load();
    const ExperimentConfig ec = ExperimentConfig::from(cfg);
    const double eps = cli.eps > 0 ? cli.eps : ec.eps_ladder.front();
    for (const auto& path : run_corrector(ec, eps)) std::cout << "wrote " << path << "\n";
    return 0;
}

int run_converge(const Cli& cli) {
    const Config cfg = cli.load();
    const ExperimentConfig ec = ExperimentConfig::from(cfg);
    const auto result = run_convergence_study(ec);
    std::cout << "wrote " << result.csv_path << "\nwrote " << result.summary_path << "\n";
    const auto plots =
        emit_plot_data(result.csv_path, join_path(ec.out_dir, "convergence"));
    for (const auto& p : plots.series_paths) std::cout << "wrote " << p << "\n";
    std::cout << "wrote " << plots.svg_path << "\n";
    std::printf("fitted slope of median error: %.12g\n", result.slope);
    return 0;
}

int run_moments(const Cli& cli) {
    const Config cfg = cli.load();
    const ExperimentConfig ec = ExperimentConfig::from(cfg);
    const auto result = run_moment_study(ec);
    std::cout << "wrote " << result.csv_path << "\nwrote " << result.summary_path << "\n";
    std::printf("slopes: Y2=%.6g dY2=%.6g d2Y2=%.6g Z2=%.6g\n", result.slope_y2,
                result.slope_dy2, result.slope_d2y2, result.slope_z2);
    return 0;
}

int run_vbar_study_cmd(const Cli& cli) {
    const Config cfg = cli.load();
    const ExperimentConfig ec = ExperimentConfig::from(cfg);
    const auto result = run_vbar_study(ec);
    std::cout << "wrote " << result.csv_path << "\n";
    std::printf("vbar (slow regime) = %.12g\n", result.vbar);
    return 0;
}

int run_spaces(const Cli& cli) {
    const std::string path = join_path(cli.out_dir, "spaces_check.csv");
    const bool ok = run_spaces_check(path);
    std::cout << "wrote " << path << "\n";
    if (!ok) throw numerical_error("spaces check: at least one invariant failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homoglab: homogenization laboratory for the 1-D random heat equation"};
    app.require_subcommand(1);

    Cli cli;
    auto* sample = app.add_subcommand("sample", "sample one field realization to CSV");
    add_common(sample, cli, true);
    auto* vbar = app.add_subcommand("vbar", "print the three regime constants");
    add_common(vbar, cli, true);
    auto* corrector =
        app.add_subcommand("corrector", "one corrector realization (Y, Z, vbar curve)");
    add_common(corrector, cli, true);
    corrector->add_option("--eps", cli.eps, "scale parameter (default: ladder front)");
    auto* converge = app.add_subcommand("converge", "convergence study over the eps ladder");
    add_common(converge, cli, true);
    auto* moments = app.add_subcommand("moments", "corrector moment study");
    add_common(moments, cli, true);
    auto* vbar_study = app.add_subcommand("vbar-study", "vbar_eps(t) convergence table");
    add_common(vbar_study, cli, true);
    auto* spaces = app.add_subcommand("spaces-check", "function-space invariant suite");
    add_common(spaces, cli, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return run_sample(cli);
        if (vbar->parsed()) return run_vbar(cli);
        if (corrector->parsed()) return run_corrector_cmd(cli);
        if (converge->parsed()) return run_converge(cli);
        if (moments->parsed()) return run_moments(cli);
        if (vbar_study->parsed()) return run_vbar_study_cmd(cli);
        if (spaces->parsed()) return run_spaces(cli);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
