#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "homoglab/covariance.hpp"

namespace homoglab {

// Flat key/value view of a TOML-style config file: [section] headers prefix
// keys with "section.", values are strings, numbers, booleans, or arrays of
// numbers; '#' starts a comment.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& def) const;

    // Overrides a key (CLI flags beat file values).
    void set(const std::string& key, const std::string& value);

  private:
    std::map<std::string, std::string> raw_;
};

// Experiment description shared by the study subcommands.
struct ExperimentConfig {
    std::shared_ptr<CovarianceModel> model;
    double alpha = 1.0;
    std::vector<double> eps_ladder = {0.25, 0.125, 0.0625, 0.03125};
    double horizon = 1.0;
    double window_x = 2.0;   // observation window [-window_x, window_x]
    double window_t0 = 0.1;  // ... x [window_t0, horizon]
    std::size_t realizations = 50;
    std::uint64_t seed = 1;
    double domain_L = 4.0;
    double points_per_corr = 8.0;
    std::vector<double> t_values = {1.0, 2.0, 4.0};  // vbar_eps study times
    int threads = 1;
    std::string out_dir = ".";

    static ExperimentConfig from(const Config& cfg);
    void validate() const;
};

// Builds the covariance model described under [model].
std::shared_ptr<CovarianceModel> model_from_config(const Config& cfg);

}  // namespace homoglab
