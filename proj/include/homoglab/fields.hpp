#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "homoglab/covariance.hpp"
#include "homoglab/grid.hpp"

namespace homoglab {

// One sampled space-time field on a uniform grid.  Values are stored
// row-major in time: values[j * nx + i] = V(x_i, t_j).
struct FieldRealization {
    FieldGrid grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string provenance;

    double value(std::size_t i, std::size_t j) const { return values[j * grid.nx() + i]; }

    // Bilinear interpolation; queries must stay inside the grid.
    double at(double x, double t) const;

    void validate() const;
};

// Exact stationary Gaussian sampling by 2-D circulant embedding.  The
// embedding torus extends the grid by the declared covariance range so the
// wrapped covariance matches Phi at every lag the grid can see; its spectrum
// is computed once per (model, grid) and reused across realizations.
class GaussianFieldSampler {
  public:
    // Throws embedding_error when the clipped negative spectral mass exceeds
    // 1e-6 * Phi(0,0); smaller negative eigenvalues are clipped to zero with
    // a warning on stderr.
    GaussianFieldSampler(const CovarianceModel& model, FieldGrid grid);
    ~GaussianFieldSampler();

    GaussianFieldSampler(const GaussianFieldSampler&) = delete;
    GaussianFieldSampler& operator=(const GaussianFieldSampler&) = delete;

    FieldRealization sample(std::uint64_t seed) const;

    std::size_t embedding_nx() const { return mx_; }
    std::size_t embedding_nt() const { return mt_; }
    // Clipped negative spectral mass, in units of Phi(0,0).
    double clipped_negative_mass() const { return clipped_mass_; }

  private:
    FieldGrid grid_;
    std::size_t mx_ = 0, mt_ = 0;
    std::vector<double> sqrt_lambda_;  // half spectrum, mx * (mt/2 + 1)
    double clipped_mass_ = 0.0;
    std::string provenance_;
    void* plan_fwd_ = nullptr;  // fftw_plan, opaque here
    void* plan_bwd_ = nullptr;
};

FieldRealization sample_gaussian_field(const CovarianceModel& model, FieldGrid grid,
                                       std::uint64_t seed);

// Shot-noise field over a Poisson cloud on the grid window padded by
// `padding_x/t` (default: exactly the kernel support radius, so every grid
// point sees the full cloud).  Padding below the support radius is an error.
FieldRealization sample_shot_noise_field(const ShotNoiseSpec& spec, FieldGrid grid,
                                         std::uint64_t seed, double padding_x = -1.0,
                                         double padding_t = -1.0);

struct LagEstimate {
    double dx = 0, dt = 0;
    double estimate = 0;
    double std_error = 0;
};

// Unbiased lag-covariance estimates with jackknife standard errors over
// realizations.  Lags must be multiples of the grid spacings and fit inside
// the grid; fewer than two realizations is an error.
std::vector<LagEstimate> empirical_covariance(
    const std::vector<FieldRealization>& realizations,
    const std::vector<std::pair<double, double>>& lags);

struct FourPointResult {
    double wick = 0;       // Phi13 Phi24 + Phi14 Phi23
    double empirical = 0;  // sample estimate of E V1 V2 V3 V4 - Phi12 Phi34
    double std_error = 0;
};

// Wick fourth-moment check at four space-time points, sampling the 4-point
// Gaussian marginal directly (Cholesky of the 4x4 covariance).  Non-Gaussian
// models are unsupported.
FourPointResult four_point_check(const CovarianceModel& model,
                                 const std::array<std::pair<double, double>, 4>& points,
                                 std::size_t n_samples, std::uint64_t seed);

// Asserts the covariance matrix over the given points has minimum eigenvalue
// >= -tol * Phi(0,0) (via Cholesky of the shifted matrix); throws otherwise.
void check_covariance_psd(const CovarianceModel& model,
                          const std::vector<std::pair<double, double>>& points,
                          double tol = 1e-8);

// CSV with a one-line header (model hash, grid, seed) then x,t,value rows.
void write_field_csv(const FieldRealization& field, const std::string& path);

}  // namespace homoglab
