#include "homoglab/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>

#include "homoglab/errors.hpp"
#include "homoglab/fftw_lock.hpp"
#include "homoglab/rng.hpp"

namespace homoglab {
namespace {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 8;
    while (p < n) p *= 2;
    return p;
}

// Signed torus lag: index j on a ring of size m -> j or j - m, whichever is
// closer to zero.
double signed_lag(std::size_t j, std::size_t m) {
    return j <= m / 2 ? static_cast<double>(j)
                      : static_cast<double>(j) - static_cast<double>(m);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct FftwBuffer {
    double* data = nullptr;
    explicit FftwBuffer(std::size_t n) {
        data = static_cast<double*>(fftw_malloc(n * sizeof(double)));
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct FftwComplexBuffer {
    fftw_complex* data = nullptr;
    explicit FftwComplexBuffer(std::size_t n) {
        data = static_cast<fftw_complex*>(fftw_malloc(n * sizeof(fftw_complex)));
        if (!data) throw std::bad_alloc();
    }
    ~FftwComplexBuffer() { fftw_free(data); }
    FftwComplexBuffer(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
};

// Cholesky of a small dense SPD matrix shifted by `shift` on the diagonal;
// returns false if a pivot goes negative.
bool cholesky_in_place(std::vector<double>& a, std::size_t n, double shift) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += shift;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (d < 0) return false;
        const double r = std::sqrt(d);
        a[j * n + j] = r;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = r > 0 ? s / r : 0.0;
        }
        for (std::size_t i = 0; i < j; ++i) a[i * n + j] = 0.0;
    }
    return true;
}

}  // namespace

double FieldRealization::at(double x, double t) const {
    const std::size_t nx = grid.nx(), nt = grid.nt();
    const double sx = (x - grid.x0) / grid.hx;
    const double st = (t - grid.t0) / grid.ht;
    if (sx < -1e-9 || sx > static_cast<double>(nx - 1) + 1e-9 || st < -1e-9 ||
        st > static_cast<double>(nt - 1) + 1e-9)
        throw validation_error("field: query outside sampled window");
    const double cx = std::clamp(sx, 0.0, static_cast<double>(nx - 1));
    const double ct = std::clamp(st, 0.0, static_cast<double>(nt - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(cx), nx - 2 + (nx == 1));
    const std::size_t j = std::min(static_cast<std::size_t>(ct), nt - 2 + (nt == 1));
    const double wx = cx - static_cast<double>(i);
    const double wt = ct - static_cast<double>(j);
    const std::size_t i1 = std::min(i + 1, nx - 1), j1 = std::min(j + 1, nt - 1);
    return (1 - wx) * (1 - wt) * value(i, j) + wx * (1 - wt) * value(i1, j) +
           (1 - wx) * wt * value(i, j1) + wx * wt * value(i1, j1);
}

void FieldRealization::validate() const {
    grid.validate();
    if (values.size() != grid.nx() * grid.nt())
        throw validation_error("field: value count does not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw validation_error("field: non-finite value");
}

GaussianFieldSampler::GaussianFieldSampler(const CovarianceModel& model, FieldGrid grid)
    : grid_(grid) {
    grid_.validate();
    const std::size_t nx = grid_.nx(), nt = grid_.nt();
    // Torus large enough that folded lags land where Phi is negligible.
    const double rx = model.spatial_range(), rt = model.temporal_range();
    const std::size_t pad_x =
        std::isfinite(rx) ? static_cast<std::size_t>(std::ceil(rx / grid_.hx)) : nx;
    const std::size_t pad_t =
        std::isfinite(rt) ? static_cast<std::size_t>(std::ceil(rt / grid_.ht)) : nt;
    mx_ = next_pow2(nx - 1 + pad_x + 1);
    mt_ = next_pow2(nt - 1 + pad_t + 1);
    provenance_ = model.describe();

    const std::size_t half = mt_ / 2 + 1;
    FftwBuffer cov(mx_ * mt_);
    FftwComplexBuffer spec(mx_ * half);
    for (std::size_t i = 0; i < mx_; ++i) {
        const double lx = signed_lag(i, mx_) * grid_.hx;
        for (std::size_t j = 0; j < mt_; ++j)
            cov.data[i * mt_ + j] = model.phi(lx, signed_lag(j, mt_) * grid_.ht);
    }
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_plan p = fftw_plan_dft_r2c_2d(static_cast<int>(mx_), static_cast<int>(mt_),
                                           cov.data, spec.data, FFTW_ESTIMATE);
        fftw_execute(p);
        fftw_destroy_plan(p);
    }

    const double phi0 = model.phi0();
    const double scale = static_cast<double>(mx_) * static_cast<double>(mt_);
    double neg = 0.0;
    sqrt_lambda_.assign(mx_ * half, 0.0);
    for (std::size_t i = 0; i < mx_; ++i) {
        for (std::size_t j = 0; j < half; ++j) {
            const double lam = spec.data[i * half + j][0];  // spectrum is real
            const double mult = (j == 0 || (mt_ % 2 == 0 && j == mt_ / 2)) ? 1.0 : 2.0;
            if (lam < 0) neg += mult * (-lam) / scale;
            sqrt_lambda_[i * half + j] = lam > 0 ? std::sqrt(lam) : 0.0;
        }
    }
    clipped_mass_ = phi0 > 0 ? neg / phi0 : neg;
    if (clipped_mass_ > 1e-6) {
        std::ostringstream os;
        os << "circulant embedding failed: negative spectral mass "
           << clipped_mass_ << " of Phi(0,0) exceeds 1e-6; enlarge the grid "
           << "or its padding (torus " << mx_ << "x" << mt_ << ")";
        throw embedding_error(os.str());
    }
    if (clipped_mass_ > 1e-12)  // rounding-level clipping is routine
        std::cerr << "[homoglab] warning: clipped negative embedding mass "
                  << clipped_mass_ << " of Phi(0,0)\n";

    // Plans are created once on template buffers; sample() re-runs them on
    // its own arrays (same fftw_malloc alignment), which is thread-safe.
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan_fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(mx_), static_cast<int>(mt_),
                                         cov.data, spec.data, FFTW_ESTIMATE);
        plan_bwd_ = fftw_plan_dft_c2r_2d(static_cast<int>(mx_), static_cast<int>(mt_),
                                         spec.data, cov.data, FFTW_ESTIMATE);
    }
}

GaussianFieldSampler::~GaussianFieldSampler() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

FieldRealization GaussianFieldSampler::sample(std::uint64_t seed) const {
    const std::size_t half = mt_ / 2 + 1;
    FftwBuffer work(mx_ * mt_);
    FftwComplexBuffer spec(mx_ * half);

    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < mx_ * mt_; ++k) work.data[k] = normal(engine);

    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), work.data, spec.data);
    for (std::size_t k = 0; k < mx_ * half; ++k) {
        const double s = sqrt_lambda_[k];
        spec.data[k][0] *= s;
        spec.data[k][1] *= s;
    }
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_), spec.data, work.data);

    // w = M^{-1} F^* (sqrt(lambda) . F e) has covariance M^{-1} F^* diag(lambda) F,
    // the embedding circulant; its leading block is the target covariance.
    const double inv = 1.0 / (static_cast<double>(mx_) * static_cast<double>(mt_));
    const std::size_t nx = grid_.nx(), nt = grid_.nt();
    FieldRealization out;
    out.grid = grid_;
    out.seed = seed;
    out.provenance = provenance_;
    out.values.resize(nx * nt);
    for (std::size_t j = 0; j < nt; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            out.values[j * nx + i] = work.data[i * mt_ + j] * inv;
    return out;
}

FieldRealization sample_gaussian_field(const CovarianceModel& model, FieldGrid grid,
                                       std::uint64_t seed) {
    return GaussianFieldSampler(model, grid).sample(seed);
}

FieldRealization sample_shot_noise_field(const ShotNoiseSpec& spec, FieldGrid grid,
                                         std::uint64_t seed, double padding_x,
                                         double padding_t) {
    grid.validate();
    spec.validate();
    const double need_x = spec.support_radius_x(), need_t = spec.support_radius_t();
    if (padding_x < 0) padding_x = need_x;
    if (padding_t < 0) padding_t = need_t;
    if (padding_x < need_x - 1e-12 || padding_t < need_t - 1e-12)
        throw validation_error(
            "shot noise: window padding smaller than the kernel support radius");

    const std::size_t nx = grid.nx(), nt = grid.nt();
    FieldRealization out;
    out.grid = grid;
    out.seed = seed;
    out.values.assign(nx * nt, 0.0);
    {
        std::ostringstream os;
        os << "shot_noise(" << spec.components.size() << " components)";
        out.provenance = os.str();
    }

    auto engine = make_engine(seed);
    auto bump = [](double u) {
        if (std::abs(u) >= 1.0) return 0.0;
        const double w = 1.0 - u * u;
        return w * w;
    };
    const double wx0 = grid.x0 - padding_x, wx1 = grid.x1 + padding_x;
    const double wt0 = grid.t0 - padding_t, wt1 = grid.t1 + padding_t;
    std::uniform_real_distribution<double> ux(wx0, wx1), ut(wt0, wt1);

    for (const auto& c : spec.components) {
        const double area = (wx1 - wx0) * (wt1 - wt0);
        std::poisson_distribution<long> pois(c.weight * area);
        const long count = pois(engine);
        for (long p = 0; p < count; ++p) {
            const double y = ux(engine), s = ut(engine);
            // Only grid points inside the kernel support see this atom.
            const auto lo_i = static_cast<long>(std::ceil((y - c.ry - grid.x0) / grid.hx));
            const auto hi_i = static_cast<long>(std::floor((y + c.ry - grid.x0) / grid.hx));
            const auto lo_j = static_cast<long>(std::ceil((s - c.rs - grid.t0) / grid.ht));
            const auto hi_j = static_cast<long>(std::floor((s + c.rs - grid.t0) / grid.ht));
            for (long j = std::max<long>(lo_j, 0);
                 j <= std::min<long>(hi_j, static_cast<long>(nt) - 1); ++j) {
                const double bt = bump((grid.t(static_cast<std::size_t>(j)) - s) / c.rs);
                if (bt == 0.0) continue;
                for (long i = std::max<long>(lo_i, 0);
                     i <= std::min<long>(hi_i, static_cast<long>(nx) - 1); ++i) {
                    const double bx = bump((grid.x(static_cast<std::size_t>(i)) - y) / c.ry);
                    out.values[static_cast<std::size_t>(j) * nx +
                               static_cast<std::size_t>(i)] += c.amplitude * bx * bt;
                }
            }
        }
    }
    return out;
}

std::vector<LagEstimate> empirical_covariance(
    const std::vector<FieldRealization>& realizations,
    const std::vector<std::pair<double, double>>& lags) {
    if (realizations.size() < 2)
        throw validation_error("empirical covariance: need at least 2 realizations");
    const FieldGrid& g = realizations.front().grid;
    const std::size_t nx = g.nx(), nt = g.nt();
    for (const auto& r : realizations) {
        if (r.grid.nx() != nx || r.grid.nt() != nt || r.grid.hx != g.hx ||
            r.grid.ht != g.ht || r.grid.x0 != g.x0 || r.grid.t0 != g.t0)
            throw validation_error("empirical covariance: realizations on different grids");
    }
    const std::size_t n = realizations.size();
    std::vector<LagEstimate> out;
    out.reserve(lags.size());
    for (const auto& [dx, dt] : lags) {
        const double si = dx / g.hx, sj = dt / g.ht;
        const auto di = static_cast<long>(std::llround(si));
        const auto dj = static_cast<long>(std::llround(sj));
        if (std::abs(si - static_cast<double>(di)) > 1e-9 ||
            std::abs(sj - static_cast<double>(dj)) > 1e-9)
            throw validation_error("empirical covariance: lag not a multiple of spacing");
        const auto adi = static_cast<std::size_t>(std::abs(di));
        const auto adj = static_cast<std::size_t>(std::abs(dj));
        if (adi >= nx || adj >= nt)
            throw validation_error("empirical covariance: lag beyond grid extent");

        // One estimate per realization, averaging over all admissible pairs;
        // jackknife over realizations.
        // Stationarity makes the signed lag equivalent to its mirror, so the
        // unsigned pair (i, i+|di|), (j, j+|dj|) is used for both signs.
        std::vector<double> per(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto& v = realizations[r].values;
            double acc = 0.0;
            std::size_t cnt = 0;
            for (std::size_t j = 0; j + adj < nt; ++j)
                for (std::size_t i = 0; i + adi < nx; ++i) {
                    acc += v[j * nx + i] * v[(j + adj) * nx + i + adi];
                    ++cnt;
                }
            per[r] = acc / static_cast<double>(cnt);
        }
        double mean = 0.0;
        for (double p : per) mean += p;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double p : per) var += (p - mean) * (p - mean);
        const double se =
            std::sqrt(var / (static_cast<double>(n) * static_cast<double>(n - 1)));
        out.push_back({dx, dt, mean, se});
    }
    return out;
}

FourPointResult four_point_check(const CovarianceModel& model,
                                 const std::array<std::pair<double, double>, 4>& points,
                                 std::size_t n_samples, std::uint64_t seed) {
    if (!model.gaussian_field())
        throw validation_error("four-point check: model does not describe a Gaussian field");
    if (n_samples < 2) throw validation_error("four-point check: need >= 2 samples");

    auto cov = [&](int a, int b) {
        return model.phi(points[static_cast<std::size_t>(a)].first -
                             points[static_cast<std::size_t>(b)].first,
                         points[static_cast<std::size_t>(a)].second -
                             points[static_cast<std::size_t>(b)].second);
    };
    std::vector<double> m(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m[static_cast<std::size_t>(a * 4 + b)] = cov(a, b);
    const double phi0 = model.phi0();
    if (!cholesky_in_place(m, 4, 1e-10 * (phi0 > 0 ? phi0 : 1.0)))
        throw numerical_error("four-point check: 4-point covariance not PSD");

    FourPointResult res;
    res.wick = cov(0, 2) * cov(1, 3) + cov(0, 3) * cov(1, 2);
    const double phi12_34 = cov(0, 1) * cov(2, 3);

    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        double g[4], v[4];
        for (auto& gi : g) gi = normal(engine);
        for (int a = 0; a < 4; ++a) {
            v[a] = 0.0;
            for (int b = 0; b <= a; ++b)
                v[a] += m[static_cast<std::size_t>(a * 4 + b)] * g[b];
        }
        const double prod = v[0] * v[1] * v[2] * v[3];
        sum += prod;
        sum2 += prod * prod;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    res.empirical = mean - phi12_34;
    res.std_error = std::sqrt(var / n);
    return res;
}

void check_covariance_psd(const CovarianceModel& model,
                          const std::vector<std::pair<double, double>>& points,
                          double tol) {
    const std::size_t n = points.size();
    if (n == 0) return;
    std::vector<double> m(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            m[a * n + b] = model.phi(points[a].first - points[b].first,
                                     points[a].second - points[b].second);
    const double phi0 = model.phi0();
    if (!cholesky_in_place(m, n, tol * (phi0 > 0 ? phi0 : 1.0)))
        throw numerical_error(
            "covariance matrix has eigenvalue below -tol * Phi(0,0)");
}

void write_field_csv(const FieldRealization& field, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw validation_error("cannot open output file: " + path);
    const FieldGrid& g = field.grid;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "# model=%016llx grid=[%.12g,%.12g]x[%.12g,%.12g] hx=%.12g ht=%.12g "
                  "seed=%llu",
                  static_cast<unsigned long long>(fnv1a(field.provenance)), g.x0, g.x1,
                  g.t0, g.t1, g.hx, g.ht,
                  static_cast<unsigned long long>(field.seed));
    os << buf << "\nx,t,value\n";
    for (std::size_t j = 0; j < g.nt(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", g.x(i), g.t(j),
                          field.value(i, j));
            os << buf;
        }
}

}  // namespace homoglab
