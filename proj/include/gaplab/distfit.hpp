#pragma once

// Rescaling of maximal gaps and Gumbel fitting of the rescaled values.

#include "gaplab/records.hpp"
#include "gaplab/trends.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gaplab {

enum class Rescaling { w, u, h, hbar };

Rescaling parse_rescaling(std::string_view name);

// w = (g - T(q,x)) / a(q,x)      k = 1, trend with b(q,x)
// u = same with b = log phi(q)   k = 1
// h = (g - T_c(x)) / a_c(x)
// hbar = (g - Tbar_c(x)) / abar_c(x)
// all evaluated at x = end of the gap. Throws DomainError for w/u when k != 1
// and when the trend is pre-asymptotic at x.
double rescale(std::uint64_t gap, std::uint64_t end, const DensityModel& model, Rescaling kind,
               const TrendParams& params = {});
double rescale(const GapRecord& record, const DensityModel& model, Rescaling kind,
               const TrendParams& params = {});

// All four values; NaN for the undefined ones instead of throwing.
Rescaled rescale_all(std::uint64_t gap, std::uint64_t end, const DensityModel& model,
                     const TrendParams& params);

struct GumbelFit {
    double alpha = 1.0;  // scale
    double mu = 0.0;     // mode
    double ks = 0.0;
    std::size_t n = 0;
};

double gumbel_cdf(double x, double alpha, double mu);
double gumbel_quantile(double u, double alpha, double mu);

// Method of moments: alpha = s sqrt(6) / pi, mu = mean - gamma alpha.
GumbelFit gumbel_moments_fit(std::span<const double> samples);

// Maximum likelihood. Newton iteration on the profile equation
//   alpha = mean(x) - sum x e^{-x/alpha} / sum e^{-x/alpha}
// started from the moments fit, then mu = -alpha log mean(e^{-x/alpha}).
// Throws InsufficientData for n < 8, DomainError for non-finite or all-equal
// samples and ConvergenceError when Newton stalls.
GumbelFit gumbel_fit(std::span<const double> samples);

// One-sample Kolmogorov–Smirnov distance sup |F_n - F|.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

struct HistogramBin {
    double center;
    std::size_t count;
    double density;
};

// Bins [origin + i w, origin + (i+1) w) covering the sample range, empty
// interior bins included. Density integrates to 1.
std::vector<HistogramBin> histogram(std::span<const double> samples, double bin_width,
                                    double origin = 0.0);

}  // namespace gaplab
