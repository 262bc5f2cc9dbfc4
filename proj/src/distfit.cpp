#include "gaplab/distfit.hpp"

#include "gaplab/analytic.hpp"
#include "gaplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace gaplab {

Rescaling parse_rescaling(std::string_view name) {
    if (name == "w") return Rescaling::w;
    if (name == "u") return Rescaling::u;
    if (name == "h") return Rescaling::h;
    if (name == "hbar") return Rescaling::hbar;
    throw DomainError("unknown rescaling '" + std::string(name) + "'");
}

double rescale(std::uint64_t gap, std::uint64_t end, const DensityModel& model, Rescaling kind,
               const TrendParams& params) {
    const double x = static_cast<double>(end);
    const double g = static_cast<double>(gap);
    TrendValue trend;
    double unit = 0.0;
    switch (kind) {
        case Rescaling::w:
        case Rescaling::u: {
            if (model.k != 1) throw DomainError("w and u rescalings are defined for k = 1 only");
            if (x < 10.0) throw DomainError("pre-asymptotic: gap ends below 10");
            const TrendParams effective = kind == Rescaling::w ? params : TrendParams{1.0, 0.0, 1.0};
            trend = trend_k1(model.q, x, effective);
            unit = avg_gap_k1(model.q, x);
            break;
        }
        case Rescaling::h:
            trend = lower_trend(model, x);
            if (!trend.pre_asymptotic) unit = avg_gap_below(model, x);
            break;
        case Rescaling::hbar:
            trend = upper_trend(model, x);
            if (!trend.pre_asymptotic) unit = avg_gap_near(model, x);
            break;
    }
    if (trend.pre_asymptotic) throw DomainError("pre-asymptotic: trend undefined at end of gap");
    return (g - trend.value) / unit;
}

double rescale(const GapRecord& record, const DensityModel& model, Rescaling kind,
               const TrendParams& params) {
    return rescale(record.gap, record.end, model, kind, params);
}

Rescaled rescale_all(std::uint64_t gap, std::uint64_t end, const DensityModel& model,
                     const TrendParams& params) {
    auto value = [&](Rescaling kind) {
        try {
            return rescale(gap, end, model, kind, params);
        } catch (const DomainError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    return {value(Rescaling::w), value(Rescaling::u), value(Rescaling::h), value(Rescaling::hbar)};
}

double gumbel_cdf(double x, double alpha, double mu) { return std::exp(-std::exp(-(x - mu) / alpha)); }

double gumbel_quantile(double u, double alpha, double mu) { return mu - alpha * std::log(-std::log(u)); }

namespace {

struct Moments {
    double mean;
    double sd;
};

Moments moments(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

void validate(std::span<const double> samples) {
    if (samples.size() < 8) throw InsufficientData("Gumbel fit needs at least 8 samples");
    for (double x : samples)
        if (!std::isfinite(x)) throw DomainError("Gumbel fit: samples must be finite");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (*lo == *hi) throw DomainError("Gumbel fit: degenerate sample (all values equal)");
}

}  // namespace

GumbelFit gumbel_moments_fit(std::span<const double> samples) {
    validate(samples);
    const auto m = moments(samples);
    GumbelFit fit;
    fit.alpha = m.sd * std::sqrt(6.0) / std::numbers::pi;
    fit.mu = m.mean - static_cast<double>(kEulerGamma) * fit.alpha;
    fit.n = samples.size();
    fit.ks = ks_statistic(samples, [&](double x) { return gumbel_cdf(x, fit.alpha, fit.mu); });
    return fit;
}

GumbelFit gumbel_fit(std::span<const double> samples) {
    validate(samples);
    // Fit the standardized sample so the iteration is scale free.
    const auto m = moments(samples);
    std::vector<double> z(samples.size());
    std::transform(samples.begin(), samples.end(), z.begin(),
                   [&](double x) { return (x - m.mean) / m.sd; });
    const double z_min = *std::min_element(z.begin(), z.end());

    // Weighted mean and variance of z under weights e^{-z/alpha}.
    struct Weighted {
        double sum_w, mean, var;
    };
    auto weighted = [&](double alpha) {
        double sw = 0, swz = 0, swzz = 0;
        for (double v : z) {
            const double w = std::exp(-(v - z_min) / alpha);
            sw += w;
            swz += w * v;
            swzz += w * v * v;
        }
        const double mean = swz / sw;
        return Weighted{sw, mean, std::max(0.0, swzz / sw - mean * mean)};
    };
    const double z_mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());

    double alpha = std::sqrt(6.0) / std::numbers::pi;  // moments estimate of standardized data
    bool converged = false;
    int iter = 0;
    for (; iter < 200; ++iter) {
        const auto w = weighted(alpha);
        const double g = alpha - z_mean + w.mean;
        const double dg = 1.0 + w.var / (alpha * alpha);
        double step = g / dg;
        double next = alpha - step;
        while (next <= 0.0) {
            step *= 0.5;
            next = alpha - step;
        }
        const double change = std::fabs(next - alpha);
        alpha = next;
        if (change <= 1e-14 * alpha) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("Gumbel MLE did not converge after " + std::to_string(iter) +
                               " iterations (alpha=" + std::to_string(alpha) + ")");
    const auto w = weighted(alpha);
    const double mu_z = z_min - alpha * std::log(w.sum_w / static_cast<double>(z.size()));

    GumbelFit fit;
    fit.alpha = alpha * m.sd;
    fit.mu = mu_z * m.sd + m.mean;
    fit.n = samples.size();
    fit.ks = ks_statistic(samples, [&](double x) { return gumbel_cdf(x, fit.alpha, fit.mu); });
    return fit;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InsufficientData("KS statistic of an empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return std::clamp(d, 0.0, 1.0);
}

std::vector<HistogramBin> histogram(std::span<const double> samples, double bin_width, double origin) {
    if (!(bin_width > 0.0)) throw DomainError("histogram: bin width must be positive");
    std::vector<HistogramBin> bins;
    if (samples.empty()) return bins;
    auto index = [&](double x) { return static_cast<long long>(std::floor((x - origin) / bin_width)); };
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    const long long first = index(*lo), last = index(*hi);
    std::vector<std::size_t> counts(static_cast<std::size_t>(last - first + 1), 0);
    for (double x : samples) ++counts[static_cast<std::size_t>(index(x) - first)];
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double left = origin + static_cast<double>(first + static_cast<long long>(i)) * bin_width;
        bins.push_back({left + 0.5 * bin_width, counts[i], static_cast<double>(counts[i]) / (n * bin_width)});
    }
    return bins;
}

}  // namespace gaplab
