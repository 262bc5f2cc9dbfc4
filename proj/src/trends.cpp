#include "gaplab/trends.hpp"

#include "gaplab/analytic.hpp"
#include "gaplab/error.hpp"
#include "gaplab/totients.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaplab {

DensityModel DensityModel::make(const TuplePattern& pattern, std::uint64_t q) {
    if (pattern.k() > kMaxTupleSize) throw DomainError("patterns with k > 7 are not supported");
    const std::uint64_t phi = golubev_phi(pattern, q);
    if (phi == 0) throw DomainError("no residue class mod q is allowed for this pattern");
    return DensityModel{pattern, q, pattern.k(), static_cast<double>(phi), hl_constant_value(pattern)};
}

double avg_gap_below(const DensityModel& model, double x) {
    if (!(x >= 3.0)) throw DomainError("average gap needs x >= 3");
    return model.scale() * x / Li(x, model.k);
}

double avg_gap_near(const DensityModel& model, double x) {
    if (!(x >= 3.0)) throw DomainError("average gap needs x >= 3");
    return model.scale() * std::pow(std::log(x), model.k);
}

TrendValue lower_trend(const DensityModel& model, double x) {
    if (!(x >= 3.0)) return {0.0, true};
    const double count = Li(x, model.k) / model.scale();
    if (count <= 1.0) return {0.0, true};
    return {avg_gap_below(model, x) * std::log(count), false};
}

TrendValue upper_trend(const DensityModel& model, double x) {
    if (!(x >= 3.0)) return {0.0, true};
    const double abar = avg_gap_near(model, x);
    if (x <= abar) return {0.0, true};
    return {abar * std::log(x / abar), false};
}

double cramer_line(const DensityModel& model, double x) {
    return model.scale() * std::pow(std::log(x), model.k + 1);
}

double trend_correction(std::uint64_t q, double x, const TrendParams& params) {
    const double loglog = std::log(std::log(x));
    return (params.b0 + params.b1 / std::pow(std::max(2.0, loglog), params.b2)) *
           std::log(static_cast<double>(euler_phi(q)));
}

double avg_gap_k1(std::uint64_t q, double x) {
    return static_cast<double>(euler_phi(q)) * x / li(x);
}

TrendValue trend_k1(std::uint64_t q, double x, const TrendParams& params) {
    if (!(x >= 10.0)) throw DomainError("trend_k1 needs x >= 10");
    const double phi = static_cast<double>(euler_phi(q));
    const double li_x = li(x);
    if (li_x <= phi) return {0.0, true};
    const double bracket = 2.0 * std::log(li_x / phi) - std::log(x) + trend_correction(q, x, params);
    return {phi * x / li_x * bracket, false};
}

namespace {

// Start of the last run of grid points where `settled` holds, refined by bisection.
template <class Pred>
double last_onset(Pred settled) {
    // x / log^k x dips below abar around e^k even when small x is settled,
    // so look for the last unsettled point on a geometric grid.
    constexpr double kStep = 1.05, kTop = 1e30;
    double last_bad = 0.0;
    for (double x = 3.0; x < kTop; x *= kStep)
        if (!settled(x)) last_bad = x;
    if (last_bad == 0.0) return 3.0;
    if (last_bad * kStep >= kTop) throw DomainError("trend never leaves its pre-asymptotic region");
    double lo = last_bad, hi = last_bad * kStep;
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        (settled(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

double asymptotic_onset(const DensityModel& model) {
    return last_onset([&](double x) {
        return !lower_trend(model, x).pre_asymptotic && !upper_trend(model, x).pre_asymptotic;
    });
}

double ordering_onset(const DensityModel& model) {
    return last_onset([&](double x) {
        const auto lower = lower_trend(model, x), upper = upper_trend(model, x);
        if (lower.pre_asymptotic || upper.pre_asymptotic) return false;
        return avg_gap_below(model, x) < avg_gap_near(model, x) && lower.value < upper.value &&
               upper.value < cramer_line(model, x);
    });
}

// ---------------------------------------------------------------------------
// tau model
// ---------------------------------------------------------------------------

TauTable tau_tabulate(const ClassSpec& spec, std::uint64_t x) {
    if (spec.pattern.k() != 1) throw DomainError("tau tables are defined for k = 1 only");
    require_allowed(spec);
    TauTable table;
    table.q = spec.q;
    table.r = spec.r;
    table.x = x;
    table.c = std::lcm<std::uint64_t>(2, spec.q);
    std::uint64_t prev = 0;
    for_each_in_sequence(spec, 1, x, [&](std::uint64_t p) {
        ++table.count;
        if (prev == 0) {
            table.first = p;
        } else {
            ++table.buckets[p - prev];
        }
        prev = p;
    });
    table.last = prev;
    return table;
}

TauFit fit_exponential_decay(std::span<const TauPoint> points) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t used = 0;
    for (const auto& pt : points) {
        if (pt.count < 3.0) continue;
        const double w = pt.count, y = std::log(pt.count);
        sw += w;
        sx += w * pt.d;
        sy += w * y;
        sxx += w * pt.d * pt.d;
        sxy += w * pt.d * y;
        ++used;
    }
    if (used < 3) throw InsufficientData("tau fit needs at least three buckets with count >= 3");
    const double mx = sx / sw, my = sy / sw;
    const double var = sxx / sw - mx * mx;
    if (!(var > 0)) throw InsufficientData("tau fit needs distinct gap sizes");
    const double slope = (sxy / sw - mx * my) / var;
    TauFit fit;
    fit.A = -slope;
    fit.B = std::exp(my - slope * mx);
    fit.buckets_used = used;
    double proxy_sum = 0;
    for (const auto& pt : points)
        if (pt.count >= 3.0) proxy_sum += pt.count / (fit.B * std::exp(-fit.A * pt.d));
    fit.s_hat = proxy_sum / static_cast<double>(used);
    return fit;
}

TauFit tau_fit(const TauTable& table) {
    std::vector<TauPoint> points;
    for (auto [d, n] : table.buckets)
        if (n > 0) points.push_back({static_cast<double>(d), static_cast<double>(n)});
    if (points.size() < 5) throw InsufficientData("tau fit needs at least five nonzero buckets");
    return fit_exponential_decay(points);
}

TauReport tau_model_check(const TauTable& table) {
    TauReport report;
    report.fit = table.fit ? *table.fit : tau_fit(table);
    const double pi = static_cast<double>(table.count);
    const double x = static_cast<double>(table.x);
    report.A_predicted = pi / x;
    report.A_rel_error = std::fabs(report.fit.A / report.A_predicted - 1.0);
    report.sB_predicted = static_cast<double>(table.c) * pi * pi / x;
    report.sB_rel_error = std::fabs(report.fit.B / report.sB_predicted - 1.0);
    std::uint64_t gaps = 0, length = 0;
    for (auto [d, n] : table.buckets) {
        gaps += n;
        length += d * n;
    }
    report.count_identity = table.count > 0 && gaps == table.count - 1;
    report.length_identity = table.count > 0 && length == table.last - table.first;
    return report;
}

double predict_G_k1(std::uint64_t q, std::uint64_t r, double x, PredictionMode mode) {
    if (!(x >= 100.0)) throw DomainError("predict_G_k1 needs x >= 100");
    const ClassSpec spec(q, r);
    require_allowed(spec);
    double pi = 0;
    if (mode == PredictionMode::empirical) {
        pi = static_cast<double>(count_sequence(spec, static_cast<std::uint64_t>(x)));
        if (pi < 1) throw InsufficientData("class has no primes below x");
    } else {
        pi = li(x) / static_cast<double>(euler_phi(q));
    }
    const double c = static_cast<double>(std::lcm<std::uint64_t>(2, q));
    return x / pi * (std::log(pi * pi / x) + std::log(c));
}

}  // namespace gaplab
