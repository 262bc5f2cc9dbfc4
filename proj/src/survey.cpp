#include "gaplab/survey.hpp"

#include "gaplab/analytic.hpp"
#include "gaplab/error.hpp"
#include "gaplab/totients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gaplab {

std::size_t interval_index(std::uint64_t end) {
    if (end < 1) throw DomainError("interval_index: end must be positive");
    return static_cast<std::size_t>(std::floor(std::log(static_cast<double>(end))));
}

SurveyTable run_survey(std::uint64_t q, const TuplePattern& pattern, std::uint64_t limit,
                       unsigned workers) {
    if (q < 2) throw DomainError("survey modulus must be at least 2");
    SurveyTable table;
    table.q = q;
    table.pattern = pattern;
    table.limit = limit;
    table.phi = golubev_phi(pattern, q);

    const std::size_t buckets = limit >= 1 ? interval_index(limit) + 1 : 0;
    table.counts.assign(buckets, 0);
    table.means.assign(buckets, 0.0);
    table.complete.assign(buckets, false);
    for (std::size_t j = 0; j < buckets; ++j)
        table.complete[j] = std::exp(static_cast<double>(j + 1)) <= static_cast<double>(limit);
    if (table.phi == 0) return table;

    const std::uint64_t moduli[] = {q};
    ScanOptions options;
    options.workers = workers;
    auto scanned = scan_moduli(pattern, moduli, limit, options);
    table.residues = std::move(scanned.front().residues);
    table.records = std::move(scanned.front().records);

    for (const auto& recs : table.records)
        for (const auto& rec : recs) ++table.counts[interval_index(rec.end)];
    for (std::size_t j = 0; j < buckets; ++j)
        table.means[j] = static_cast<double>(table.counts[j]) / static_cast<double>(table.phi);
    return table;
}

namespace {

struct Linear {
    double asymptote, kappa, rss;
};

// Best linear parameters for a given delta.
Linear solve_linear(std::span<const MeanPoint> pts, double delta, std::optional<double> asymptote) {
    const double n = static_cast<double>(pts.size());
    if (asymptote) {
        double sxy = 0, sxx = 0;
        for (const auto& p : pts) {
            const double x = 1.0 / (p.j + delta);
            sxy += x * (*asymptote - p.mean);
            sxx += x * x;
        }
        const double kappa = sxy / sxx;
        double rss = 0;
        for (const auto& p : pts) {
            const double e = p.mean - (*asymptote - kappa / (p.j + delta));
            rss += e * e;
        }
        return {*asymptote, kappa, rss};
    }
    // mean = L - kappa x
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double x = 1.0 / (p.j + delta);
        sx += x;
        sy += p.mean;
        sxx += x * x;
        sxy += x * p.mean;
    }
    const double var = sxx - sx * sx / n;
    const double slope = var > 0 ? (sxy - sx * sy / n) / var : 0.0;
    const double L = (sy - slope * sx) / n;
    double rss = 0;
    for (const auto& p : pts) {
        const double e = p.mean - (L + slope / (p.j + delta));
        rss += e * e;
    }
    return {L, -slope, rss};
}

double residual_sum(std::span<const MeanPoint> pts, double L, double kappa, double delta) {
    double rss = 0;
    for (const auto& p : pts) {
        const double e = p.mean - (L - kappa / (p.j + delta));
        rss += e * e;
    }
    return rss;
}

}  // namespace

HyperbolaFit fit_hyperbola(std::span<const MeanPoint> points, std::optional<double> asymptote) {
    if (points.size() < 4) throw InsufficientData("hyperbola fit needs at least four points");
    double j_min = points.front().j;
    for (const auto& p : points) j_min = std::min(j_min, p.j);

    // delta = -j_min + e^t keeps every j + delta positive.
    HyperbolaFit best;
    best.rss = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
        const double t = -7.0 + 17.0 * i / 4000.0;
        const double delta = -j_min + std::exp(t);
        const Linear lin = solve_linear(points, delta, asymptote);
        if (lin.rss < best.rss) best = {lin.asymptote, lin.kappa, delta, lin.rss, points.size()};
    }

    // Gauss–Newton on (L, kappa, delta) with step halving.
    const bool free_L = !asymptote.has_value();
    double L = best.asymptote, kappa = best.kappa, delta = best.delta, rss = best.rss;
    for (int iter = 0; iter < 100; ++iter) {
        // Normal equations J^T J step = J^T e, J = d model / d params.
        std::array<std::array<double, 3>, 3> A{};
        std::array<double, 3> b{};
        for (const auto& p : points) {
            const double x = 1.0 / (p.j + delta);
            const double e = p.mean - (L - kappa * x);
            const std::array<double, 3> g{1.0, -x, kappa * x * x};
            for (int r = 0; r < 3; ++r) {
                b[r] += g[r] * e;
                for (int c = 0; c < 3; ++c) A[r][c] += g[r] * g[c];
            }
        }
        const int first = free_L ? 0 : 1;
        const int dim = 3 - first;
        // Solve the dim x dim system by Gaussian elimination.
        std::array<std::array<double, 4>, 3> M{};
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) M[r][c] = A[r + first][c + first];
            M[r][dim] = b[r + first];
        }
        bool singular = false;
        for (int c = 0; c < dim && !singular; ++c) {
            int pivot = c;
            for (int r = c + 1; r < dim; ++r)
                if (std::fabs(M[r][c]) > std::fabs(M[pivot][c])) pivot = r;
            if (std::fabs(M[pivot][c]) < 1e-300) {
                singular = true;
                break;
            }
            std::swap(M[c], M[pivot]);
            for (int r = 0; r < dim; ++r) {
                if (r == c) continue;
                const double f = M[r][c] / M[c][c];
                for (int cc = c; cc <= dim; ++cc) M[r][cc] -= f * M[c][cc];
            }
        }
        if (singular) break;
        std::array<double, 3> step{};
        for (int r = 0; r < dim; ++r) step[r + first] = M[r][dim] / M[r][r];

        double scale = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h, scale *= 0.5) {
            const double nL = L + scale * step[0], nk = kappa + scale * step[1], nd = delta + scale * step[2];
            if (nd + j_min <= 0) continue;
            const double nr = residual_sum(points, nL, nk, nd);
            if (nr < rss) {
                const double change = std::fabs(rss - nr);
                L = nL, kappa = nk, delta = nd, rss = nr;
                improved = change > 1e-30 + 1e-15 * rss;
                break;
            }
        }
        if (!improved) break;
    }
    return {L, kappa, delta, rss, points.size()};
}

HyperbolaFit hyperbola_fit(const SurveyTable& table, bool free_asymptote) {
    std::vector<MeanPoint> pts;
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < table.means.size(); ++j) {
        if (!(table.means[j] > 0)) continue;
        if (nonzero++ < 3) continue;
        if (!table.complete[j]) continue;
        pts.push_back({static_cast<double>(j), table.means[j]});
    }
    if (pts.size() < 4)
        throw InsufficientData("hyperbola fit needs four complete nonzero intervals past the transition region");
    std::optional<double> asymptote;
    if (!free_asymptote) asymptote = table.pattern.k() + 1.0;
    return fit_hyperbola(pts, asymptote);
}

NEstimates n_estimates(std::uint64_t q, const TuplePattern& pattern, double x) {
    if (!(x >= 2.0)) throw DomainError("n_estimates needs x >= 2");
    const double li_x = li(x);
    NEstimates out;
    out.asymptotic = (pattern.k() + 1) * std::log(x);
    out.records_2loglix = 2.0 * std::log(li_x);
    out.rough = pattern.k() == 1
                    ? std::max(0.0, 2.0 * std::log(li_x / static_cast<double>(euler_phi(q))))
                    : std::numeric_limits<double>::quiet_NaN();
    return out;
}

std::vector<double> pooled_rescaled(const SurveyTable& table, Rescaling kind, const TrendParams& params) {
    std::vector<double> out;
    if (table.phi == 0) return out;
    if ((kind == Rescaling::w || kind == Rescaling::u) && table.pattern.k() != 1)
        throw DomainError("w and u rescalings are defined for k = 1 only");
    const DensityModel model = DensityModel::make(table.pattern, table.q);
    for (const auto& recs : table.records)
        for (const auto& rec : recs) {
            try {
                out.push_back(rescale(rec, model, kind, params));
            } catch (const DomainError&) {
            }
        }
    return out;
}

}  // namespace gaplab
