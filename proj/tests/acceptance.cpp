// Acceptance gate: one PASS/FAIL line per criterion.

#include "gaplab/analytic.hpp"
#include "gaplab/cli.hpp"
#include "gaplab/distfit.hpp"
#include "gaplab/records.hpp"
#include "gaplab/survey.hpp"
#include "gaplab/totients.hpp"
#include "gaplab/trends.hpp"
#include "oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

using namespace gaplab;
namespace fs = std::filesystem;

namespace {

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome result;
    try {
        result = body();
    } catch (const std::exception& e) {
        result = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !result.pass;
    std::cout << fmt::format("[{}] {:2d} {}: {} ({:.1f}s)", result.pass ? "PASS" : "FAIL", id, title, result.detail,
                             secs)
              << std::endl;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1
Outcome table_rows() {
    struct Row {
        std::uint64_t q, r, limit, gap, start, end;
        double ratio;
    };
    const Row rows[] = {
        {1605, 341, 3700000, 208650, 3415781, 3624431, 1.0786589153},
        {2005, 801, 1100000, 316790, 726611, 1043401, 1.0309808771},
        {2283, 280, 900000000, 657504, 896016139, 896673643, 1.0179389550},
    };
    bool ok = true;
    std::string detail;
    for (const auto& row : rows) {
        const auto recs = scan_records(ClassSpec(row.q, row.r), row.limit);
        const auto model = DensityModel::make(TuplePattern(), row.q);
        const GapRecord* hit = nullptr;
        for (const auto& rec : recs)
            if (rec.gap == row.gap) hit = &rec;
        if (!hit || hit->start != row.start || hit->end != row.end) {
            ok = false;
            detail += fmt::format("q={} record missing; ", row.q);
            continue;
        }
        const double ratio = double(hit->gap) / cramer_threshold(model, hit->end);
        const bool row_ok = std::fabs(ratio - row.ratio) <= 5e-10;
        ok &= row_ok;
        detail += fmt::format("q={} r={} ({},{},{}) ratio={:.10f}; ", row.q, row.r, hit->gap, hit->start, hit->end,
                              ratio);
    }
    return {ok, detail};
}

// 2
Outcome exception_absence() {
    ScanOptions options;
    options.workers = worker_count();
    const auto found = find_exceptions(TuplePattern(), 2, 300, 100000000, options);
    std::string detail = fmt::format("{} exceptional gaps for q in [2,300], p < 1e8", found.size());
    if (!found.empty())
        detail += fmt::format(" (first q={} r={} gap={} ratio={})", found[0].record.q, found[0].record.r,
                              found[0].record.gap, found[0].ratio);
    return {found.empty(), detail};
}

// 3
Outcome hl_constants() {
    const std::pair<const char*, double> expected[] = {
        {"twin", 1.32032363169373914785562422},     {"triplet-a", 2.85824859571922043243013466},
        {"quad", 4.15118086323741575716528556},     {"quint-a", 10.131794949996079843988427},
        {"sext", 17.2986123115848886061221077},     {"sept-a", 53.9719483001296523960730291},
    };
    bool ok = true;
    double worst = 0;
    for (const auto& [name, value] : expected) {
        const auto c = hl_constant(TuplePattern::parse(name), 100000000);
        const double err = std::fabs(c.value / value - 1.0);
        worst = std::max(worst, err);
        ok &= err <= 1e-6;
    }
    return {ok, fmt::format("C2..C7 at bound 1e8, worst relative error {:.2e}", worst)};
}

// 4
Outcome totients() {
    std::uint64_t mismatches = 0;
    for (const auto& np : builtin_patterns()) {
        if (np.pattern.k() == 1) continue;
        for (std::uint64_t q = 1; q <= 10000; ++q)
            mismatches += golubev_phi(np.pattern, q) != golubev_phi_by_definition(np.pattern, q);
    }
    const auto quad = TuplePattern::parse("quad");
    const bool example = golubev_phi(quad, 30) == 1 && allowed_residues(quad, 30) == std::vector<std::uint64_t>{11};
    return {mismatches == 0 && example,
            fmt::format("{} mismatches over q <= 1e4 and nine patterns; phi_4(30)=1 with {{11}}: {}", mismatches,
                        example ? "yes" : "no")};
}

// 5
Outcome special_functions() {
    const double li2 = li(2.0);
    bool ok = std::fabs(li2 - 1.0451637801) < 5e-11;
    double worst = 0;
    using boost::math::quadrature::gauss_kronrod;
    for (int k = 1; k <= 7; ++k)
        for (int i = 0; i <= 22; ++i) {
            const long double x = std::pow(10.0L, 1.0L + 0.5L * i);
            // t = e^s
            auto f = [k](long double s) { return std::exp(s) / std::pow(s, k); };
            long double sum = 0;
            const long double a = std::log(2.0L), b = std::log(x);
            const int pieces = static_cast<int>(std::ceil(b - a));
            for (int j = 0; j < pieces; ++j) {
                const long double lo = a + (b - a) * j / pieces, hi = a + (b - a) * (j + 1) / pieces;
                sum += gauss_kronrod<long double, 61>::integrate(f, lo, hi, 15, 1e-15L);
            }
            const double err = std::fabs(Li(static_cast<double>(x), k) / static_cast<double>(sum) - 1.0);
            worst = std::max(worst, err);
        }
    ok &= worst <= 1e-9;
    return {ok, fmt::format("li(2)={:.12f}; Li_k vs adaptive quadrature, worst relative error {:.2e}", li2, worst)};
}

// 6
Outcome oracle_equivalence() {
    std::mt19937_64 rng(606);
    const char* names[] = {"k1", "twin", "triplet-a", "triplet-b", "quad"};
    int specs = 0, mismatches = 0, skip_mismatches = 0;
    while (specs < 50) {
        const std::uint64_t q = 2 + rng() % 49, r = 1 + rng() % q;
        const ClassSpec spec(q, r, TuplePattern::parse(names[rng() % 5]));
        if (!spec.h_allowed()) continue;
        ++specs;
        const std::uint64_t limit = 10000 + rng() % 990001;
        const auto recs = scan_records(spec, limit);
        mismatches += !oracle::same(recs, oracle::records(spec, limit));
        skip_mismatches += !oracle::same(recs, scan_records(spec, limit, std::nullopt, ScanMode::skip_ahead));
    }
    return {mismatches == 0 && skip_mismatches == 0,
            fmt::format("{} specs, {} oracle mismatches, {} skip-ahead mismatches", specs, mismatches,
                        skip_mismatches)};
}

// 7
Outcome tau_model() {
    std::mt19937_64 rng(707);
    int classes = 0, broken = 0;
    while (classes < 20) {
        const std::uint64_t q = 2 + rng() % 99, r = 1 + rng() % q;
        const ClassSpec spec(q, r);
        if (!spec.h_allowed()) continue;
        ++classes;
        const auto table = tau_tabulate(spec, 10000000);
        std::uint64_t total = 0, length = 0;
        for (auto [d, n] : table.buckets) {
            total += n;
            length += d * n;
        }
        const auto members = count_sequence(spec, 10000000);
        const auto all = iter_sequence(spec, 1, 10000000);
        broken += total != members - 1 || length != all.back() - all.front();
    }
    const auto report = tau_model_check(tau_tabulate(ClassSpec(2, 1), 100000000));
    const bool ok = broken == 0 && report.A_rel_error <= 0.25;
    return {ok, fmt::format("{} classes, {} identity failures; q=2 x=1e8 A={:.5g} vs pi/x={:.5g} ({:.1f}% off)",
                            classes, broken, report.fit.A, report.A_predicted, 100 * report.A_rel_error)};
}

// 8
Outcome distribution_fit() {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double alpha = 1.3, mu = -0.4;
    std::vector<double> xs;
    while (xs.size() < 10000) {
        const double u = unit(rng);
        if (u > 0) xs.push_back(gumbel_quantile(u, alpha, mu));
    }
    const auto synth = gumbel_fit(xs);
    const bool synth_ok = std::fabs(synth.alpha / alpha - 1.0) <= 0.05 && std::fabs(synth.mu - mu) <= 0.05 * alpha;

    const auto table = run_survey(1009, TuplePattern(), 100000000, worker_count());
    const auto w = pooled_rescaled(table, Rescaling::w);
    const auto fit = gumbel_fit(w);
    const bool pooled_ok = fit.ks <= 0.05;
    return {synth_ok && pooled_ok,
            fmt::format("synthetic alpha={:.4f} mu={:.4f}; pooled w (n={}) alpha={:.4f} mu={:.4f} KS={:.4f}",
                        synth.alpha, synth.mu, fit.n, fit.alpha, fit.mu, fit.ks)};
}

// 9 and 10 share the q = 2 scan to 1e9
std::vector<GapRecord> q2_records() {
    static const auto recs = scan_records(ClassSpec(2, 1), 1000000000);
    return recs;
}

Outcome record_counts() {
    const auto recs = q2_records();
    const double expect = n_estimates(2, TuplePattern(), 1e9).records_2loglix;
    const bool count_ok = std::fabs(double(recs.size()) - expect) <= 8.0;

    const auto table = run_survey(1009, TuplePattern(), 100000000, worker_count());
    double max_mean = 0;
    for (double m : table.means) max_mean = std::max(max_mean, m);
    const auto fit = hyperbola_fit(table);
    const double per_point = fit.rss / double(fit.points);
    const bool ok = count_ok && max_mean <= 2.5 && per_point < 0.5;
    return {ok, fmt::format("q=2 to 1e9: {} records vs 2 log li x = {:.2f}; q=1009 max mean {:.3f}; "
                            "hyperbola kappa={:.3f} delta={:.3f} rss/point={:.4f} over {} points",
                            recs.size(), expect, max_mean, fit.kappa, fit.delta, per_point, fit.points)};
}

Outcome inter_record_slope() {
    const double slope = fit_log_slope(q2_records(), 10);
    return {slope >= 0.35 && slope <= 0.65, fmt::format("slope of log P(n) over n >= 10: {:.4f}", slope)};
}

// 11
Outcome determinism() {
    const auto base = fs::temp_directory_path() / "gaplab_acceptance";
    fs::remove_all(base);
    const auto one = base / "w1", eight = base / "w8";
    std::ostringstream out, err;
    const int a = cli::run({"survey", "--q", "101", "--limit", "1e7", "--workers", "1", "--out", one.string()}, out, err);
    const int b = cli::run({"survey", "--q", "101", "--limit", "1e7", "--workers", "8", "--out", eight.string()}, out, err);
    if (a != 0 || b != 0) return {false, "survey command failed: " + err.str()};
    std::size_t files = 0, differ = 0;
    for (const auto& entry : fs::directory_iterator(one)) {
        ++files;
        differ += slurp(entry.path()) != slurp(eight / entry.path().filename());
    }
    std::size_t files8 = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(eight)) ++files8;
    fs::remove_all(base);
    return {differ == 0 && files == files8 && files > 0,
            fmt::format("{} files compared, {} differ", files, differ)};
}

}  // namespace

int main() {
    criterion(1, "known extra-large records", table_rows);
    criterion(2, "exception absence", exception_absence);
    criterion(3, "Hardy-Littlewood constants", hl_constants);
    criterion(4, "Golubev totients", totients);
    criterion(5, "special functions", special_functions);
    criterion(6, "record-scan oracle equivalence", oracle_equivalence);
    criterion(7, "tau-model identities", tau_model);
    criterion(8, "distribution fitting", distribution_fit);
    criterion(9, "record counts", record_counts);
    criterion(10, "inter-record slope", inter_record_slope);
    criterion(11, "determinism", determinism);
    std::cout << fmt::format("{} of 11 criteria passed", 11 - failures) << std::endl;
    return failures == 0 ? 0 : 1;
}
