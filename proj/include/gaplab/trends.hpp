#pragma once

// Predicted sizes of gaps and maximal gaps in P_c, and the tau model for the
// distribution of gap sizes between consecutive primes in one residue class.

#include "gaplab/prime_kernel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace gaplab {

// Correction parameters of the k = 1 trend.
struct TrendParams {
    double b0 = 1.0;
    double b1 = 4.0;
    double b2 = 2.7;

    friend bool operator==(const TrendParams&, const TrendParams&) = default;
};

// The two numbers every trend needs: Golubev's totient and the
// Hardy–Littlewood constant of the pattern.
struct DensityModel {
    TuplePattern pattern;
    std::uint64_t q = 2;
    int k = 1;
    double phi = 1.0;  // phi_{k,H}(q)
    double hl = 1.0;   // C_{k,H}

    // Uses the cached constant; throws DomainError if no class is allowed
    // or k > 7.
    static DensityModel make(const TuplePattern& pattern, std::uint64_t q);

    double scale() const { return phi / hl; }
};

// A trend evaluated below its asymptotic region comes back as 0 with the
// flag set: one of its logarithms had a non-positive value.
struct TrendValue {
    double value = 0.0;
    bool pre_asymptotic = false;
};

// a_c(x) = phi/C * x / Li_k(x); x >= 3.
double avg_gap_below(const DensityModel& model, double x);
// abar_c(x) = phi/C * log^k x; x >= 3.
double avg_gap_near(const DensityModel& model, double x);

// T_c(x) = a_c(x) * log(C Li_k(x) / phi)
TrendValue lower_trend(const DensityModel& model, double x);
// Tbar_c(x) = abar_c(x) * log(x / abar_c(x))
TrendValue upper_trend(const DensityModel& model, double x);

// phi/C * log^{k+1} x, the generalized Cramer line.
double cramer_line(const DensityModel& model, double x);

// b(q, x) = (b0 + b1 / max(2, log log x)^b2) * log phi(q)
double trend_correction(std::uint64_t q, double x, const TrendParams& params);

// a(q, x) = phi(q) x / li x
double avg_gap_k1(std::uint64_t q, double x);

// T(q, x) = a(q, x) * (2 log(li x / phi(q)) - log x + b(q, x)); x >= 10.
// Flagged when li x <= phi(q).
TrendValue trend_k1(std::uint64_t q, double x, const TrendParams& params = {});

// Smallest x (to relative 1e-9) above which both lower and upper trends are
// out of their pre-asymptotic region.
double asymptotic_onset(const DensityModel& model);

// Same search for the ordering a_c < abar_c and T_c < Tbar_c < cramer_line.
double ordering_onset(const DensityModel& model);

// Histogram of gaps d = p' - p between consecutive members p < p' <= x of a
// k = 1 residue class.
struct TauFit {
    double A = 0.0;
    double B = 0.0;
    double s_hat = 0.0;
    std::size_t buckets_used = 0;
};

struct TauTable {
    std::uint64_t q = 2;
    std::uint64_t r = 1;
    std::uint64_t x = 0;
    std::uint64_t c = 2;      // LCM(2, q)
    std::uint64_t count = 0;  // pi(x; q, r)
    std::uint64_t first = 0;  // pmin, 0 when the class is empty below x
    std::uint64_t last = 0;   // largest member <= x
    std::map<std::uint64_t, std::uint64_t> buckets;
    std::optional<TauFit> fit;
};

// Throws DomainError for k != 1 and InvalidClass for a disallowed class.
TauTable tau_tabulate(const ClassSpec& spec, std::uint64_t x);

struct TauPoint {
    double d;
    double count;
};

// Weighted least squares of log count = log B - A d with weights = count,
// over points with count >= 3. Throws InsufficientData with fewer than three.
TauFit fit_exponential_decay(std::span<const TauPoint> points);

// Throws InsufficientData for fewer than five nonzero buckets.
TauFit tau_fit(const TauTable& table);

struct TauReport {
    TauFit fit;
    double A_predicted = 0.0;   // pi(x;q,r) / x
    double A_rel_error = 0.0;
    double sB_predicted = 0.0;  // c pi^2 / x, the prefactor with s absorbed
    double sB_rel_error = 0.0;
    bool count_identity = false;   // sum tau = pi - 1
    bool length_identity = false;  // sum d tau = last - first
};

TauReport tau_model_check(const TauTable& table);

enum class PredictionMode { empirical, analytic };

// (x / pi) * (log(pi^2 / x) + log c), with pi the exact class count or
// li x / phi(q). x >= 100.
double predict_G_k1(std::uint64_t q, std::uint64_t r, double x, PredictionMode mode);

}  // namespace gaplab
