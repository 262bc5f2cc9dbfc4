#include "gaplab/analytic.hpp"

#include "gaplab/error.hpp"
#include "gaplab/totients.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace gaplab {

long double li_extended(long double x) {
    if (!(x > 1.0L)) throw DomainError("li: x must exceed 1");
    const long double L = std::log(x);
    long double sum = 0.0L;
    long double power = 1.0L;  // L^n / n!
    for (int n = 1; n < 10000; ++n) {
        power *= L / n;
        const long double term = power / n;
        sum += term;
        if (n > L && term <= std::numeric_limits<long double>::epsilon() * sum * 0.25L) break;
    }
    return kEulerGamma + std::log(L) + sum;
}

double li(double x) { return static_cast<double>(li_extended(x)); }

namespace {

// F_k with the integration constant dropped.
long double antiderivative(long double x, int k) {
    const long double li_x = li_extended(x);
    if (k == 1) return li_x;
    const int m = k - 1;
    const long double L = std::log(x);
    // sum_{j=1..m} (m-j)! L^{j-1}, accumulated from the large-factorial end
    long double sum = 0.0L, power = 1.0L, factorial = 1.0L;
    std::array<long double, kMaxTupleSize> facts{};
    for (int i = 0; i < m; ++i) {
        facts[i] = factorial;
        factorial *= (i + 1);
    }
    for (int j = 1; j <= m; ++j) {
        sum += facts[m - j] * power;
        power *= L;
    }
    long double Lm = 1.0L;
    for (int i = 0; i < m; ++i) Lm *= L;
    long double m_factorial = facts[m - 1] * m;
    return (li_x - x / Lm * sum) / m_factorial;
}

}  // namespace

long double Li_extended(long double x, int k) {
    if (k < 1 || k > kMaxTupleSize) throw DomainError("Li: k must lie in [1, 7]");
    if (!(x >= 2.0L)) throw DomainError("Li: x must be at least 2");
    if (x == 2.0L) return 0.0L;
    return antiderivative(x, k) - antiderivative(2.0L, k);
}

double Li(double x, int k) { return static_cast<double>(Li_extended(x, k)); }

HLConstant hl_constant(const TuplePattern& pattern, std::uint64_t prime_bound) {
    if (!is_admissible(pattern)) throw DomainError("hl_constant: pattern is not admissible");
    if (prime_bound < 1000) throw DomainError("hl_constant: prime_bound must be at least 1000");
    HLConstant out{pattern, 1.0, prime_bound, 0.0};
    const int k = pattern.k();
    if (k == 1) return out;

    const std::uint64_t max_offset = pattern.max_offset();
    long double log_sum = 0.0L, compensation = 0.0L;
    auto add = [&](long double term) {
        long double y = term - compensation;
        long double t = log_sum + y;
        compensation = (t - log_sum) - y;
        log_sum = t;
    };
    const long double kk = k;
    for_each_prime(prime_bound, [&](std::uint64_t p) {
        const long double w = p > max_offset ? kk : static_cast<long double>(omega(pattern, p));
        const long double inv = 1.0L / static_cast<long double>(p);
        add(std::log1p(-w * inv) - kk * std::log1p(-inv));
    });
    // Beyond the bound omega(p) = k and each log factor is -k(k-1)/(2p^2) + O(p^-3);
    // sum_{p>P} p^-2 ~ E1(log P) ~ (1 - 1/L + 2/L^2) / (P L).
    const long double P = static_cast<long double>(prime_bound);
    const long double L = std::log(P);
    const long double tail = (1.0L - 1.0L / L + 2.0L / (L * L)) / (P * L);
    const long double correction = -kk * (kk - 1.0L) / 2.0L * tail;
    const long double value = std::exp(log_sum + correction);
    out.value = static_cast<double>(value);
    out.est_error = static_cast<double>(std::fabs(value * std::expm1(-correction)));
    return out;
}

double hl_constant_value(const TuplePattern& pattern) {
    if (pattern.k() == 1) return 1.0;
    static std::mutex mutex;
    static std::map<std::vector<std::uint64_t>, double> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(pattern.offsets()); it != cache.end()) return it->second;
    }
    const double value = hl_constant(pattern, kDefaultPrimeBound).value;
    std::lock_guard lock(mutex);
    cache.emplace(pattern.offsets(), value);
    return value;
}

double pi_c_estimate(const TuplePattern& pattern, std::uint64_t q, double x) {
    const std::uint64_t phi = golubev_phi(pattern, q);
    if (phi == 0) throw DomainError("pi_c_estimate: no allowed residue classes");
    return hl_constant_value(pattern) / static_cast<double>(phi) * Li(x, pattern.k());
}

}  // namespace gaplab
