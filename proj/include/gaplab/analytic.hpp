#pragma once

#include "gaplab/prime_kernel.hpp"

#include <cstdint>

namespace gaplab {

inline constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

// Logarithmic integral (principal value), x > 1.
//   li x = gamma + log log x + sum_{n>=1} log^n x / (n * n!)
// Throws DomainError for x <= 1.
double li(double x);
long double li_extended(long double x);

inline constexpr int kMaxTupleSize = 7;

// Integral from 2 to x of dt / log^k t, for x >= 2 and 1 <= k <= 7, from the
// closed recurrence
//   F_{k+1}(x) = (li x - x/log^k x * sum_{j=1..k} (k-j)! log^{j-1} x) / k!
// with Li_k(x) = F_k(x) - F_k(2).
double Li(double x, int k);
long double Li_extended(long double x, int k);

struct HLConstant {
    TuplePattern pattern;
    double value = 0.0;
    std::uint64_t prime_bound = 0;
    double est_error = 0.0;  // magnitude of the applied tail correction
};

// Singular series prod_p (1 - omega(p)/p) / (1 - 1/p)^k truncated at
// prime_bound (>= 1000) with the first-order tail factor
//   exp(-k(k-1)/2 * sum_{p > bound} p^-2)
// applied. Exactly 1 for k = 1. Throws DomainError for inadmissible patterns.
HLConstant hl_constant(const TuplePattern& pattern, std::uint64_t prime_bound);

// Cached value at the default bound, shared by the trend and threshold code.
inline constexpr std::uint64_t kDefaultPrimeBound = 10'000'000;
double hl_constant_value(const TuplePattern& pattern);

// Conjectured pi_c(x): C_{k,H} / phi_{k,H}(q) * Li_k(x).
double pi_c_estimate(const TuplePattern& pattern, std::uint64_t q, double x);

}  // namespace gaplab
