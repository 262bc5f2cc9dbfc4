#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include "gaplab/prime_kernel.hpp"
#include "gaplab/records.hpp"

#include <cstdint>
#include <vector>

namespace oracle {

inline bool trial_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Members of P_c up to limit by testing every integer of the class.
inline std::vector<std::uint64_t> members(const gaplab::ClassSpec& spec, std::uint64_t limit,
                                          std::uint64_t lo = 1) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = spec.r % spec.q; p <= limit; p += spec.q) {
        if (p < lo) continue;
        bool ok = true;
        for (auto d : spec.pattern.offsets())
            if (!trial_prime(p + d)) {
                ok = false;
                break;
            }
        if (ok) out.push_back(p);
    }
    return out;
}

inline std::vector<gaplab::GapRecord> records(const gaplab::ClassSpec& spec, std::uint64_t limit) {
    std::vector<gaplab::GapRecord> out;
    const auto ps = members(spec, limit);
    std::uint64_t best = 0;
    for (std::size_t i = 1; i < ps.size(); ++i)
        if (ps[i] - ps[i - 1] > best) {
            best = ps[i] - ps[i - 1];
            out.push_back({out.size() + 1, best, ps[i - 1], ps[i], spec.q, spec.r, std::nullopt});
        }
    return out;
}

inline bool same(const std::vector<gaplab::GapRecord>& a, const std::vector<gaplab::GapRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!gaplab::same_records(a[i], b[i])) return false;
    return true;
}

}  // namespace oracle
