#include "gaplab/totients.hpp"

#include "gaplab/error.hpp"

#include <algorithm>
#include <numeric>

namespace gaplab {

std::vector<PrimePower> factorize(std::uint64_t q) {
    if (q == 0) throw DomainError("factorize: q must be positive");
    std::vector<PrimePower> factors;
    for (std::uint64_t p = 2; p * p <= q; p += (p == 2 ? 1 : 2)) {
        if (q % p != 0) continue;
        int e = 0;
        while (q % p == 0) {
            q /= p;
            ++e;
        }
        factors.push_back({p, e});
    }
    if (q > 1) factors.push_back({q, 1});
    return factors;
}

std::uint64_t euler_phi(std::uint64_t q) {
    std::uint64_t phi = 1;
    for (auto [p, e] : factorize(q)) {
        phi *= p - 1;
        for (int i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

std::uint64_t omega(const TuplePattern& pattern, std::uint64_t p) {
    std::vector<std::uint64_t> residues;
    residues.reserve(pattern.offsets().size());
    for (std::uint64_t d : pattern.offsets()) residues.push_back((p - d % p) % p);
    std::sort(residues.begin(), residues.end());
    return static_cast<std::uint64_t>(std::unique(residues.begin(), residues.end()) - residues.begin());
}

std::uint64_t golubev_phi(const TuplePattern& pattern, std::uint64_t q) {
    std::uint64_t value = 1;
    for (auto [p, e] : factorize(q)) {
        const std::uint64_t w = omega(pattern, p);
        if (w >= p) return 0;
        value *= p - w;
        for (int i = 1; i < e; ++i) value *= p;
    }
    return value;
}

std::uint64_t golubev_phi_by_definition(const TuplePattern& pattern, std::uint64_t q) {
    if (q == 0) throw DomainError("golubev_phi: q must be positive");
    std::uint64_t count = 0;
    for (std::uint64_t x = 1; x <= q; ++x) {
        bool allowed = true;
        for (std::uint64_t d : pattern.offsets())
            if (std::gcd((x + d) % q, q) != 1) {
                allowed = false;
                break;
            }
        count += allowed;
    }
    return count;
}

std::vector<std::uint64_t> allowed_residues(const TuplePattern& pattern, std::uint64_t q) {
    if (q == 0) throw DomainError("allowed_residues: q must be positive");
    // Sieve the residues by each prime factor instead of taking gcds.
    std::vector<std::uint8_t> ok(q, 1);  // index r mod q
    for (auto [p, e] : factorize(q)) {
        for (std::uint64_t d : pattern.offsets()) {
            // r + d = 0 (mod p)
            for (std::uint64_t r = (p - d % p) % p; r < q; r += p) ok[r] = 0;
        }
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t r = 1; r <= q; ++r)
        if (ok[r % q]) out.push_back(r);
    return out;
}

TotientResult totient(const TuplePattern& pattern, std::uint64_t q, bool with_residues) {
    TotientResult result{q, pattern, golubev_phi(pattern, q), std::nullopt};
    if (with_residues) result.allowed = allowed_residues(pattern, q);
    return result;
}

}  // namespace gaplab
