#pragma once

#include "gaplab/prime_kernel.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace gaplab {

struct PrimePower {
    std::uint64_t prime;
    int exponent;
};

// Trial division; q is expected to stay well below 2^40.
std::vector<PrimePower> factorize(std::uint64_t q);

std::uint64_t euler_phi(std::uint64_t q);

// Number of distinct residues among {-d mod p : d in H}.
std::uint64_t omega(const TuplePattern& pattern, std::uint64_t p);

// Golubev's totient: the number of H-allowed residues mod q, from the
// multiplicative formula prod p^(e-1) * (p - omega(p)).
std::uint64_t golubev_phi(const TuplePattern& pattern, std::uint64_t q);

// Same count by scanning x in [1, q] directly.
std::uint64_t golubev_phi_by_definition(const TuplePattern& pattern, std::uint64_t q);

// r in [1, q] with gcd(r + d, q) = 1 for all offsets, ascending.
std::vector<std::uint64_t> allowed_residues(const TuplePattern& pattern, std::uint64_t q);

struct TotientResult {
    std::uint64_t q;
    TuplePattern pattern;
    std::uint64_t value;
    std::optional<std::vector<std::uint64_t>> allowed;
};

TotientResult totient(const TuplePattern& pattern, std::uint64_t q, bool with_residues);

}  // namespace gaplab
