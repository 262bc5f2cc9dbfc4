#pragma once

// Prime and prime k-tuple enumeration restricted to residue classes.
//
// A sequence P_c = P_c(q, r, H) holds the primes p with p = r (mod q) such
// that p + d is prime for every offset d of the pattern H. Enumeration is a
// segmented sieve over the arithmetic progression that contains P_c, so the
// work is proportional to the number of candidates in the class rather than
// to the length of the interval.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaplab {

// Largest value any enumeration may touch (p + max offset).
inline constexpr std::uint64_t kMaxValue = std::uint64_t{1} << 63;

// Deterministic for the whole 64-bit range: trial division by small primes,
// then strong probable-prime tests to a witness set proven sufficient below 2^64.
bool is_prime(std::uint64_t n);

// Offset pattern H = (0, d2, ..., dk), strictly increasing.
class TuplePattern {
public:
    TuplePattern();  // k = 1, offsets (0)

    // Throws DomainError if the offsets are not strictly increasing from 0.
    explicit TuplePattern(std::vector<std::uint64_t> offsets);

    // Named shortcuts: k1, twin, triplet-a, triplet-b, quad, quint-a, quint-b,
    // sext, sept-a, sept-b; anything else is parsed as a comma separated list.
    static TuplePattern parse(std::string_view text);

    const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
    int k() const noexcept { return static_cast<int>(offsets_.size()); }
    std::uint64_t max_offset() const noexcept { return offsets_.back(); }

    // "0,2,6,8"
    std::string to_string() const;

    friend bool operator==(const TuplePattern&, const TuplePattern&) = default;

private:
    std::vector<std::uint64_t> offsets_;
};

// The nine densest patterns with k <= 7 plus the trivial k = 1 pattern,
// paired with their short names.
struct NamedPattern {
    std::string_view name;
    TuplePattern pattern;
};
const std::vector<NamedPattern>& builtin_patterns();

// True iff for every prime p <= k the offsets miss at least one class mod p.
bool is_admissible(const TuplePattern& pattern);

// Residue class selector. r is normalized into [1, q]; q >= 2.
struct ClassSpec {
    std::uint64_t q = 2;
    std::uint64_t r = 1;
    TuplePattern pattern;

    ClassSpec() = default;
    ClassSpec(std::uint64_t modulus, std::uint64_t residue, TuplePattern h = {});

    // gcd(r + d, q) = 1 for every offset d.
    bool h_allowed() const;

    friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

// Throws InvalidClass unless the spec is H-allowed.
void require_allowed(const ClassSpec& spec);

// Least prime p = r (mod q). Throws InvalidClass if gcd(q, r) != 1.
std::uint64_t pmin(std::uint64_t q, std::uint64_t r);

struct SieveOptions {
    // Number of progression terms sieved per segment.
    std::size_t segment_terms = std::size_t{1} << 20;
};

// The progression a + n*c (c even, a odd) filtered to terms t for which
// every t + d is prime. `include_two` additionally emits 2 (only meaningful
// for the k = 1 pattern, where 2 may belong to the class).
struct Progression {
    std::uint64_t modulus = 2;
    std::uint64_t residue = 1;
    std::vector<std::uint64_t> offsets{0};
    bool include_two = false;

    // The progression carrying P_c for an H-allowed spec.
    static Progression for_class(const ClassSpec& spec);
    // All tuple starts of a pattern, regardless of class.
    static Progression all(const TuplePattern& pattern);
};

// Ascending, single-consumer stream of progression members in [lo, hi].
// Each segment is sieved by the odd primes up to sqrt(hi + max offset); when
// that bound is too large to tabulate, survivors of a partial sieve are
// confirmed with is_prime.
class SequenceStream {
public:
    SequenceStream(Progression progression, std::uint64_t lo, std::uint64_t hi,
                   SieveOptions options = {});
    SequenceStream(const ClassSpec& spec, std::uint64_t lo, std::uint64_t hi,
                   SieveOptions options = {});

    std::optional<std::uint64_t> next();

private:
    void sieve_segment();

    Progression prog_;
    SieveOptions options_;
    std::uint64_t lo_;
    std::uint64_t hi_;
    bool empty_ = false;
    bool two_pending_ = false;
    bool needs_confirmation_ = false;

    std::uint64_t first_term_ = 0;  // index n of the first term >= lo
    std::uint64_t last_term_ = 0;   // index n of the last term <= hi
    std::uint64_t segment_begin_ = 0;
    std::size_t cursor_ = 0;
    std::vector<std::uint8_t> alive_;

    // Per base prime and offset: term index of the first multiple, mod p.
    std::vector<std::uint32_t> base_primes_;
    std::vector<std::uint32_t> roots_;
};

// Calls fn(p) for every member of P_c in [lo, hi], ascending.
void for_each_in_sequence(const ClassSpec& spec, std::uint64_t lo, std::uint64_t hi,
                          const std::function<void(std::uint64_t)>& fn,
                          SieveOptions options = {});

// Throws InvalidClass for a spec that is not H-allowed and RangeError when
// hi + max offset exceeds 2^63.
std::vector<std::uint64_t> iter_sequence(const ClassSpec& spec, std::uint64_t lo,
                                         std::uint64_t hi, SieveOptions options = {});

// |{p in P_c : p <= x}|
std::uint64_t count_sequence(const ClassSpec& spec, std::uint64_t x);

// Whether p is a member of P_c, by direct primality tests.
bool in_sequence(const ClassSpec& spec, std::uint64_t p);

// Odd primes up to `limit` as 32-bit values (limit < 2^32).
std::vector<std::uint32_t> odd_primes_up_to(std::uint64_t limit);

// Calls fn(p) for every prime p <= limit, ascending.
void for_each_prime(std::uint64_t limit, const std::function<void(std::uint64_t)>& fn);

std::uint64_t isqrt(std::uint64_t n);

}  // namespace gaplab
