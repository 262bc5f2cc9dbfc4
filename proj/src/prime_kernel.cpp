#include "gaplab/prime_kernel.hpp"

#include "gaplab/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <utility>

namespace gaplab {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 pow_mod(u64 base, u64 exp, u64 m) {
    u64 result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool strong_probable_prime(u64 n, u64 a, u64 d, int s) {
    a %= n;
    if (a == 0) return true;
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

constexpr std::array<u64, 15> kSmallPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

// Inverse of a mod m for gcd(a, m) = 1.
u64 inverse_mod(u64 a, u64 m) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        std::int64_t quot = r / new_r;
        t = std::exchange(new_t, t - quot * new_t);
        r = std::exchange(new_r, r - quot * new_r);
    }
    if (t < 0) t += static_cast<std::int64_t>(m);
    return static_cast<u64>(t);
}

// Base primes beyond this bound are not tabulated; survivors get confirmed.
constexpr u64 kBasePrimeCap = u64{1} << 24;

// Process-wide cache of odd primes, grown on demand and never shrunk.
std::shared_ptr<const std::vector<std::uint32_t>> cached_odd_primes(u64 limit) {
    static std::mutex mutex;
    static std::shared_ptr<const std::vector<std::uint32_t>> cache;
    static u64 cached_limit = 0;
    std::lock_guard lock(mutex);
    if (!cache || cached_limit < limit) {
        u64 grow = std::max<u64>(limit, std::min<u64>(kBasePrimeCap, 2 * cached_limit));
        cache = std::make_shared<const std::vector<std::uint32_t>>(odd_primes_up_to(grow));
        cached_limit = grow;
    }
    return cache;
}

bool all_shifted_prime(u64 base, const std::vector<u64>& offsets) {
    return std::all_of(offsets.begin(), offsets.end(), [&](u64 d) { return is_prime(base + d); });
}

}  // namespace

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : kSmallPrimes) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 53 * 53) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Sinclair's seven bases are deterministic for n < 2^64.
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        if (!strong_probable_prime(n, a, d, s)) return false;
    }
    return true;
}

std::vector<std::uint32_t> odd_primes_up_to(u64 limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 3) return primes;
    if (limit >= (u64{1} << 32)) throw RangeError("odd_primes_up_to: limit must be below 2^32");
    // composite[i] refers to 2i + 1
    const u64 half = (limit - 1) / 2 + 1;
    const u64 root = isqrt(limit);
    std::vector<std::uint8_t> small((root - 1) / 2 + 1, 0);
    std::vector<std::uint32_t> sieving;
    for (u64 i = 1; 2 * i + 1 <= root; ++i) {
        if (small[i]) continue;
        u64 p = 2 * i + 1;
        sieving.push_back(static_cast<std::uint32_t>(p));
        for (u64 j = (p * p) / 2; j < small.size(); j += p) small[j] = 1;
    }
    constexpr u64 kSegment = u64{1} << 18;
    std::vector<std::uint8_t> seg(kSegment);
    primes.reserve(static_cast<std::size_t>(limit / std::max(1.0, std::log(double(limit)) - 1.1)));
    for (u64 begin = 1; begin < half; begin += kSegment) {
        u64 end = std::min(half, begin + kSegment);
        std::fill(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(end - begin), 0);
        for (u64 p : sieving) {
            u64 start = (p * p) / 2;
            if (start >= end) break;
            if (start < begin) start = begin + (p - (begin - start) % p) % p;
            for (u64 j = start; j < end; j += p) seg[j - begin] = 1;
        }
        for (u64 j = begin; j < end; ++j)
            if (!seg[j - begin]) primes.push_back(static_cast<std::uint32_t>(2 * j + 1));
    }
    return primes;
}

void for_each_prime(u64 limit, const std::function<void(u64)>& fn) {
    if (limit < 2) return;
    fn(2);
    SequenceStream stream(Progression{}, 3, limit);
    while (auto p = stream.next()) fn(*p);
}

// ---------------------------------------------------------------------------
// Patterns and classes
// ---------------------------------------------------------------------------

TuplePattern::TuplePattern() : offsets_{0} {}

TuplePattern::TuplePattern(std::vector<u64> offsets) : offsets_(std::move(offsets)) {
    if (offsets_.empty() || offsets_.front() != 0)
        throw DomainError("pattern offsets must start at 0");
    for (std::size_t i = 1; i < offsets_.size(); ++i)
        if (offsets_[i] <= offsets_[i - 1])
            throw DomainError("pattern offsets must be strictly increasing");
}

const std::vector<NamedPattern>& builtin_patterns() {
    static const std::vector<NamedPattern> table{
        {"k1", TuplePattern({0})},
        {"twin", TuplePattern({0, 2})},
        {"triplet-a", TuplePattern({0, 2, 6})},
        {"triplet-b", TuplePattern({0, 4, 6})},
        {"quad", TuplePattern({0, 2, 6, 8})},
        {"quint-a", TuplePattern({0, 2, 6, 8, 12})},
        {"quint-b", TuplePattern({0, 4, 6, 10, 12})},
        {"sext", TuplePattern({0, 4, 6, 10, 12, 16})},
        {"sept-a", TuplePattern({0, 2, 6, 8, 12, 18, 20})},
        {"sept-b", TuplePattern({0, 2, 8, 12, 14, 18, 20})},
    };
    return table;
}

TuplePattern TuplePattern::parse(std::string_view text) {
    for (const auto& named : builtin_patterns())
        if (named.name == text) return named.pattern;
    std::vector<u64> offsets;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view token = text.substr(pos, comma - pos);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        u64 value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
            throw DomainError("unrecognized pattern '" + std::string(text) + "'");
        offsets.push_back(value);
        pos = comma + 1;
    }
    return TuplePattern(std::move(offsets));
}

std::string TuplePattern::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < offsets_.size(); ++i) os << (i ? "," : "") << offsets_[i];
    return os.str();
}

bool is_admissible(const TuplePattern& pattern) {
    const auto& offsets = pattern.offsets();
    const u64 k = offsets.size();
    for (u64 p = 2; p <= k; ++p) {
        if (!is_prime(p)) continue;
        std::vector<bool> hit(p, false);
        u64 distinct = 0;
        for (u64 d : offsets)
            if (!hit[d % p]) {
                hit[d % p] = true;
                ++distinct;
            }
        if (distinct == p) return false;
    }
    return true;
}

ClassSpec::ClassSpec(u64 modulus, u64 residue, TuplePattern h)
    : q(modulus), r(residue), pattern(std::move(h)) {
    if (q < 2) throw DomainError("modulus must be at least 2");
    r %= q;
    if (r == 0) r = q;
}

bool ClassSpec::h_allowed() const {
    return std::all_of(pattern.offsets().begin(), pattern.offsets().end(),
                       [&](u64 d) { return std::gcd((r + d) % q, q) == 1; });
}

void require_allowed(const ClassSpec& spec) {
    if (!spec.h_allowed())
        throw InvalidClass("invalid class: r=" + std::to_string(spec.r) + " mod q=" +
                           std::to_string(spec.q) + " is not allowed for pattern (" +
                           spec.pattern.to_string() + ")");
}

u64 pmin(u64 q, u64 r) {
    ClassSpec spec(q, r);
    require_allowed(spec);
    for (u64 p = spec.r;; p += spec.q)
        if (is_prime(p)) return p;
}

// ---------------------------------------------------------------------------
// Progressions and the segmented sieve
// ---------------------------------------------------------------------------

Progression Progression::for_class(const ClassSpec& spec) {
    require_allowed(spec);
    Progression prog;
    prog.offsets = spec.pattern.offsets();
    prog.modulus = spec.q % 2 == 0 ? spec.q : 2 * spec.q;
    prog.residue = spec.r % 2 == 1 ? spec.r : spec.r + spec.q;  // odd member of r mod q
    prog.residue %= prog.modulus;
    prog.include_two = (2 % spec.q == spec.r % spec.q) && all_shifted_prime(2, prog.offsets);
    return prog;
}

Progression Progression::all(const TuplePattern& pattern) {
    Progression prog;
    prog.offsets = pattern.offsets();
    prog.include_two = all_shifted_prime(2, prog.offsets);
    return prog;
}

SequenceStream::SequenceStream(const ClassSpec& spec, u64 lo, u64 hi, SieveOptions options)
    : SequenceStream(Progression::for_class(spec), lo, hi, options) {}

SequenceStream::SequenceStream(Progression progression, u64 lo, u64 hi, SieveOptions options)
    : prog_(std::move(progression)), options_(options), lo_(lo), hi_(hi) {
    if (prog_.modulus < 2 || prog_.modulus % 2 != 0 || prog_.residue % 2 == 0)
        throw DomainError("progression must have even modulus and odd residue");
    if (options_.segment_terms == 0) options_.segment_terms = 1;
    const u64 max_offset = prog_.offsets.back();
    if (hi > kMaxValue || max_offset > kMaxValue - hi)
        throw RangeError("range error: limit + max offset exceeds 2^63");

    two_pending_ = prog_.include_two && lo <= 2 && 2 <= hi;

    const bool odd_offset = std::any_of(prog_.offsets.begin(), prog_.offsets.end(),
                                        [](u64 d) { return d % 2 == 1; });
    // An odd offset pairs an odd term with an even partner; only 2 survives.
    if (odd_offset || hi < prog_.residue || lo > hi) {
        empty_ = true;
        return;
    }
    const u64 c = prog_.modulus, a = prog_.residue;
    first_term_ = lo <= a ? 0 : (lo - a + c - 1) / c;
    last_term_ = (hi - a) / c;
    if (first_term_ > last_term_) {
        empty_ = true;
        return;
    }

    const u64 top = hi + max_offset;
    u64 base_limit = isqrt(top);
    if (base_limit > kBasePrimeCap) {
        base_limit = kBasePrimeCap;
        needs_confirmation_ = true;
    }
    const auto cache = cached_odd_primes(base_limit);
    const auto primes_end = std::upper_bound(cache->begin(), cache->end(), base_limit);
    for (auto it = cache->begin(); it != primes_end; ++it) {
        const u64 p = *it;
        if (c % p == 0) continue;  // p | q: H-allowed classes are never divisible by p
        const u64 inv = inverse_mod(c % p, p);
        base_primes_.push_back(p);
        for (u64 d : prog_.offsets) {
            u64 shift = (a + d) % p;
            u64 root = mul_mod(inv, (p - shift) % p, p);
            roots_.push_back(static_cast<std::uint32_t>(root));
        }
    }
    segment_begin_ = first_term_;
    sieve_segment();
}

void SequenceStream::sieve_segment() {
    const u64 length = std::min<u64>(options_.segment_terms, last_term_ - segment_begin_ + 1);
    alive_.assign(length, 1);
    cursor_ = 0;
    const u64 c = prog_.modulus, a = prog_.residue;
    const std::size_t k = prog_.offsets.size();
    const u64 s = segment_begin_;
    for (std::size_t j = 0; j < base_primes_.size(); ++j) {
        const u64 p = base_primes_[j];
        const u64 s_mod = s % p;
        for (std::size_t i = 0; i < k; ++i) {
            const u64 root = roots_[j * k + i];
            u64 idx = (root + p - s_mod) % p;  // first hit relative to s
            if (idx >= length) continue;
            // The prime p itself is a legitimate member.
            if (a + prog_.offsets[i] + (s + idx) * c == p) idx += p;
            for (; idx < length; idx += p) alive_[idx] = 0;
        }
    }
    if (s == 0 && a == 1) alive_[0] = 0;  // term 1
}

std::optional<u64> SequenceStream::next() {
    if (two_pending_) {
        two_pending_ = false;
        return u64{2};
    }
    while (!empty_) {
        while (cursor_ < alive_.size()) {
            const std::size_t i = cursor_++;
            if (!alive_[i]) continue;
            const u64 value = prog_.residue + (segment_begin_ + i) * prog_.modulus;
            if (needs_confirmation_ && !all_shifted_prime(value, prog_.offsets)) continue;
            return value;
        }
        const u64 next_begin = segment_begin_ + alive_.size();
        if (next_begin > last_term_) {
            empty_ = true;
            break;
        }
        segment_begin_ = next_begin;
        sieve_segment();
    }
    return std::nullopt;
}

void for_each_in_sequence(const ClassSpec& spec, u64 lo, u64 hi, const std::function<void(u64)>& fn,
                          SieveOptions options) {
    SequenceStream stream(spec, lo, hi, options);
    while (auto p = stream.next()) fn(*p);
}

std::vector<u64> iter_sequence(const ClassSpec& spec, u64 lo, u64 hi, SieveOptions options) {
    std::vector<u64> out;
    for_each_in_sequence(spec, lo, hi, [&](u64 p) { out.push_back(p); }, options);
    return out;
}

u64 count_sequence(const ClassSpec& spec, u64 x) {
    u64 count = 0;
    SequenceStream stream(spec, 1, x);
    while (stream.next()) ++count;
    return count;
}

bool in_sequence(const ClassSpec& spec, u64 p) {
    if (p % spec.q != spec.r % spec.q) return false;
    return all_shifted_prime(p, spec.pattern.offsets());
}

}  // namespace gaplab
