#pragma once

// Maximal (record) gaps in P_c: a gap between consecutive members is a
// record when it is strictly larger than every earlier gap of the sequence.
// The first gap of the sequence is always the first record.

#include "gaplab/prime_kernel.hpp"
#include "gaplab/trends.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gaplab {

// Rescaled sizes; NaN where a rescaling is undefined (w and u for k >= 2)
// or its trend is pre-asymptotic at the end of the gap.
struct Rescaled {
    double w;
    double u;
    double h;
    double hbar;
};

struct GapRecord {
    std::uint64_t n = 0;  // 1-based record index
    std::uint64_t gap = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t q = 0;
    std::uint64_t r = 0;
    std::optional<Rescaled> rescaled;
};

bool same_records(const GapRecord& a, const GapRecord& b);

enum class ScanMode {
    sieve,       // one segmented sieve pass over the class progression
    skip_ahead,  // probe with is_prime, jumping by the current record
};

// All records of P_c with end <= limit. When `trend` is given, each record
// carries its rescaled values evaluated at the end of the gap.
// Throws InvalidClass or RangeError.
std::vector<GapRecord> scan_records(const ClassSpec& spec, std::uint64_t limit,
                                    const std::optional<TrendParams>& trend = std::nullopt,
                                    ScanMode mode = ScanMode::sieve);

// Attaches rescaled values to every record.
void attach_rescaled(std::vector<GapRecord>& records, const DensityModel& model,
                     const TrendParams& params);

// Records of every H-allowed class of each modulus, from a single sieve
// pass over the tuple starts, split into fixed chunks scanned by `workers`
// threads. Output never depends on the worker count.
struct ScanOptions {
    unsigned workers = 1;
    std::uint64_t chunk_span = std::uint64_t{1} << 25;
};

struct ModulusRecords {
    std::uint64_t q = 0;
    std::vector<std::uint64_t> residues;              // ascending
    std::vector<std::vector<GapRecord>> records;      // parallel to residues
};

std::vector<ModulusRecords> scan_moduli(const TuplePattern& pattern,
                                        std::span<const std::uint64_t> moduli,
                                        std::uint64_t limit, const ScanOptions& options = {});

// phi_{k,H}(q) / C_{k,H} * log^{k+1} p
double cramer_threshold(const DensityModel& model, std::uint64_t p);

struct ExceptionalGap {
    GapRecord record;
    double ratio;  // gap / cramer_threshold(end)
};

// Every record over all allowed classes of q_lo..q_hi, end <= limit, with
// ratio strictly above 1. Sorted by (q, r, n).
std::vector<ExceptionalGap> find_exceptions(const TuplePattern& pattern, std::uint64_t q_lo,
                                            std::uint64_t q_hi, std::uint64_t limit,
                                            const ScanOptions& options = {});

// (n, P(n) - P(n-1)) for n >= 2.
std::vector<std::pair<std::uint64_t, std::uint64_t>> inter_record_times(
    std::span<const GapRecord> records);

// Least-squares slope of log P(n) against n over records with n >= n_min.
// Throws InsufficientData with fewer than two points.
double fit_log_slope(std::span<const GapRecord> records, std::uint64_t n_min);

}  // namespace gaplab
