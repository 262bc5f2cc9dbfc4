#include "gaplab/records.hpp"

#include "gaplab/distfit.hpp"
#include "gaplab/error.hpp"
#include "gaplab/totients.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gaplab {

bool same_records(const GapRecord& a, const GapRecord& b) {
    return a.n == b.n && a.gap == b.gap && a.start == b.start && a.end == b.end && a.q == b.q &&
           a.r == b.r;
}

namespace {

GapRecord make_record(const ClassSpec& spec, std::uint64_t n, std::uint64_t start, std::uint64_t end) {
    return GapRecord{n, end - start, start, end, spec.q, spec.r, std::nullopt};
}

std::vector<GapRecord> scan_sieve(const ClassSpec& spec, std::uint64_t limit) {
    std::vector<GapRecord> out;
    SequenceStream stream(spec, 1, limit);
    std::uint64_t prev = 0, best = 0;
    while (auto p = stream.next()) {
        if (prev != 0 && *p - prev > best) {
            best = *p - prev;
            out.push_back(make_record(spec, out.size() + 1, prev, *p));
        }
        prev = *p;
    }
    return out;
}

std::vector<GapRecord> scan_skip_ahead(const ClassSpec& spec, std::uint64_t limit) {
    std::vector<GapRecord> out;
    const Progression prog = Progression::for_class(spec);
    if (limit > kMaxValue || prog.offsets.back() > kMaxValue - limit)
        throw RangeError("range error: limit + max offset exceeds 2^63");
    const std::uint64_t c = prog.modulus, a = prog.residue;
    auto first_term_above = [&](std::uint64_t x) -> std::uint64_t {
        if (x < a) return a;
        return a + ((x - a) / c + 1) * c;
    };

    std::uint64_t s = 0;
    if (prog.include_two) {
        s = 2;
    } else {
        for (std::uint64_t t = a; t <= limit; t += c)
            if (in_sequence(spec, t)) {
                s = t;
                break;
            }
    }
    if (s == 0) return out;

    std::uint64_t re = 0;
    for (;;) {
        std::uint64_t next = 0;
        for (std::uint64_t t = first_term_above(s + re); t <= limit; t += c)
            if (in_sequence(spec, t)) {
                next = t;
                break;
            }
        if (next == 0) break;
        std::uint64_t m = s;
        for (std::uint64_t t = next; t - s > c;) {
            t -= c;
            if (in_sequence(spec, t)) {
                m = t;
                break;
            }
        }
        if (next - m > re) {
            re = next - m;
            out.push_back(make_record(spec, out.size() + 1, m, next));
        }
        s = next;
    }
    return out;
}

}  // namespace

std::vector<GapRecord> scan_records(const ClassSpec& spec, std::uint64_t limit,
                                    const std::optional<TrendParams>& trend, ScanMode mode) {
    require_allowed(spec);
    auto out = mode == ScanMode::sieve ? scan_sieve(spec, limit) : scan_skip_ahead(spec, limit);
    if (trend) attach_rescaled(out, DensityModel::make(spec.pattern, spec.q), *trend);
    return out;
}

void attach_rescaled(std::vector<GapRecord>& records, const DensityModel& model,
                     const TrendParams& params) {
    for (auto& rec : records) rec.rescaled = rescale_all(rec.gap, rec.end, model, params);
}

// ---------------------------------------------------------------------------
// all classes of several moduli at once
// ---------------------------------------------------------------------------

namespace {

struct SlotSummary {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    std::uint64_t best = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> maxima;  // (start, end)
};

struct ModulusLayout {
    std::uint64_t q;
    std::vector<std::uint64_t> residues;
    std::vector<std::int32_t> slot_of;  // indexed by p mod q, -1 when disallowed
    std::size_t base;                   // first global slot
};

}  // namespace

std::vector<ModulusRecords> scan_moduli(const TuplePattern& pattern, std::span<const std::uint64_t> moduli,
                                        std::uint64_t limit, const ScanOptions& options) {
    std::vector<ModulusLayout> layout;
    std::size_t total_slots = 0;
    for (std::uint64_t q : moduli) {
        if (q < 2) throw DomainError("modulus must be at least 2");
        ModulusLayout m{q, allowed_residues(pattern, q), std::vector<std::int32_t>(q, -1), total_slots};
        for (std::size_t i = 0; i < m.residues.size(); ++i)
            m.slot_of[m.residues[i] % q] = static_cast<std::int32_t>(i);
        total_slots += m.residues.size();
        layout.push_back(std::move(m));
    }
    const Progression prog = Progression::all(pattern);
    if (limit > kMaxValue || prog.offsets.back() > kMaxValue - limit)
        throw RangeError("range error: limit + max offset exceeds 2^63");

    const std::uint64_t span = std::max<std::uint64_t>(options.chunk_span, 1);
    const std::uint64_t chunks = limit == 0 ? 0 : (limit - 1) / span + 1;
    std::vector<std::vector<SlotSummary>> results(chunks);

    auto scan_chunk = [&](std::uint64_t index) {
        const std::uint64_t lo = index * span + 1;
        const std::uint64_t hi = std::min(limit, lo - 1 + span);
        std::vector<SlotSummary> summary(total_slots);
        SequenceStream stream(prog, lo, hi);
        while (auto p = stream.next()) {
            for (const auto& m : layout) {
                const std::int32_t slot = m.slot_of[*p % m.q];
                if (slot < 0) continue;
                SlotSummary& s = summary[m.base + static_cast<std::size_t>(slot)];
                if (s.last == 0) {
                    s.first = *p;
                } else if (*p - s.last > s.best) {
                    s.best = *p - s.last;
                    s.maxima.emplace_back(s.last, *p);
                }
                s.last = *p;
            }
        }
        results[index] = std::move(summary);
    };

    const unsigned workers = std::max(1u, options.workers);
    if (workers == 1 || chunks <= 1) {
        for (std::uint64_t i = 0; i < chunks; ++i) scan_chunk(i);
    } else {
        std::atomic<std::uint64_t> cursor{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<std::uint64_t>(workers, chunks); ++w)
            pool.emplace_back([&] {
                for (std::uint64_t i; (i = cursor.fetch_add(1)) < chunks;) {
                    try {
                        scan_chunk(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<ModulusRecords> out;
    for (const auto& m : layout) {
        ModulusRecords mr{m.q, m.residues, std::vector<std::vector<GapRecord>>(m.residues.size())};
        for (std::size_t slot = 0; slot < m.residues.size(); ++slot) {
            auto& recs = mr.records[slot];
            const std::uint64_t r = m.residues[slot];
            std::uint64_t last = 0, best = 0;
            auto offer = [&](std::uint64_t start, std::uint64_t end) {
                if (end - start <= best) return;
                best = end - start;
                recs.push_back(GapRecord{recs.size() + 1, best, start, end, m.q, r, std::nullopt});
            };
            for (const auto& chunk : results) {
                const SlotSummary& s = chunk[m.base + slot];
                if (s.last == 0) continue;
                if (last != 0) offer(last, s.first);
                for (auto [a, b] : s.maxima) offer(a, b);
                last = s.last;
            }
        }
        out.push_back(std::move(mr));
    }
    return out;
}

double cramer_threshold(const DensityModel& model, std::uint64_t p) {
    return cramer_line(model, static_cast<double>(p));
}

std::vector<ExceptionalGap> find_exceptions(const TuplePattern& pattern, std::uint64_t q_lo,
                                            std::uint64_t q_hi, std::uint64_t limit,
                                            const ScanOptions& options) {
    if (q_lo < 2 || q_hi < q_lo) throw DomainError("modulus range must satisfy 2 <= q_lo <= q_hi");
    std::vector<std::uint64_t> moduli;
    for (std::uint64_t q = q_lo; q <= q_hi; ++q)
        if (golubev_phi(pattern, q) > 0) moduli.push_back(q);
    std::vector<ExceptionalGap> out;
    for (const auto& mr : scan_moduli(pattern, moduli, limit, options)) {
        const DensityModel model = DensityModel::make(pattern, mr.q);
        for (const auto& recs : mr.records)
            for (const auto& rec : recs) {
                const double ratio = static_cast<double>(rec.gap) / cramer_threshold(model, rec.end);
                if (ratio > 1.0) out.push_back({rec, ratio});
            }
    }
    return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> inter_record_times(std::span<const GapRecord> records) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::size_t i = 1; i < records.size(); ++i)
        out.emplace_back(records[i].n, records[i].start - records[i - 1].start);
    return out;
}

double fit_log_slope(std::span<const GapRecord> records, std::uint64_t n_min) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (const auto& rec : records) {
        if (rec.n < n_min) continue;
        const double x = static_cast<double>(rec.n), y = std::log(static_cast<double>(rec.start));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) throw InsufficientData("log slope fit needs at least two records");
    const double n = static_cast<double>(count);
    const double var = sxx - sx * sx / n;
    return (sxy - sx * sy / n) / var;
}

}  // namespace gaplab
