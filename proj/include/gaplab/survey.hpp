#pragma once

// Records of all H-allowed classes of one modulus, bucketed by e-intervals.

#include "gaplab/distfit.hpp"
#include "gaplab/records.hpp"
#include "gaplab/trends.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gaplab {

struct SurveyTable {
    std::uint64_t q = 2;
    TuplePattern pattern;
    std::uint64_t limit = 0;
    std::uint64_t phi = 0;
    std::vector<std::uint64_t> residues;           // ascending
    std::vector<std::vector<GapRecord>> records;   // parallel to residues
    // Index j covers ends in [e^j, e^{j+1}), j = 0 .. floor(log limit).
    std::vector<std::uint64_t> counts;
    std::vector<double> means;                     // counts / phi
    std::vector<bool> complete;                    // e^{j+1} <= limit
};

// The bucket of a record ending at `end`.
std::size_t interval_index(std::uint64_t end);

SurveyTable run_survey(std::uint64_t q, const TuplePattern& pattern, std::uint64_t limit,
                       unsigned workers = 1);

struct HyperbolaFit {
    double asymptote = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double rss = 0.0;
    std::size_t points = 0;
};

struct MeanPoint {
    double j;
    double mean;
};

// Least squares of mean ~ L - kappa / (j + delta). With `asymptote` given L is
// held fixed, otherwise fitted too. Grid search over delta with the linear
// parameters solved exactly, then Gauss–Newton polish.
// Throws InsufficientData with fewer than four points.
HyperbolaFit fit_hyperbola(std::span<const MeanPoint> points, std::optional<double> asymptote);

// Fit over j with means > 0, dropping the first three nonzero points and the
// incomplete last interval. Asymptote fixed at k + 1 unless free_asymptote.
HyperbolaFit hyperbola_fit(const SurveyTable& table, bool free_asymptote = false);

struct NEstimates {
    double asymptotic;       // (k+1) log x
    double records_2loglix;  // 2 log li x
    double rough;            // max(0, 2 log(li x / phi(q))); NaN unless k = 1
};

// x >= 2.
NEstimates n_estimates(std::uint64_t q, const TuplePattern& pattern, double x);

// Rescaled values of all records across classes, skipping pre-asymptotic
// ones. Class order, then record order.
std::vector<double> pooled_rescaled(const SurveyTable& table, Rescaling kind,
                                    const TrendParams& params = {});

}  // namespace gaplab
