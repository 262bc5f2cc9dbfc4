#pragma once

// Text forms of gap records: CSV with a header row, JSON arrays of objects,
// and the space separated `w u h g start end q=Q r=R` compat line.

#include "gaplab/records.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gaplab {

struct OutputRecord {
    std::uint64_t q = 2;
    std::uint64_t r = 1;
    std::string pattern = "0";  // comma separated offsets
    std::uint64_t n = 0;
    std::uint64_t gap = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    Rescaled rescaled{};  // NaN where undefined

    friend bool operator==(const OutputRecord& a, const OutputRecord& b);
};

OutputRecord to_output(const GapRecord& record, const TuplePattern& pattern);
std::vector<OutputRecord> to_output(const std::vector<GapRecord>& records, const TuplePattern& pattern);

// Shortest-width significant-digit formatting; "nan" for NaN.
std::string format_sig(double value, int digits);

std::string csv_header();
std::string to_csv_row(const OutputRecord& rec);
void write_csv(std::ostream& out, const std::vector<OutputRecord>& records);
// Throws IoError on malformed input.
std::vector<OutputRecord> read_csv(std::istream& in);

// NaN is written as null.
std::string to_json(const std::vector<OutputRecord>& records);
std::vector<OutputRecord> from_json(const std::string& text);

// 11 significant digits for the rescaled values.
std::string compat_line(const OutputRecord& rec);

// Splits one CSV line honouring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace gaplab
