#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaplab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1000", "1e8", "3.7e6": non-negative integers, optionally in exponent form.
// Throws std::invalid_argument otherwise.
unsigned long long parse_count(const std::string& text);

}  // namespace gaplab::cli
