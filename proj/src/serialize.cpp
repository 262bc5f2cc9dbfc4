#include "gaplab/serialize.hpp"

#include "gaplab/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace gaplab {

namespace {

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::uint64_t parse_u64(const std::string& text, const char* field) {
    std::uint64_t value = 0;
    const auto* first = text.data();
    const auto* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw IoError(fmt::format("bad integer in field {}: '{}'", field, text));
    return value;
}

double parse_double(const std::string& text, const char* field) {
    if (text == "nan" || text == "NaN" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(text.c_str(), &end);
    // subnormals set ERANGE but are representable
    const bool overflow = errno == ERANGE && (std::isinf(value) || value == 0.0);
    if (end != text.c_str() + text.size() || overflow || std::isspace(static_cast<unsigned char>(text[0])))
        throw IoError(fmt::format("bad number in field {}: '{}'", field, text));
    return value;
}

}  // namespace

bool operator==(const OutputRecord& a, const OutputRecord& b) {
    return a.q == b.q && a.r == b.r && a.pattern == b.pattern && a.n == b.n && a.gap == b.gap &&
           a.start == b.start && a.end == b.end && same_double(a.rescaled.w, b.rescaled.w) &&
           same_double(a.rescaled.u, b.rescaled.u) && same_double(a.rescaled.h, b.rescaled.h) &&
           same_double(a.rescaled.hbar, b.rescaled.hbar);
}

OutputRecord to_output(const GapRecord& record, const TuplePattern& pattern) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return OutputRecord{record.q,     record.r,   pattern.to_string(),
                        record.n,     record.gap, record.start,
                        record.end,   record.rescaled.value_or(Rescaled{nan, nan, nan, nan})};
}

std::vector<OutputRecord> to_output(const std::vector<GapRecord>& records, const TuplePattern& pattern) {
    std::vector<OutputRecord> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(to_output(rec, pattern));
    return out;
}

std::string format_sig(double value, int digits) {
    if (std::isnan(value)) return "nan";
    return fmt::format("{:.{}g}", value, digits);
}

std::string csv_header() { return "q,r,pattern,n,gap,start,end,w,u,h,hbar"; }

std::string to_csv_row(const OutputRecord& rec) {
    return fmt::format("{},{},\"{}\",{},{},{},{},{},{},{},{}", rec.q, rec.r, rec.pattern, rec.n, rec.gap,
                       rec.start, rec.end, format_sig(rec.rescaled.w, 17), format_sig(rec.rescaled.u, 17),
                       format_sig(rec.rescaled.h, 17), format_sig(rec.rescaled.hbar, 17));
}

void write_csv(std::ostream& out, const std::vector<OutputRecord>& records) {
    out << csv_header() << '\n';
    for (const auto& rec : records) out << to_csv_row(rec) << '\n';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else if (ch != '\r') {
            fields.back() += ch;
        }
    }
    if (quoted) throw IoError("unterminated quote in CSV line");
    return fields;
}

std::vector<OutputRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw IoError("unexpected CSV header: " + line);
    std::vector<OutputRecord> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw IoError(fmt::format("expected 11 CSV fields, got {}", f.size()));
        OutputRecord rec;
        rec.q = parse_u64(f[0], "q");
        rec.r = parse_u64(f[1], "r");
        rec.pattern = f[2];
        rec.n = parse_u64(f[3], "n");
        rec.gap = parse_u64(f[4], "gap");
        rec.start = parse_u64(f[5], "start");
        rec.end = parse_u64(f[6], "end");
        rec.rescaled = {parse_double(f[7], "w"), parse_double(f[8], "u"), parse_double(f[9], "h"),
                        parse_double(f[10], "hbar")};
        out.push_back(std::move(rec));
    }
    return out;
}

std::string to_json(const std::vector<OutputRecord>& records) {
    auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records)
        arr.push_back({{"q", rec.q},
                       {"r", rec.r},
                       {"pattern", rec.pattern},
                       {"n", rec.n},
                       {"gap", rec.gap},
                       {"start", rec.start},
                       {"end", rec.end},
                       {"w", num(rec.rescaled.w)},
                       {"u", num(rec.rescaled.u)},
                       {"h", num(rec.rescaled.h)},
                       {"hbar", num(rec.rescaled.hbar)}});
    return arr.dump(2);
}

std::vector<OutputRecord> from_json(const std::string& text) {
    std::vector<OutputRecord> out;
    try {
        const auto arr = nlohmann::json::parse(text);
        if (!arr.is_array()) throw IoError("JSON input must be an array of records");
        auto num = [](const nlohmann::json& v) {
            return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
        };
        for (const auto& obj : arr) {
            OutputRecord rec;
            rec.q = obj.at("q").get<std::uint64_t>();
            rec.r = obj.at("r").get<std::uint64_t>();
            rec.pattern = obj.at("pattern").get<std::string>();
            rec.n = obj.at("n").get<std::uint64_t>();
            rec.gap = obj.at("gap").get<std::uint64_t>();
            rec.start = obj.at("start").get<std::uint64_t>();
            rec.end = obj.at("end").get<std::uint64_t>();
            rec.rescaled = {num(obj.at("w")), num(obj.at("u")), num(obj.at("h")), num(obj.at("hbar"))};
            out.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed JSON: ") + e.what());
    }
    return out;
}

std::string compat_line(const OutputRecord& rec) {
    return fmt::format("{} {} {} {} {} {} q={} r={}", format_sig(rec.rescaled.w, 11),
                       format_sig(rec.rescaled.u, 11), format_sig(rec.rescaled.h, 11), rec.gap, rec.start,
                       rec.end, rec.q, rec.r);
}

}  // namespace gaplab
