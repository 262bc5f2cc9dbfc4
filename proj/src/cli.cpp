#include "gaplab/cli.hpp"

#include "gaplab/analytic.hpp"
#include "gaplab/distfit.hpp"
#include "gaplab/error.hpp"
#include "gaplab/records.hpp"
#include "gaplab/serialize.hpp"
#include "gaplab/survey.hpp"
#include "gaplab/totients.hpp"
#include "gaplab/trends.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace gaplab::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TuplePattern pattern_arg(const std::string& text) {
    try {
        return TuplePattern::parse(text);
    } catch (const Error& e) {
        throw UsageError(fmt::format("bad --pattern '{}': {}", text, e.what()));
    }
}

std::uint64_t count_arg(const std::string& text, const char* flag) {
    try {
        return parse_count(text);
    } catch (const std::invalid_argument&) {
        throw UsageError(fmt::format("{} expects a non-negative integer, got '{}'", flag, text));
    }
}

// Value column that accepts NaN as null in JSON.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string sig17(double v) { return format_sig(v, 17); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file << text;
    if (!file) throw IoError("write failed for " + path.string());
}

std::filesystem::path output_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("GAPLAB_OUT"); env && *env) return env;
    return flag_value;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string());
}

std::vector<double> read_samples(const std::string& path, const std::string& column) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(file, header)) throw IoError(path + ": empty input");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto names = split_csv_line(header);
    std::size_t index = 0;
    bool numeric_header = false;
    if (names.size() == 1) {
        char* end = nullptr;
        std::strtod(names[0].c_str(), &end);
        numeric_header = end && *end == '\0' && !names[0].empty();
    } else {
        auto it = std::find(names.begin(), names.end(), column);
        if (it == names.end()) throw IoError(fmt::format("{}: no column named '{}'", path, column));
        index = static_cast<std::size_t>(it - names.begin());
    }
    std::vector<double> samples;
    auto take = [&](const std::string& cell) {
        if (cell.empty() || cell == "nan" || cell == "NaN") return;
        try {
            std::size_t used = 0;
            const double v = std::stod(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
            samples.push_back(v);
        } catch (const std::exception&) {
            throw IoError(fmt::format("{}: bad number '{}'", path, cell));
        }
    };
    if (numeric_header) take(names[0]);
    std::string line;
    while (std::getline(file, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (index >= cells.size()) throw IoError(path + ": short row");
        take(cells[index]);
    }
    return samples;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
    std::uint64_t q = 0, r = 0;
    std::string pattern = "k1", limit, format = "compat", mode = "sieve";
    TrendParams params;
};

// compat marker for gaps above the Cramer threshold at their end
std::string compat_block(const OutputRecord& rec, const DensityModel& model) {
    std::string text = compat_line(rec) + '\n';
    const double ratio = static_cast<double>(rec.gap) / cramer_threshold(model, rec.end);
    if (ratio > 1.0) text += fmt::format("extra-large ratio={}\n", format_sig(ratio, 11));
    return text;
}

int cmd_scan(const ScanArgs& a, std::ostream& out) {
    const ClassSpec spec(a.q, a.r, pattern_arg(a.pattern));
    const std::uint64_t limit = count_arg(a.limit, "--limit");
    const ScanMode mode = a.mode == "skip-ahead" ? ScanMode::skip_ahead : ScanMode::sieve;
    const auto records = scan_records(spec, limit, a.params, mode);
    const auto rows = to_output(records, spec.pattern);
    if (a.format == "csv") {
        write_csv(out, rows);
    } else if (a.format == "json") {
        out << to_json(rows) << '\n';
    } else {
        const DensityModel model = DensityModel::make(spec.pattern, spec.q);
        for (const auto& row : rows) out << compat_block(row, model);
    }
    return kExitOk;
}

struct SurveyArgs {
    std::uint64_t q = 0;
    std::string pattern = "k1", limit, out = ".", pooled;
    unsigned workers = 1;
    TrendParams params;
};

int cmd_survey(const SurveyArgs& a, std::ostream& out) {
    const TuplePattern pattern = pattern_arg(a.pattern);
    const std::uint64_t limit = count_arg(a.limit, "--limit");
    const auto dir = output_dir(a.out);
    ensure_dir(dir);
    SurveyTable table = run_survey(a.q, pattern, limit, a.workers);

    // Per-decade record files, classes in ascending r.
    std::map<int, std::string> decades;
    if (table.phi > 0) {
        const DensityModel model = DensityModel::make(pattern, a.q);
        for (auto& recs : table.records) {
            attach_rescaled(recs, model, a.params);
            for (const auto& rec : recs) {
                const int f = static_cast<int>(std::ceil(std::log10(static_cast<double>(rec.end))));
                decades[f] += compat_block(to_output(rec, pattern), model);
            }
        }
    }
    for (const auto& [f, text] : decades)
        write_text_file(dir / fmt::format("{}_1e{}.txt", a.q, f), text);

    std::string stats;
    for (std::size_t j = 1; j < table.counts.size(); ++j)
        stats += fmt::format("{} {} {}\n", j, format_sig(table.means[j], 11), table.counts[j]);
    write_text_file(dir / fmt::format("{}stats.txt", a.q), stats);

    if (!a.pooled.empty()) {
        const Rescaling kind = parse_rescaling(a.pooled);
        std::string text = "value\n";
        for (double v : pooled_rescaled(table, kind, a.params)) text += sig17(v) + '\n';
        write_text_file(dir / fmt::format("{}_pooled_{}.csv", a.q, a.pooled), text);
    }
    out << stats;
    return kExitOk;
}

struct ConstantsArgs {
    std::vector<std::string> patterns;
    std::string prime_bound = "1e7", format = "csv";
};

int cmd_constants(const ConstantsArgs& a, std::ostream& out) {
    const std::uint64_t bound = count_arg(a.prime_bound, "--prime-bound");
    std::vector<std::pair<std::string, TuplePattern>> targets;
    if (a.patterns.empty()) {
        for (const auto& np : builtin_patterns())
            if (np.pattern.k() >= 2) targets.emplace_back(std::string(np.name), np.pattern);
    } else {
        for (const auto& text : a.patterns) targets.emplace_back(text, pattern_arg(text));
    }
    nlohmann::json arr = nlohmann::json::array();
    if (a.format == "csv") out << "name,pattern,k,value,prime_bound,est_error\n";
    for (const auto& [name, pattern] : targets) {
        const HLConstant c = hl_constant(pattern, bound);
        if (a.format == "csv")
            out << fmt::format("{},\"{}\",{},{},{},{}\n", name, pattern.to_string(), pattern.k(), sig17(c.value),
                               bound, sig17(c.est_error));
        else
            arr.push_back({{"name", name},
                           {"pattern", pattern.to_string()},
                           {"k", pattern.k()},
                           {"value", c.value},
                           {"prime_bound", bound},
                           {"est_error", c.est_error}});
    }
    if (a.format == "json") out << arr.dump(2) << '\n';
    return kExitOk;
}

struct TotientArgs {
    std::uint64_t q = 0;
    std::string pattern = "k1", format = "csv";
    bool no_residues = false;
};

int cmd_totient(const TotientArgs& a, std::ostream& out) {
    const TuplePattern pattern = pattern_arg(a.pattern);
    const TotientResult t = totient(pattern, a.q, !a.no_residues);
    if (a.format == "json") {
        nlohmann::json obj{{"q", t.q}, {"pattern", pattern.to_string()}, {"value", t.value}};
        if (t.allowed) obj["allowed"] = *t.allowed;
        out << obj.dump(2) << '\n';
        return kExitOk;
    }
    out << "q,pattern,value,allowed\n";
    std::string allowed;
    if (t.allowed)
        for (std::size_t i = 0; i < t.allowed->size(); ++i)
            allowed += (i ? " " : "") + std::to_string((*t.allowed)[i]);
    out << fmt::format("{},\"{}\",{},\"{}\"\n", t.q, pattern.to_string(), t.value, allowed);
    return kExitOk;
}

struct TauArgs {
    std::uint64_t q = 0, r = 0;
    std::string x, format = "csv";
};

int cmd_tau(const TauArgs& a, std::ostream& out) {
    TauTable table = tau_tabulate(ClassSpec(a.q, a.r), count_arg(a.x, "--x"));
    std::optional<TauReport> report;
    try {
        report = tau_model_check(table);
        table.fit = report->fit;
    } catch (const InsufficientData&) {
    }
    auto model = [&](std::uint64_t d) {
        return table.fit ? table.fit->B * std::exp(-table.fit->A * static_cast<double>(d))
                         : std::numeric_limits<double>::quiet_NaN();
    };
    if (a.format == "csv") {
        out << "d,count,model\n";
        for (auto [d, n] : table.buckets) out << fmt::format("{},{},{}\n", d, n, sig17(model(d)));
        return kExitOk;
    }
    nlohmann::json buckets = nlohmann::json::array();
    for (auto [d, n] : table.buckets) buckets.push_back({{"d", d}, {"count", n}, {"model", num(model(d))}});
    nlohmann::json obj{{"q", table.q},         {"r", table.r},     {"x", table.x},
                       {"c", table.c},         {"count", table.count}, {"first", table.first},
                       {"last", table.last},   {"buckets", buckets}};
    if (report) {
        obj["fit"] = {{"A", report->fit.A},
                      {"B", report->fit.B},
                      {"s_hat", report->fit.s_hat},
                      {"buckets_used", report->fit.buckets_used}};
        obj["check"] = {{"A_predicted", report->A_predicted},
                        {"A_rel_error", report->A_rel_error},
                        {"sB_predicted", report->sB_predicted},
                        {"sB_rel_error", report->sB_rel_error},
                        {"count_identity", report->count_identity},
                        {"length_identity", report->length_identity}};
    }
    out << obj.dump(2) << '\n';
    return kExitOk;
}

struct FitArgs {
    std::string input, column = "w", method = "mle", format = "json";
    std::size_t synthetic = 0;
    double alpha = 1.0, mu = 0.0, histogram = 0.0;
    std::uint64_t seed = 20190111;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    std::vector<double> samples;
    if (a.synthetic > 0) {
        if (!(a.alpha > 0)) throw UsageError("--alpha must be positive");
        std::mt19937_64 rng(a.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        samples.reserve(a.synthetic);
        while (samples.size() < a.synthetic) {
            const double u = unit(rng);
            if (u > 0.0) samples.push_back(gumbel_quantile(u, a.alpha, a.mu));
        }
    } else if (!a.input.empty()) {
        samples = read_samples(a.input, a.column);
    } else {
        throw UsageError("fit needs --input or --synthetic");
    }
    const GumbelFit fit = a.method == "moments" ? gumbel_moments_fit(samples) : gumbel_fit(samples);
    std::vector<HistogramBin> bins;
    if (a.histogram > 0) bins = histogram(samples, a.histogram);
    if (a.format == "csv") {
        out << "alpha,mu,ks,n\n" << fmt::format("{},{},{},{}\n", sig17(fit.alpha), sig17(fit.mu), sig17(fit.ks), fit.n);
        if (!bins.empty()) {
            out << "center,count,density\n";
            for (const auto& b : bins) out << fmt::format("{},{},{}\n", sig17(b.center), b.count, sig17(b.density));
        }
        return kExitOk;
    }
    nlohmann::json obj{{"method", a.method}, {"alpha", fit.alpha}, {"mu", fit.mu}, {"ks", fit.ks}, {"n", fit.n}};
    if (!bins.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& b : bins) arr.push_back({{"center", b.center}, {"count", b.count}, {"density", b.density}});
        obj["histogram"] = arr;
    }
    out << obj.dump(2) << '\n';
    return kExitOk;
}

struct ExceptionsArgs {
    std::string pattern = "k1", limit, format = "csv";
    std::uint64_t q_lo = 2, q_hi = 0;
    unsigned workers = 1;
};

int cmd_exceptions(const ExceptionsArgs& a, std::ostream& out) {
    const TuplePattern pattern = pattern_arg(a.pattern);
    ScanOptions options;
    options.workers = a.workers;
    const auto found = find_exceptions(pattern, a.q_lo, a.q_hi, count_arg(a.limit, "--limit"), options);
    if (a.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : found)
            arr.push_back({{"q", e.record.q},
                           {"r", e.record.r},
                           {"pattern", pattern.to_string()},
                           {"n", e.record.n},
                           {"gap", e.record.gap},
                           {"start", e.record.start},
                           {"end", e.record.end},
                           {"ratio", e.ratio}});
        out << arr.dump(2) << '\n';
        return kExitOk;
    }
    out << "q,r,pattern,n,gap,start,end,ratio\n";
    for (const auto& e : found)
        out << fmt::format("{},{},\"{}\",{},{},{},{},{}\n", e.record.q, e.record.r, pattern.to_string(), e.record.n,
                           e.record.gap, e.record.start, e.record.end, sig17(e.ratio));
    return kExitOk;
}

struct ReportArgs {
    std::uint64_t q = 0, r = 0;
    std::string pattern = "k1", limit, format = "csv";
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
    const ClassSpec spec(a.q, a.r, pattern_arg(a.pattern));
    const auto records = scan_records(spec, count_arg(a.limit, "--limit"));
    const DensityModel model = DensityModel::make(spec.pattern, spec.q);
    auto trend = [](const TrendValue& t) {
        return t.pre_asymptotic ? std::numeric_limits<double>::quiet_NaN() : t.value;
    };
    nlohmann::json arr = nlohmann::json::array();
    if (a.format == "csv") out << "x,G,T_c,Tbar_c,cramer\n";
    for (const auto& rec : records) {
        const double x = static_cast<double>(rec.end);
        const double lower = trend(lower_trend(model, x)), upper = trend(upper_trend(model, x));
        const double cramer = cramer_line(model, x);
        if (a.format == "csv")
            out << fmt::format("{},{},{},{},{}\n", rec.end, rec.gap, sig17(lower), sig17(upper), sig17(cramer));
        else
            arr.push_back({{"x", rec.end}, {"G", rec.gap}, {"T_c", num(lower)}, {"Tbar_c", num(upper)},
                           {"cramer", cramer}});
    }
    if (a.format == "json") out << arr.dump(2) << '\n';
    return kExitOk;
}

void add_trend_flags(CLI::App* cmd, TrendParams& params) {
    cmd->add_option("--b0", params.b0, "trend correction b0")->capture_default_str();
    cmd->add_option("--b1", params.b1, "trend correction b1")->capture_default_str();
    cmd->add_option("--b2", params.b2, "trend correction b2")->capture_default_str();
}

}  // namespace

unsigned long long parse_count(const std::string& text) {
    // mantissa digits with an optional fractional part, then an optional exponent
    std::size_t i = 0;
    std::string digits;
    int frac = 0;
    bool dot = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits += ch;
            if (dot) ++frac;
        } else if (ch == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (digits.empty()) throw std::invalid_argument(text);
    long exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw std::invalid_argument(text);
        const std::string rest = text.substr(i + 1);
        if (rest.empty() || rest.size() > 3) throw std::invalid_argument(text);
        std::size_t j = rest[0] == '+' ? 1 : 0;
        if (j == rest.size()) throw std::invalid_argument(text);
        for (; j < rest.size(); ++j) {
            if (!std::isdigit(static_cast<unsigned char>(rest[j]))) throw std::invalid_argument(text);
            exponent = exponent * 10 + (rest[j] - '0');
        }
    }
    exponent -= frac;
    while (exponent < 0) {
        if (digits.empty() || digits.back() != '0') throw std::invalid_argument(text);
        digits.pop_back();
        ++exponent;
    }
    unsigned long long value = 0;
    auto push = [&](int d) {
        if (value > (~0ULL - static_cast<unsigned>(d)) / 10) throw std::invalid_argument(text);
        value = value * 10 + static_cast<unsigned>(d);
    };
    for (char ch : digits) push(ch - '0');
    for (long e = 0; e < exponent; ++e) push(0);
    return value;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximal gaps between primes and prime k-tuples in residue classes", "gaplab"};
    app.require_subcommand(1);
    const std::vector<std::string> formats{"csv", "json"};
    const std::vector<std::string> scan_formats{"csv", "json", "compat"};

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "record gaps of one residue class");
    scan->add_option("--q", scan_args.q, "modulus")->required();
    scan->add_option("--r", scan_args.r, "residue")->required();
    scan->add_option("--pattern", scan_args.pattern, "tuple pattern name or offsets")->capture_default_str();
    scan->add_option("--limit", scan_args.limit, "largest gap end")->required();
    scan->add_option("--format", scan_args.format)->check(CLI::IsMember(scan_formats))->capture_default_str();
    scan->add_option("--mode", scan_args.mode)->check(CLI::IsMember({"sieve", "skip-ahead"}))->capture_default_str();
    add_trend_flags(scan, scan_args.params);

    SurveyArgs survey_args;
    auto* survey = app.add_subcommand("survey", "records of every allowed class of one modulus");
    survey->add_option("--q", survey_args.q, "modulus")->required();
    survey->add_option("--pattern", survey_args.pattern)->capture_default_str();
    survey->add_option("--limit", survey_args.limit)->required();
    survey->add_option("--workers", survey_args.workers)->check(CLI::Range(1u, 1024u))->capture_default_str();
    survey->add_option("--out", survey_args.out, "output directory (GAPLAB_OUT overrides)")->capture_default_str();
    survey->add_option("--pooled", survey_args.pooled, "also write pooled rescaled values")
        ->check(CLI::IsMember({"w", "u", "h", "hbar"}));
    add_trend_flags(survey, survey_args.params);

    ConstantsArgs constants_args;
    auto* constants = app.add_subcommand("constants", "Hardy-Littlewood constants");
    constants->add_option("--pattern", constants_args.patterns, "patterns (default: all k >= 2)");
    constants->add_option("--prime-bound", constants_args.prime_bound)->capture_default_str();
    constants->add_option("--format", constants_args.format)->check(CLI::IsMember(formats))->capture_default_str();

    TotientArgs totient_args;
    auto* totient_cmd = app.add_subcommand("totient", "number of allowed residues and their list");
    totient_cmd->add_option("--q", totient_args.q)->required();
    totient_cmd->add_option("--pattern", totient_args.pattern)->capture_default_str();
    totient_cmd->add_flag("--no-residues", totient_args.no_residues);
    totient_cmd->add_option("--format", totient_args.format)->check(CLI::IsMember(formats))->capture_default_str();

    TauArgs tau_args;
    auto* tau = app.add_subcommand("tau", "gap size histogram of one class with exponential fit");
    tau->add_option("--q", tau_args.q)->required();
    tau->add_option("--r", tau_args.r)->required();
    tau->add_option("--x", tau_args.x)->required();
    tau->add_option("--format", tau_args.format)->check(CLI::IsMember(formats))->capture_default_str();

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Gumbel fit of a sample");
    fit->add_option("--input", fit_args.input, "CSV file");
    fit->add_option("--column", fit_args.column)->capture_default_str();
    fit->add_option("--method", fit_args.method)->check(CLI::IsMember({"mle", "moments"}))->capture_default_str();
    fit->add_option("--synthetic", fit_args.synthetic, "draw this many Gumbel samples instead");
    fit->add_option("--alpha", fit_args.alpha)->capture_default_str();
    fit->add_option("--mu", fit_args.mu)->capture_default_str();
    fit->add_option("--seed", fit_args.seed)->capture_default_str();
    fit->add_option("--histogram", fit_args.histogram, "bin width");
    fit->add_option("--format", fit_args.format)->check(CLI::IsMember(formats))->capture_default_str();

    ExceptionsArgs exc_args;
    auto* exceptions = app.add_subcommand("exceptions", "records above the Cramer threshold");
    exceptions->add_option("--pattern", exc_args.pattern)->capture_default_str();
    exceptions->add_option("--q-lo", exc_args.q_lo)->capture_default_str();
    exceptions->add_option("--q-hi", exc_args.q_hi)->required();
    exceptions->add_option("--limit", exc_args.limit)->required();
    exceptions->add_option("--workers", exc_args.workers)->check(CLI::Range(1u, 1024u))->capture_default_str();
    exceptions->add_option("--format", exc_args.format)->check(CLI::IsMember(formats))->capture_default_str();

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "records with trend curves for plotting");
    report->add_option("--q", report_args.q)->required();
    report->add_option("--r", report_args.r)->required();
    report->add_option("--pattern", report_args.pattern)->capture_default_str();
    report->add_option("--limit", report_args.limit)->required();
    report->add_option("--format", report_args.format)->check(CLI::IsMember(formats))->capture_default_str();

    std::vector<std::string> argv_store{"gaplab"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*scan) return cmd_scan(scan_args, out);
        if (*survey) return cmd_survey(survey_args, out);
        if (*constants) return cmd_constants(constants_args, out);
        if (*totient_cmd) return cmd_totient(totient_args, out);
        if (*tau) return cmd_tau(tau_args, out);
        if (*fit) return cmd_fit(fit_args, out);
        if (*exceptions) return cmd_exceptions(exc_args, out);
        if (*report) return cmd_report(report_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace gaplab::cli
