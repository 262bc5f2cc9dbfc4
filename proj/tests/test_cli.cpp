#include "gaplab/cli.hpp"
#include "gaplab/error.hpp"
#include "gaplab/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

using namespace gaplab;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("gaplab_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("parse_count") {
    CHECK(cli::parse_count("1000") == 1000);
    CHECK(cli::parse_count("1e8") == 100000000);
    CHECK(cli::parse_count("3.7e6") == 3700000);
    CHECK(cli::parse_count("2.5E+3") == 2500);
    CHECK(cli::parse_count("1.50e2") == 150);
    CHECK_THROWS_AS(cli::parse_count("1.50"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_count("2.5"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_count("-4"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_count("1e30"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_count("12x"), std::invalid_argument);
}

TEST_CASE("scan csv") {
    const auto r = invoke({"scan", "--q", "2", "--r", "1", "--pattern", "k1", "--limit", "100", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    CHECK(ls[0] == csv_header());
    std::istringstream in(r.out);
    const auto recs = read_csv(in);
    REQUIRE(recs.size() == 4);
    CHECK(recs[0].gap == 2);
    CHECK(recs[1].gap == 4);
    CHECK(recs[2].gap == 6);
    CHECK(recs[3].gap == 8);
    CHECK(recs[3].start == 89);
}

TEST_CASE("scan compat marks extra-large gaps") {
    const auto r = invoke({"scan", "--q", "1605", "--r", "341", "--pattern", "k1", "--limit", "3700000"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() >= 2);
    CHECK(ls[ls.size() - 2] == "12.654756658 14.473481538 11.833119051 208650 3415781 3624431 q=1605 r=341");
    CHECK(ls.back() == "extra-large ratio=1.0786589153");
    std::istringstream tokens(ls[ls.size() - 2]);
    std::vector<std::string> words;
    for (std::string w; tokens >> w;) words.push_back(w);
    CHECK(words.size() == 8);
}

TEST_CASE("compat prints nan for w and u when k > 1") {
    const auto r = invoke({"scan", "--q", "2", "--r", "1", "--pattern", "twin", "--limit", "1000"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).back().rfind("nan nan ", 0) == 0);
}

TEST_CASE("scan json round trip and skip-ahead mode") {
    const auto a = invoke({"scan", "--q", "10", "--r", "3", "--limit", "1e6", "--format", "json"});
    const auto b = invoke({"scan", "--q", "10", "--r", "3", "--limit", "1e6", "--format", "json", "--mode", "skip-ahead"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto recs = from_json(a.out);
    REQUIRE(!recs.empty());
    CHECK(recs.front().q == 10);
    CHECK(std::isfinite(recs.front().rescaled.w));
    const auto twin = invoke({"scan", "--q", "2", "--r", "1", "--pattern", "twin", "--limit", "1000", "--format", "json"});
    const auto parsed = nlohmann::json::parse(twin.out);
    CHECK(parsed[0]["w"].is_null());
    CHECK(std::isnan(from_json(twin.out).front().rescaled.w));
}

TEST_CASE("exit codes") {
    const auto bad_class = invoke({"scan", "--q", "4", "--r", "2", "--limit", "100"});
    CHECK(bad_class.code == cli::kExitDomain);
    CHECK(bad_class.err.find("invalid class") != std::string::npos);
    CHECK(invoke({"scan", "--q", "2", "--r", "1", "--pattern", "nope", "--limit", "100"}).code == cli::kExitUsage);
    CHECK(invoke({"scan", "--q", "2", "--r", "1"}).code == cli::kExitUsage);
    CHECK(invoke({"scan", "--q", "2", "--r", "1", "--limit", "abc"}).code == cli::kExitUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
    CHECK(invoke({"scan", "--q", "2", "--r", "1", "--pattern", "twin", "--limit", "9223372036854775807"}).code ==
          cli::kExitDomain);
    CHECK(invoke({"fit", "--input", "/nonexistent/file.csv"}).code == cli::kExitIo);
}

TEST_CASE("totient and constants") {
    const auto t = invoke({"totient", "--q", "30", "--pattern", "quad", "--format", "json"});
    REQUIRE(t.code == 0);
    const auto obj = nlohmann::json::parse(t.out);
    CHECK(obj["value"] == 1);
    CHECK(obj["allowed"] == nlohmann::json::array({11}));
    const auto csv = invoke({"totient", "--q", "30", "--pattern", "quad"});
    CHECK(lines(csv.out).at(1) == "30,\"0,2,6,8\",1,\"11\"");

    const auto c = invoke({"constants", "--pattern", "twin", "--prime-bound", "1e6", "--format", "json"});
    REQUIRE(c.code == 0);
    const double value = nlohmann::json::parse(c.out)[0]["value"].get<double>();
    CHECK(value == doctest::Approx(1.32032363169373914785562422).epsilon(1e-7));
    CHECK(invoke({"constants", "--pattern", "0,2,4"}).code == cli::kExitDomain);
}

TEST_CASE("survey files") {
    const auto dir = scratch_dir("survey");
    const auto r = invoke({"survey", "--q", "4", "--pattern", "k1", "--limit", "100", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "4stats.txt") == "1 0.5 1\n2 1 2\n3 1 2\n4 0.5 1\n");
    CHECK(fs::exists(dir / "4_1e1.txt"));
    CHECK(fs::exists(dir / "4_1e2.txt"));
    const auto decade2 = lines(slurp(dir / "4_1e2.txt"));
    REQUIRE(decade2.size() == 5);
    CHECK(decade2[2].find(" 16 73 89 q=4 r=1") != std::string::npos);
    CHECK(decade2[4].find(" 12 31 43 q=4 r=3") != std::string::npos);

    const auto empty = invoke({"survey", "--q", "30", "--pattern", "quad", "--limit", "10", "--out", dir.string()});
    REQUIRE(empty.code == 0);
    CHECK(slurp(dir / "30stats.txt") == "1 0 0\n2 0 0\n");
    fs::remove_all(dir);
}

TEST_CASE("survey output is identical across worker counts") {
    const auto one = scratch_dir("w1"), many = scratch_dir("w5");
    REQUIRE(invoke({"survey", "--q", "13", "--limit", "2e6", "--workers", "1", "--out", one.string()}).code == 0);
    REQUIRE(invoke({"survey", "--q", "13", "--limit", "2e6", "--workers", "5", "--out", many.string()}).code == 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(one)) {
        ++files;
        CHECK(slurp(entry.path()) == slurp(many / entry.path().filename()));
    }
    CHECK(files >= 3);
    fs::remove_all(one);
    fs::remove_all(many);
}

TEST_CASE("GAPLAB_OUT overrides --out and unwritable targets fail with 4") {
    const auto dir = scratch_dir("env");
    ::setenv("GAPLAB_OUT", dir.string().c_str(), 1);
    const auto r = invoke({"survey", "--q", "4", "--limit", "100", "--out", "/nonexistent/ignored"});
    ::unsetenv("GAPLAB_OUT");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "4stats.txt"));

    std::ofstream(dir / "plain_file") << "x";
    CHECK(invoke({"survey", "--q", "4", "--limit", "100", "--out", (dir / "plain_file").string()}).code == cli::kExitIo);
    fs::remove_all(dir);
}

TEST_CASE("fit from a pooled file and from synthetic draws") {
    const auto dir = scratch_dir("fit");
    REQUIRE(invoke({"survey", "--q", "97", "--limit", "1e6", "--out", dir.string(), "--pooled", "w"}).code == 0);
    const auto f = invoke({"fit", "--input", (dir / "97_pooled_w.csv").string()});
    REQUIRE(f.code == 0);
    const auto obj = nlohmann::json::parse(f.out);
    CHECK(obj["alpha"].get<double>() > 0);
    CHECK(obj["n"].get<int>() > 500);

    // a csv with record columns and a chosen column
    const auto scan = invoke({"scan", "--q", "3", "--r", "1", "--limit", "1e7", "--format", "csv"});
    std::ofstream(dir / "recs.csv") << scan.out;
    const auto h = invoke({"fit", "--input", (dir / "recs.csv").string(), "--column", "h", "--method", "moments"});
    CHECK(h.code == 0);

    const auto s1 = invoke({"fit", "--synthetic", "5000", "--alpha", "2", "--mu", "1", "--seed", "3"});
    const auto s2 = invoke({"fit", "--synthetic", "5000", "--alpha", "2", "--mu", "1", "--seed", "3"});
    REQUIRE(s1.code == 0);
    CHECK(s1.out == s2.out);
    CHECK(nlohmann::json::parse(s1.out)["alpha"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(invoke({"fit"}).code == cli::kExitUsage);
    fs::remove_all(dir);
}

TEST_CASE("tau, exceptions and report commands") {
    const auto tau = invoke({"tau", "--q", "2", "--r", "1", "--x", "100"});
    REQUIRE(tau.code == 0);
    CHECK(lines(tau.out).at(1).rfind("2,8,", 0) == 0);
    const auto tj = nlohmann::json::parse(invoke({"tau", "--q", "2", "--r", "1", "--x", "1e6", "--format", "json"}).out);
    CHECK(tj["check"]["count_identity"] == true);

    const auto exc = invoke({"exceptions", "--q-lo", "1600", "--q-hi", "1610", "--limit", "3.7e6"});
    REQUIRE(exc.code == 0);
    CHECK(exc.out.find("1605,341,\"0\",") != std::string::npos);

    const auto rep = invoke({"report", "--q", "2", "--r", "1", "--limit", "1000", "--format", "json"});
    REQUIRE(rep.code == 0);
    const auto rows = nlohmann::json::parse(rep.out);
    CHECK(rows.size() == 7);
    CHECK(rows[3]["G"] == 8);
    CHECK(rows[3]["x"] == 97);
}

TEST_CASE("record serialization round trips") {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<OutputRecord> recs{
        {2, 1, "0", 1, 2, 3, 5, {nan, nan, 0.1 + 0.2, -1e-300}},
        {2310, 1, "0,2,6,8", 7, 123456, 9007199254740993ULL, 9007199254864449ULL, {1.0 / 3.0, 2e10, -0.0, 5e-324}},
    };
    std::ostringstream csv;
    write_csv(csv, recs);
    std::istringstream back(csv.str());
    CHECK(read_csv(back) == recs);
    CHECK(from_json(to_json(recs)) == recs);
    CHECK(split_csv_line("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
    std::istringstream broken("nope\n");
    CHECK_THROWS_AS(read_csv(broken), IoError);
    CHECK_THROWS_AS(from_json("{]"), IoError);
    CHECK(compat_line(recs[0]) == "nan nan 0.3 2 3 5 q=2 r=1");
}
