#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <algorithm>
#include <sstream>
#include <string>

#include "adopt/series.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = std::string(ADOPT_CLI) + " " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_gbm_series(const fs::path& path, int n) {
    std::ofstream out(path);
    out << "date,price\n";
    double p = 2.0;
    unsigned state = 12345;
    for (int i = 0; i < n; ++i) {
        out << adopt::format_date(adopt::parse_date("2013-01-01") + std::chrono::days{i}) << ',' << p << '\n';
        // Small deterministic pseudo-random walk.
        state = state * 1103515245u + 12345u;
        p *= std::exp(0.02 * ((state >> 16) % 1000 / 1000.0 - 0.5));
    }
}

}  // namespace

TEST_CASE("price closed form prints the reference value") {
    const auto dir = scratch("price");
    const auto out = dir / "p.json";
    REQUIRE(run("price --method closed --spot 2 --strike 0.005 --ctr 0.3 --rate 0.05 --sigma 0.5 -o " +
                out.string()) == 0);
    const auto report = nlohmann::json::parse(slurp(out));
    CHECK(report["price"].get<double>() == doctest::Approx(0.0016949026752235633).epsilon(1e-11));
    CHECK(report["method"] == "closed");
    CHECK(report["inputs"]["ctr"].get<double>() == 0.3);
}

TEST_CASE("sv-lattice prices below crr on mean-reverting inputs") {
    const auto dir = scratch("mean_reverting");
    const std::string common =
        " --spot 0.7417 --strike 0.0223 --rate 0.05 --expiry 0.0384 --steps 14 --ctr 0.03";
    REQUIRE(run("price --method sv-lattice --sigma0 0.8723 --kappa 96.4953 --theta 0.2959 --delta 14.9874" +
                common + " -o " + (dir / "sv.json").string()) == 0);
    REQUIRE(run("price --method crr --sigma 0.8723" + common + " -o " + (dir / "crr.json").string()) == 0);
    const double sv = nlohmann::json::parse(slurp(dir / "sv.json"))["price"];
    const double crr = nlohmann::json::parse(slurp(dir / "crr.json"))["price"];
    CHECK(sv < crr);
}

TEST_CASE("usage errors exit with 2 and write nothing") {
    const auto dir = scratch("usage");
    CHECK(run("price --method bogus -o " + (dir / "x.json").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "x.json"));
    CHECK(run("price --ctr 0 -o " + (dir / "y.json").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "y.json"));
    CHECK(run("converge --methods ''") == 2);
    CHECK(run("validate --points 0") == 2);
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("converge writes 18 rows with Tian-TRIN ahead of CRR at n = 100") {
    const auto dir = scratch("converge");
    const auto out = dir / "c.csv";
    REQUIRE(run("converge --n 10,100,1000 --spot 2 --strike 0.005 --ctr 0.3 -o " + out.string()) == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,n,price,abs_error");
    int rows = 0;
    double crr = 0.0, tian = 0.0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("crr,100,", 0) == 0) crr = std::stod(line.substr(line.rfind(',') + 1));
        if (line.rfind("tian-trin,100,", 0) == 0) tian = std::stod(line.substr(line.rfind(',') + 1));
    }
    CHECK(rows == 18);
    CHECK(tian < crr);
}

TEST_CASE("diagnose emits the verdict and data tables") {
    const auto dir = scratch("diagnose");
    write_gbm_series(dir / "s.csv", 60);
    REQUIRE(run("diagnose -i " + (dir / "s.csv").string() + " --out-dir " + dir.string()) == 0);
    for (const char* f : {"verdict.json", "acf.csv", "qq.csv", "hist.csv"}) CHECK(fs::exists(dir / f));
    const auto verdict = nlohmann::json::parse(slurp(dir / "verdict.json"))["verdict"];
    CHECK(verdict["shapiro_p"].get<double>() >= 0.0);
    CHECK(verdict["is_gbm"].is_boolean());

    std::ofstream(dir / "one.csv") << "date,price\n2013-01-01,2\n";
    CHECK(run("diagnose -i " + (dir / "one.csv").string() + " --out-dir " + dir.string()) == 1);
    std::ofstream(dir / "bad.csv") << "date,price\n2013-01-01,2\n2013-01-02,x\n";
    const auto err = dir / "err.txt";
    const std::string cmd = std::string(ADOPT_CLI) + " diagnose -i " + (dir / "bad.csv").string() +
                            " --out-dir " + dir.string() + " 2> " + err.string() + " >/dev/null";
    CHECK(std::system(cmd.c_str()) != 0);
    CHECK(slurp(err).find("line 3") != std::string::npos);
}

TEST_CASE("estimate reports both models") {
    const auto dir = scratch("estimate");
    write_gbm_series(dir / "s.csv", 60);
    REQUIRE(run("estimate -i " + (dir / "s.csv").string() + " -o " + (dir / "e.json").string()) == 0);
    const auto e = nlohmann::json::parse(slurp(dir / "e.json"));
    CHECK(e["gbm"]["sigma"].get<double>() > 0.0);
    CHECK(e["sv"]["theta"].get<double>() >= 0.0);
}

TEST_CASE("validate exits 0 when every grid point is contained") {
    const auto dir = scratch("validate");
    const auto out = dir / "v.csv";
    CHECK(run("validate --param theta --points 2 --paths 20000 --steps 50 -o " + out.string()) == 0);
    const auto text = slurp(out);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("simulate writes ledgers and respects a JSON config") {
    const auto dir = scratch("simulate");
    std::ofstream(dir / "cfg.json") << R"({"drift": 4.0, "sell_ratio": 0.0, "seed": 9, "days": 5, "spot": 0.75})";
    REQUIRE(run("simulate --config " + (dir / "cfg.json").string() + " --out-dir " + dir.string()) == 0);
    for (const char* f : {"market.csv", "rtb.csv", "options.csv", "revenue.csv", "summary.json"})
        CHECK(fs::exists(dir / f));
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary["revenue"]["mean"] == summary["revenue"]["rtb_only_mean"]);
    CHECK(summary["spot"].get<double>() == 0.75);
    const auto market = slurp(dir / "market.csv");
    CHECK(std::count(market.begin(), market.end(), '\n') == 6);

    CHECK(run("simulate --market " + (dir / "missing.csv").string() + " --out-dir " + dir.string()) == 1);
    std::ofstream(dir / "bad.json") << R"({"no_such_flag": 1})";
    CHECK(run("simulate --config " + (dir / "bad.json").string() + " --out-dir " + dir.string()) == 2);
}

TEST_CASE("simulate replays a market file") {
    const auto dir = scratch("replay");
    std::ofstream(dir / "m.csv") << "date,avg_cpm,supply\n2013-02-08,0.9585,8298\n2013-02-09,0.9770,8277\n"
                                    "2013-02-10,0.9666,8190\n2013-02-11,0.8754,7971\n2013-02-12,0.8513,8097\n"
                                    "2013-02-13,0.8294,8201\n2013-02-14,0.9903,3812\n";
    REQUIRE(run("simulate --market " + (dir / "m.csv").string() +
                " --spot 0.7427 --strike 0.0223 --option-price 0.0025 --out-dir " + dir.string()) == 0);
    const auto options = slurp(dir / "options.csv");
    CHECK(options.find(",201,201,") != std::string::npos);
    CHECK(options.find(",201,114,") != std::string::npos);
}
