#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpofdm/cli.hpp"

using namespace cpofdm;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path dir() {
    const auto d = fs::temp_directory_path() / "cpofdm_test_cli";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> generate_args(const fs::path& out, std::string n, std::string cp, std::string symbols,
                                       std::string blocks, std::string snr, std::string taps, std::string seed) {
    return {"generate", "--n", n, "--cp", cp, "--symbols", symbols, "--blocks", blocks, "--mod", "4",
            "--snr-db", snr, "--taps", taps, "--seed", seed, "--out", out.string()};
}

} // namespace

TEST_CASE("generate writes a 16-sample minimal file and its sidecar", "[cli]") {
    const auto path = dir() / "minimal.iq";
    const auto r = invoke(generate_args(path, "2", "2", "2", "2", "inf", "2", "5"));
    CHECK(r.code == 0);
    CHECK(r.out == "16\n");
    CHECK(fs::file_size(path) == 16 * 8);
    const auto meta = read_key_values(meta_path(path));
    CHECK(meta.at("n") == "2");
    CHECK(meta.at("cp") == "2");
    CHECK(meta.at("symbols") == "2");
    CHECK(meta.at("blocks") == "2");
    CHECK(meta.at("mod") == "4");
    CHECK(meta.at("seed") == "5");

    const auto again = dir() / "minimal2.iq";
    CHECK(invoke(generate_args(again, "2", "2", "2", "2", "inf", "2", "5")).code == 0);
    CHECK(slurp(again) == slurp(path));
}

TEST_CASE("generate rejects a CP longer than the symbol", "[cli]") {
    const auto r = invoke(generate_args(dir() / "bad.iq", "4", "5", "2", "2", "10", "2", "1"));
    CHECK(r.code == 1);
    CHECK(r.err.rfind("usage-error: ", 0) == 0);
    CHECK(r.err.find("P (5) must not exceed N (4)") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("estimate recovers N from a generated file", "[cli]") {
    const auto path = dir() / "est.iq";
    REQUIRE(invoke(generate_args(path, "16", "4", "60", "2", "25", "2", "3")).code == 0);
    const auto report = dir() / "est.csv";
    const auto r = invoke({"estimate", "--in", path.string(), "--cp", "4", "--taps", "2", "--n-min", "8", "--n-max",
                        "32", "--report", report.string()});
    CHECK(r.code == 0);
    CHECK(r.out == "16\n");
    const auto text = slurp(report);
    CHECK(text.rfind("n_prime,m_prime,zeta_hat,metric,min_mdl\n", 0) == 0);
    CHECK(text.find("\n20,120,") != std::string::npos);
}

TEST_CASE("estimate error paths", "[cli]") {
    const auto path = dir() / "short.iq";
    REQUIRE(invoke(generate_args(path, "8", "2", "4", "2", "20", "2", "1")).code == 0);  // 80 samples

    auto r = invoke({"estimate", "--in", path.string(), "--cp", "2", "--taps", "2", "--n-min", "4", "--n-max", "16"});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("data-error: ", 0) == 0);
    CHECK(r.err.find("324") != std::string::npos);  // (16+2)^2

    r = invoke({"estimate", "--in", path.string(), "--cp", "2", "--taps", "3", "--n-min", "4", "--n-max", "6"});
    CHECK(r.code == 1);

    r = invoke({"estimate", "--in", path.string(), "--cp", "2", "--taps", "2", "--n-min", "7", "--n-max", "4"});
    CHECK(r.code == 1);

    r = invoke({"estimate", "--in", (dir() / "missing.iq").string(), "--cp", "2", "--taps", "2", "--n-min", "2",
             "--n-max", "3"});
    CHECK(r.code == 2);
    CHECK(r.err.find("missing.iq") != std::string::npos);
}

TEST_CASE("usage errors", "[cli]") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    auto r = invoke({"rank-check", "--unknown-flag", "3"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("usage-error: ", 0) == 0);
    CHECK(invoke({"generate", "--n", "8"}).code == 1);  // missing required flags
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("rank-check demonstrates the N=P=L=2 example", "[cli]") {
    const auto r = invoke({"rank-check", "--n", "2", "--cp", "2", "--taps", "2", "--symbols", "2", "--blocks", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("4,4,3,3\n") != std::string::npos);
    CHECK(r.out.find("duplicate_pairs=(2,4)") != std::string::npos);
    CHECK(r.out.find("duplicate_check=true") != std::string::npos);

    CHECK(invoke({"rank-check", "--n", "4", "--cp", "2", "--taps", "3"}).code == 1);
}

TEST_CASE("sweep", "[cli]") {
    const auto spec_path = dir() / "tiny.spec";
    std::ofstream(spec_path) << "[tiny]\naxis = snr_db\nvalues = 10, inf\nn = 8\ncp = 3\ntaps = 2\n"
                                "symbols = 20\nblocks = 2\ntrials = 5\nseed = 9\n";
    const auto csv = dir() / "tiny.csv";
    auto r = invoke({"sweep", "--spec", spec_path.string(), "--out", csv.string(), "--threads", "2"});
    CHECK(r.code == 0);
    const auto first = slurp(csv);
    CHECK(first.rfind("axis,axis_value,pd,trials,ci_halfwidth\n", 0) == 0);
    CHECK(first.find("\nsnr_db,inf,") != std::string::npos);
    CHECK(fs::exists(provenance_path(csv)));

    r = invoke({"sweep", "--spec", spec_path.string(), "--out", csv.string(), "--threads", "1"});
    CHECK(r.code == 0);
    CHECK(slurp(csv) == first);

    r = invoke({"sweep", "--spec", spec_path.string(), "--out", csv.string(), "--trials", "0"});
    CHECK(r.code == 1);
    r = invoke({"sweep", "--preset", "fig3", "--out", csv.string(), "--scale", "huge"});
    CHECK(r.code == 1);
    r = invoke({"sweep", "--out", csv.string()});
    CHECK(r.code == 1);

    std::ofstream(spec_path) << "[bad]\naxis = cp_len\nvalues = 3, 20\nn = 8\ntaps = 2\nsymbols = 20\nblocks = 2\n";
    r = invoke({"sweep", "--spec", spec_path.string(), "--out", csv.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("cp_len=20") != std::string::npos);
}

TEST_CASE("sweep fig3 preset covers L = 1..10", "[cli][montecarlo]") {
    const auto csv = dir() / "fig3.csv";
    const auto r = invoke({"sweep", "--preset", "fig3", "--scale", "desk", "--trials", "2", "--out", csv.string()});
    CHECK(r.code == 0);
    const auto text = slurp(csv);
    for (int l = 1; l <= 10; ++l) CHECK(text.find("num_taps," + std::to_string(l) + ",") != std::string::npos);
}
