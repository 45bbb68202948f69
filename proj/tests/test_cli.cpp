#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hardylab/cli.hpp"
#include "json.hpp"

using hardylab::cli::run;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int c = run(args, o, e);
    return {c, o.str(), e.str()};
}

std::filesystem::path tmp(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("hardylab_test_" + name);
}

}  // namespace

TEST_CASE("check-intertwine example is exact") {
    const auto r = call({"check-intertwine", "--phi", R"({"tag":"polynomial","coeffs":[[0,0],[2,0]]})", "--psi", "z",
                         "--x", "cz/2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["exact_zero"].get<bool>());
    CHECK(j["residual"].get<double>() == 0.0);
    CHECK(j["tolerances"].contains("exact_zero"));
    CHECK(j["command"] == "check-intertwine");
}

TEST_CASE("image-test violation exits 2 and lists violations") {
    const auto r = call({"image-test", "--psi", "z", "--phi", "z/2", "--radial", "8", "--angular", "32"});
    CHECK(r.code == 2);
    const auto j = json::parse(r.out);
    CHECK(j["outside"].get<int>() > 0);
    CHECK_FALSE(j["violations"].empty());
    const auto ok = call({"image-test", "--psi", "z/2", "--phi", "z", "--radial", "8", "--angular", "32"});
    CHECK(ok.code == 0);
}

TEST_CASE("usage errors exit 1") {
    CHECK(call({}).code == 1);
    CHECK(call({"nonsense"}).code == 1);
    CHECK(call({"series", "--symbol", "nope"}).code == 1);
    CHECK(call({"series", "--symbol", "{bad json"}).code == 1);
    CHECK(call({"series", "--symbol", "z", "--N", "8"}).code == 1);
    CHECK(call({"series", "--symbol", "z", "--N", "9000"}).code == 1);
    CHECK(call({"series", "--symbol", "z", "--mesh", "32"}).code == 1);
    CHECK(call({"check-intertwine", "--phi", "z", "--psi", "z", "--x", "bogus"}).code == 1);
    const auto e = call({"series", "--symbol", "nope"});
    CHECK(e.err.find("tag") != std::string::npos);  // schema pointer
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("typed math failures exit 2") {
    const auto r = call({"build-operator", "--kind", "composition", "--omega", "z+1", "--N", "16"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["error"]["kind"] == "not-self-map");
    CHECK(call({"deddens", "--phi", "z/2", "--N", "64", "--cutoff", "4"}).code == 2);
    CHECK(call({"finite-dim", "--A", "[[1,0],[0,2]]", "--B", "[[3,0],[0,4]]", "--lambda", "2"}).code == 2);
}

TEST_CASE("reports are byte identical across runs") {
    const std::vector<std::vector<std::string>> cmds{
        {"ee-scan", "--symbol", "z2z", "--grid", "6:6", "--N", "64"},
        {"series", "--symbol", "unit_singular", "--N", "32", "--at", "0.5"},
        {"finite-dim", "--planted", "4", "--seed", "3", "--lambda", "0.5"},
        {"build-operator", "--symbol", "z+1", "--N", "32", "--norm"},
        {"recover", "--x", R"({"omega":"z/2","h":"z+1"})", "--N", "32"},
    };
    for (const auto& c : cmds) {
        const auto a = call(c), b = call(c);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("output files and plots") {
    const auto out = tmp("ee.json"), svg = tmp("ee.svg");
    const auto r = call({"ee-scan", "--symbol", "z", "--grid", "[[2,0],[0.5,0],[-1,0]]", "--out", out.string(), "--svg",
                         svg.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(out);
    const auto j = json::parse(f);
    REQUIRE(j["verdicts"].size() == 3);
    CHECK(j["verdicts"][0]["status"] == "in");
    CHECK(j["verdicts"][1]["status"] == "out");
    CHECK(j["verdicts"][2]["status"] == "in");
    CHECK(j["verdicts"][0]["lambda"] == json::array({2.0, 0.0}));
    std::ifstream s(svg);
    std::stringstream ss;
    ss << s.rdbuf();
    CHECK(ss.str().find("width=\"1024\"") != std::string::npos);
    CHECK(ss.str().find("undetermined") != std::string::npos);

    const auto csv = tmp("raster.csv");
    CHECK(call({"image-test", "--psi", "z/2", "--phi", "z2z", "--radial", "4", "--angular", "16", "--raster-csv",
                csv.string(), "--raster-side", "16"})
              .code == 0);
    std::ifstream c(csv);
    std::string header;
    std::getline(c, header);
    CHECK(header == "x,y,valence,status");
    int rows = 0;
    for (std::string line; std::getline(c, line);) ++rows;
    CHECK(rows == 256);
    std::filesystem::remove(out);
    std::filesystem::remove(svg);
    std::filesystem::remove(csv);
}

TEST_CASE("operator CSV round trip through the CLI") {
    const auto csv = tmp("op.csv");
    REQUIRE(call({"build-operator", "--kind", "wcomp", "--omega", "z/2", "--weight", "z+1", "--N", "32", "--csv",
                  csv.string()})
                .code == 0);
    const auto r = call({"recover", "--x", "csv:" + csv.string(), "--N", "32"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["consistent"].get<bool>());
    std::filesystem::remove(csv);
}

TEST_CASE("config files expand to flags") {
    const auto cfg = tmp("cfg.json");
    {
        std::ofstream f(cfg);
        f << R"({"command": "wold-check", "args": {"psi": "z", "N": 64, "cutoff": 20, "lambda": ["0.3", "0.5i"]}})";
    }
    const auto args = hardylab::cli::expand_config({"--config", cfg.string()});
    CHECK(args.front() == "wold-check");
    const auto r = call({"--config", cfg.string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["pass"].get<bool>());
    CHECK(j["columns"][0]["checks"].size() == 2);
    std::filesystem::remove(cfg);
}

TEST_CASE("vandermonde two-branch example") {
    const auto r = call({"vandermonde", "--phi", "z2z", "--psi", R"({"tag":"polynomial","coeffs":[-0.2,0.01]})",
                         "--branches"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["max_u"].get<double>() < 1e-8);
    CHECK(j["intertwine"]["residual"].get<double>() < 1e-8);
    CHECK_FALSE(j["recovery"]["consistent"].get<bool>());
}
