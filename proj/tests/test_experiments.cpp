#include <fstream>
#include <sstream>

#include "doctest.h"
#include "experiments.hpp"
#include "util.hpp"

using namespace nlslab;
using namespace nlslab::experiments;

#ifndef GOLDEN_DIR
#define GOLDEN_DIR "tests/golden"
#endif

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string error_of(const std::string& id, const std::string& cfg) {
    try {
        run(id, parse_config_text(cfg), 1, 1);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

Json without_wall(const std::string& text) {
    auto j = Json::parse(text);
    j["meta"].erase("wall_ms");
    return j;
}

}  // namespace

TEST_CASE("config text parsing") {
    auto c = parse_config_text("# comment\n  N_list = 16, 32 # trailing\n\nalpha=0.7\n");
    REQUIRE(c.entries.size() == 2);
    CHECK(c.entries[0].first == "N_list");
    CHECK(c.entries[0].second == "16, 32");
    CHECK(c.entries[1].second == "0.7");
    CHECK_THROWS_AS(parse_config_text("no equals sign"), ValidationError);
    CHECK_THROWS_AS(parse_config_text("= 3"), ValidationError);
}

TEST_CASE("every experiment is listed with a schema") {
    CHECK(experiment_ids().size() == 8);
    for (const auto& id : experiment_ids()) CHECK_FALSE(experiment_schema(id).empty());
    CHECK_THROWS_AS(experiment_schema("nope"), ValidationError);
}

TEST_CASE("validation errors name the field") {
    CHECK(error_of("hypothesis-scan", "N_list =\n").find("hypothesis-scan.N_list") != std::string::npos);
    CHECK(error_of("hypothesis-scan", "bogus = 1\n").find("hypothesis-scan.bogus") != std::string::npos);
    CHECK(error_of("annulus-count", "r2sq = x\n").find("annulus-count.r2sq") != std::string::npos);
    CHECK(error_of("annulus-count", "naive = maybe\n").find("annulus-count.naive") != std::string::npos);
    CHECK(error_of("energy-track", "sign = 0\n").find("energy-track.sign") != std::string::npos);
    CHECK(error_of("annulus-count", "r2sq = 1\nr2sq = 2\n").find("given twice") != std::string::npos);
    CHECK(error_of("no-such", "").find("unknown experiment") != std::string::npos);
}

TEST_CASE("cap refusals surface as CapExceeded") {
    CHECK_THROWS_AS(run("h-spectrum", parse_config_text("N_list = 32\n"), 1, 1), CapExceeded);
}

TEST_CASE("same config and seed give identical rows") {
    auto cfg = parse_config_text("N_list = 16,32\nrandom_centers = 3\n");
    auto a = run("hypothesis-scan", cfg, 42, 1), b = run("hypothesis-scan", cfg, 42, 2);
    CHECK(without_wall(to_json(a)) == without_wall(to_json(b)));
    CHECK(to_csv(a) == to_csv(b));
}

TEST_CASE("JSON round trip and layout") {
    auto r = run("annulus-count", parse_config_text("r2sq = 9\n"), 7, 1);
    auto text = to_json(r);
    auto j = Json::parse(text);
    CHECK(j.dump(2) + "\n" == text);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"experiment", "params", "rows", "summary", "meta"});
    CHECK(j["meta"]["seed"] == 7);
    CHECK(j["params"]["r2sq"] == "9");
    CHECK(j["rows"][0]["count"] == j["rows"][0]["naive_count"]);
}

TEST_CASE("empty rows still give a valid document") {
    Report r;
    r.experiment = "x";
    auto j = Json::parse(to_json(r));
    CHECK(j["rows"].is_array());
    CHECK(j["rows"].empty());
    CHECK(to_csv(r) == "\n");
}

TEST_CASE("CSV uses LF endings and shortest round-trip numbers") {
    CHECK(shortest(0.1) == "0.1");
    CHECK(shortest(1.0 / 3) == "0.3333333333333333");
    CHECK(std::stod(shortest(2.0 / 7)) == 2.0 / 7);
    CHECK(shortest(1e300) == "1e+300");
    Report r;
    r.rows.push_back(Json{{"a", 0.5}, {"b", "x,y"}, {"c", nullptr}});
    r.rows.push_back(Json{{"a", 2}, {"d", true}});
    CHECK(to_csv(r) == "a,b,c,d\n0.5,\"x,y\",,\n2,,,true\n");
}

TEST_CASE("golden outputs") {
    auto r = run("annulus-count", parse_config_text("r2sq = 9\n"), 7, 1);
    CHECK(to_csv(r) == slurp(GOLDEN_DIR "/annulus_count.csv"));
    CHECK(without_wall(to_json(r)) == without_wall(slurp(GOLDEN_DIR "/annulus_count.json")));
    auto t = run("trilinear-scan", parse_config_text("lambdas = 4,8\nuv_samples = 10\n"), 7, 1);
    CHECK(to_csv(t) == slurp(GOLDEN_DIR "/trilinear_scan.csv"));
}

TEST_CASE("small runs of every experiment") {
    const std::vector<std::pair<std::string, std::string>> small = {
        {"annulus-count", "form = 2,1,3\ncx = 1/3\ncy = 0.5\nr1sq = 4\nr2sq = 40\nboundary = co\n"},
        {"hypothesis-scan", "N_list = 16,32,64\nrandom_centers = 2\n"},
        {"reduction-verify", "n_lo = -3\nn_hi = 3\nK_set = 1,2\nradius_cap = 60\ncalib_radius_cap = 60\n"},
        {"h-spectrum", "N_list = 2,4\n"},
        {"strichartz-scan", "N_list = 8,16\nrandom_members = 2\n"},
        {"trilinear-scan", "lambdas = 4,8\ngeometries = base,wide\nuv_samples = 5\n"},
        {"symbol-bound-scan", "N_list = 64,128\nsamples = 500\nlambda6_states = 2\n"},
        {"energy-track", "T = 0.02\ndt = 0.005\nrefinements = 2\n"},
    };
    for (const auto& [id, cfg] : small) {
        CAPTURE(id);
        auto r = run(id, parse_config_text(cfg), 3, 1);
        CHECK(r.experiment == id);
        CHECK_FALSE(r.rows.empty());
        CHECK(Json::parse(to_json(r))["rows"].size() == r.rows.size());
    }
}
