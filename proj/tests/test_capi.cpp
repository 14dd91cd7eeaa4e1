#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlslab/nlslab.h"

TEST_CASE("version and experiment listing") {
    CHECK(std::string(nlslab_version()).size() > 0);
    CHECK(nlslab_experiment_count() == 8);
    CHECK(std::string(nlslab_experiment_id(0)) == "annulus-count");
    CHECK(nlslab_experiment_id(99) == nullptr);
    char* schema = nullptr;
    REQUIRE(nlslab_experiment_schema("energy-track", &schema) == NLSLAB_OK);
    CHECK(std::string(schema).find("lambda=4\n") == 0);
    nlslab_string_free(schema);
}

TEST_CASE("run, serialize and write") {
    nlslab_report* r = nullptr;
    REQUIRE(nlslab_run("annulus-count", "r2sq = 25\nform = unit\n", 1, 1, &r) == NLSLAB_OK);
    CHECK(nlslab_report_row_count(r) == 1);
    CHECK(nlslab_report_wall_ms(r) >= 0);
    char* csv = nullptr;
    REQUIRE(nlslab_report_serialize(r, "csv", &csv) == NLSLAB_OK);
    CHECK(std::string(csv).rfind("count,naive_count,area,gauss_error\n81,81,", 0) == 0);
    nlslab_string_free(csv);
    const char* path = "capi_test_report.json";
    REQUIRE(nlslab_report_write(r, "json", path) == NLSLAB_OK);
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().find("\"experiment\": \"annulus-count\"") != std::string::npos);
    std::remove(path);
    CHECK(nlslab_report_serialize(r, "xml", &csv) == NLSLAB_ERR_VALIDATION);
    CHECK(nlslab_report_write(r, "json", "/nonexistent/dir/x.json") == NLSLAB_ERR_VALIDATION);
    nlslab_report_free(r);
}

TEST_CASE("error codes and last error") {
    nlslab_report* r = nullptr;
    CHECK(nlslab_run("annulus-count", "bogus = 1\n", 1, 1, &r) == NLSLAB_ERR_VALIDATION);
    CHECK(r == nullptr);
    CHECK(std::string(nlslab_last_error()).find("annulus-count.bogus") != std::string::npos);
    CHECK(nlslab_run("h-spectrum", "N_list = 64\n", 1, 1, &r) == NLSLAB_ERR_CAP);
    CHECK(nlslab_run("nope", nullptr, 1, 1, &r) == NLSLAB_ERR_VALIDATION);
    CHECK(nlslab_run(nullptr, nullptr, 1, 1, &r) == NLSLAB_ERR_VALIDATION);
    REQUIRE(nlslab_run("annulus-count", nullptr, 1, 0, &r) == NLSLAB_OK);
    CHECK(std::string(nlslab_last_error()).empty());
    nlslab_report_free(r);
    nlslab_report_free(nullptr);
}
