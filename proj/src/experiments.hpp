#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace nlslab::experiments {

using Json = nlohmann::ordered_json;

// Flat key=value document; '#' starts a comment; list values are comma separated.
struct Config {
    std::vector<std::pair<std::string, std::string>> entries;
};

Config parse_config_text(const std::string& text);

struct Report {
    std::string experiment;
    Json params = Json::object();  // resolved parameters in declared order
    std::vector<Json> rows;        // each row an ordered object
    Json summary = Json::object();
    std::uint64_t seed = 0;
    std::string version;
    double wall_ms = 0;
};

const std::vector<std::string>& experiment_ids();
// Keys and defaults an experiment accepts, in declared order.
std::vector<std::pair<std::string, std::string>> experiment_schema(const std::string& id);

Report run(const std::string& id, const Config& cfg, std::uint64_t seed, int threads);

std::string to_json(const Report& r);
std::string to_csv(const Report& r);
// Shortest decimal that reads back to the same double.
std::string shortest(double v);

std::string version();

}  // namespace nlslab::experiments
