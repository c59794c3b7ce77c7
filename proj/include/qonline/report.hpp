#pragma once

// Machine-readable scenario reports. Layout is stable and versioned; numbers
// are rounded to 12 significant digits before serialization so that identical
// configurations produce byte-identical files.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qonline/errors.hpp"

namespace qonline::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

inline double round12(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return std::strtod(buf, nullptr);
}

struct Report {
    std::string scenario;
    std::string mode = "exact";
    std::uint64_t seed = 0;
    Json params = Json::object();
    std::vector<Json> instances;
    Json aggregate = Json::object();
    Json resources = Json::object();
    bool pass = false;

    Json to_json() const {
        Json j = Json::object();
        j["schema_version"] = kSchemaVersion;
        j["tool_version"] = kToolVersion;
        j["scenario"] = scenario;
        j["mode"] = mode;
        j["seed"] = seed;
        j["params"] = params;
        j["instances"] = instances;
        j["aggregate"] = aggregate;
        j["resources"] = resources;
        j["pass"] = pass;
        return j;
    }

    std::string to_string() const { return to_json().dump(2) + "\n"; }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file: " + path);
        out << to_string();
    }
};

}  // namespace qonline::report
