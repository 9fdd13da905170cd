#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qf/errors.hpp"
#include "qf/mixture.hpp"

namespace qf::io {

using json = nlohmann::ordered_json;

// 17 significant digits: enough for exact double round-trips.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("bad JSON in " + path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    out << text;
    if (!out) throw config_error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// Rows of doubles under a fixed header line; cells use format_g17 (non-finite
// values appear as nan/inf and round-trip through strtod).
inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_g17(row[i]);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

// Mixture schema: {"mixture":[{"w":..,"mean":..,"std":..},...], "alpha":..}.
// Weights are normalized on load; a stderr warning is emitted when they miss
// 1 by more than 1e-9.
inline MixtureDensity mixture_from_json(const json& root) {
    if (!root.contains("mixture")) throw config_error("config missing \"mixture\" array");
    const json& arr = root.at("mixture");
    if (!arr.is_array() || arr.empty())
        throw config_error("\"mixture\" must be a nonempty array of components");
    std::vector<MixtureDensity::Component> comps;
    double total = 0.0;
    for (const json& c : arr) {
        if (!c.is_object() || !c.contains("w") || !c.contains("mean") || !c.contains("std"))
            throw config_error("mixture component needs fields w, mean, std");
        MixtureDensity::Component comp;
        try {
            comp.weight = c.at("w").get<double>();
            comp.mean = c.at("mean").get<double>();
            comp.std = c.at("std").get<double>();
        } catch (const json::exception& e) {
            throw config_error(std::string("mixture component field not numeric: ") + e.what());
        }
        if (!(comp.weight > 0.0)) throw config_error("mixture weights must be positive");
        if (!(comp.std > 0.0)) throw config_error("mixture stds must be positive");
        total += comp.weight;
        comps.push_back(comp);
    }
    if (!(total > 0.0)) throw config_error("mixture weights sum to zero");
    if (std::fabs(total - 1.0) > 1e-9)
        std::cerr << "warning: mixture weights sum to " << format_g17(total)
                  << "; normalizing\n";
    for (auto& c : comps) c.weight /= total;
    try {
        return MixtureDensity(comps);
    } catch (const domain_error& e) {
        throw config_error(std::string("invalid mixture: ") + e.what());
    }
}

inline double alpha_from_json(const json& root, double fallback = 0.5) {
    if (!root.contains("alpha")) return fallback;
    double a;
    try {
        a = root.at("alpha").get<double>();
    } catch (const json::exception&) {
        throw config_error("\"alpha\" must be a number");
    }
    if (!(a > 0.0 && a < 1.0)) throw config_error("\"alpha\" must lie in (0,1)");
    return a;
}

inline json mixture_to_json(const MixtureDensity& mixture) {
    json arr = json::array();
    for (const auto& c : mixture.components())
        arr.push_back({{"w", c.weight}, {"mean", c.mean}, {"std", c.std}});
    return arr;
}

// Sidecar written next to every artifact: the fully resolved configuration a
// rerun needs to reproduce the output.
inline void write_run_sidecar(const std::string& out_path, const json& resolved) {
    write_json_file(out_path + ".run.json", resolved);
}

}  // namespace qf::io
