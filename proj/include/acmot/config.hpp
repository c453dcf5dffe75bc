#pragma once

// Flat key=value overrides for TrackerConfig (blank lines and '#' comments ignored).

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "acmot/io_mot.hpp"
#include "acmot/optimizer.hpp"

namespace acmot {

inline void apply_config_value(TrackerConfig& cfg, const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
        throw ParseError("config: bad value for " + key + ": '" + value + "'");
    auto as_int = [&] {
        if (v != static_cast<double>(static_cast<long long>(v))) throw ParseError("config: " + key + " must be an integer");
        return static_cast<int>(v);
    };
    AffinityConfig& a = cfg.affinity;
    static const std::map<std::string, double AffinityConfig::*, std::less<>> reals{
        {"c_thre", &AffinityConfig::c_thre},
        {"a_thre", &AffinityConfig::a_thre},
        {"var_mot", &AffinityConfig::var_mot},
        {"var_shp", &AffinityConfig::var_shp},
        {"discount", &AffinityConfig::discount},
        {"process_noise", &AffinityConfig::process_noise},
        {"measurement_noise", &AffinityConfig::measurement_noise},
        {"initial_velocity_variance", &AffinityConfig::initial_velocity_variance},
        {"shape_smoothing", &AffinityConfig::shape_smoothing},
    };
    if (auto it = reals.find(key); it != reals.end()) a.*(it->second) = v;
    else if (key == "window_length") cfg.window_length = as_int();
    else if (key == "min_track_length") cfg.min_track_length = as_int();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int());
    else throw ParseError("config: unknown key " + key);
}

inline void apply_config(TrackerConfig& cfg, std::istream& in, const std::string& source = "<config>") {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw detail::line_error(source, line_no, "expected key=value");
        apply_config_value(cfg, std::string(detail::trim(body.substr(0, eq))), std::string(detail::trim(body.substr(eq + 1))));
    }
    cfg.validate();
}

inline void apply_config_file(TrackerConfig& cfg, const std::string& path) {
    auto in = detail::open_input(path);
    apply_config(cfg, in, path);
}

}  // namespace acmot
