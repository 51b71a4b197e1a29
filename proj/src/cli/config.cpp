// Copyright 2026 The ltqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ltqkd/cli.hpp"

namespace ltqkd::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ValidationError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ValidationError(std::string(key) + ": expected true or false");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::ThreeState:
            return "three-state";
        case Protocol::FourState:
            return "four-state";
        case Protocol::Mdi:
            return "mdi";
    }
    return "?";
}

Protocol parse_protocol(std::string_view name) {
    name = trim(name);
    if (name == "three-state") return Protocol::ThreeState;
    if (name == "four-state") return Protocol::FourState;
    if (name == "mdi") return Protocol::Mdi;
    throw ValidationError("protocol: unknown protocol '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    auto field = [](const char* name, bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string(name) + ": " + what);
    };
    field("dark_count", channel.dark_count >= 0.0 && channel.dark_count < 1.0, "must be in [0, 1)");
    field("det_eff", channel.det_eff > 0.0 && channel.det_eff <= 1.0, "must be in (0, 1]");
    field("atten_db_per_km", channel.atten_db_per_km >= 0.0, "must be >= 0");
    field("alpha", channel.alpha > 0.0, "must be > 0");
    field("distance_start", distance_start >= 0.0, "must be >= 0");
    field("distance_stop", distance_stop >= 0.0, "must be >= 0");
    field("distance_step", distance_step > 0.0, "must be > 0");
    for (double d : deltas) field("delta", d >= 0.0, "must be >= 0");
    field("f_ec", f_ec >= 1.0, "must be >= 1");
    field("alpha_min", search.lower > 0.0, "must be > 0");
    field("alpha_max", search.upper > search.lower, "must exceed alpha_min");
    field("alpha_tol", search.rel_tol > 0.0, "must be > 0");
    if (fixed_alpha) field("alpha", *fixed_alpha > 0.0, "must be > 0");
    field("gamma", gamma > 0.0 && gamma < 1.0, "must be in (0, 1)");
}

void parse_distance_range(RunConfig& config, std::string_view range) {
    const auto parts = split(trim(range), ':');
    if (parts.size() == 1) {
        config.distance_start = config.distance_stop = parse_double("distance", parts[0]);
    } else if (parts.size() == 3) {
        config.distance_start = parse_double("distance", parts[0]);
        config.distance_stop = parse_double("distance", parts[1]);
        config.distance_step = parse_double("distance", parts[2]);
    } else {
        throw ValidationError("distance: expected START:STOP:STEP or a single value");
    }
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "protocol") {
        c.protocol = parse_protocol(value);
    } else if (key == "dark_count" || key == "e_d") {
        c.channel.dark_count = parse_double(key, value);
    } else if (key == "det_eff") {
        c.channel.det_eff = parse_double(key, value);
    } else if (key == "atten_db_per_km") {
        c.channel.atten_db_per_km = parse_double(key, value);
    } else if (key == "distance") {
        parse_distance_range(c, value);
    } else if (key == "distance_start") {
        c.distance_start = parse_double(key, value);
    } else if (key == "distance_stop") {
        c.distance_stop = parse_double(key, value);
    } else if (key == "distance_step") {
        c.distance_step = parse_double(key, value);
    } else if (key == "delta") {
        c.deltas.clear();
        for (auto part : split(value, ',')) c.deltas.push_back(parse_double(key, part));
        c.deltas_explicit = true;
    } else if (key == "alpha") {
        c.fixed_alpha = parse_double(key, value);
        c.channel.alpha = *c.fixed_alpha;
    } else if (key == "optimize") {
        if (parse_bool(key, value)) c.fixed_alpha.reset();
    } else if (key == "alpha_min") {
        c.search.lower = parse_double(key, value);
    } else if (key == "alpha_max") {
        c.search.upper = parse_double(key, value);
    } else if (key == "alpha_tol") {
        c.search.rel_tol = parse_double(key, value);
    } else if (key == "f_ec") {
        c.f_ec = parse_double(key, value);
    } else if (key == "seed") {
        c.seed = parse_u64(key, value);
    } else if (key == "pulses") {
        c.pulses = parse_u64(key, value);
    } else if (key == "gamma") {
        c.gamma = parse_double(key, value);
    } else if (key == "threads") {
        c.threads = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "out") {
        c.out = std::string(value);
    } else {
        throw ValidationError("unknown config key '" + std::string(key) + "'");
    }
}

void apply_config_text(RunConfig& config, std::string_view text) {
    int line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_config_file(RunConfig& config, const std::string& path) { apply_config_text(config, read_file(path)); }

std::vector<double> distance_grid(const RunConfig& config) {
    std::vector<double> out;
    if (config.distance_stop < config.distance_start) return out;
    const double slack = 1e-9 * config.distance_step;
    for (std::uint64_t i = 0;; ++i) {
        const double d = config.distance_start + static_cast<double>(i) * config.distance_step;
        if (d > config.distance_stop + slack) break;
        out.push_back(std::min(d, std::max(config.distance_stop, config.distance_start)));
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write '" + path + "'");
        f << content;
        f.flush();
        if (!f) throw IoError("cannot write '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot write '" + path + "'");
    }
}

}  // namespace ltqkd::cli
