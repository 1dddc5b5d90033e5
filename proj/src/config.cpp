// SPDX-License-Identifier: Apache-2.0
//
// otfs-radar: OTFS MIMO radar detection and estimation simulator
// Copyright (C) 2026 The otfs-radar authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "otfsradar/config.hpp"

#include "otfsradar/types.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace otfsradar {

SystemConfig SystemConfig::table1() { return SystemConfig{}; }

SystemConfig SystemConfig::desk()
{
    SystemConfig c;
    c.n_doppler = 4;
    c.n_delay = 64;
    c.n_antennas = 16;
    c.n_rf = 4;
    return c;
}

void SystemConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError(ConfigError::Kind::Invariant, msg); };
    if (n_doppler < 1) fail("n_doppler must be >= 1");
    if (n_delay < 1) fail("n_delay must be >= 1");
    if (n_antennas < 1) fail("n_antennas must be >= 1");
    if (n_rf < 1) fail("n_rf must be >= 1");
    if (n_rf > n_antennas) fail("n_rf must not exceed n_antennas");
    if (n_streams < 1) fail("n_streams must be >= 1");
    if (n_streams > n_rf) fail("n_streams must not exceed n_rf");
    if (!(carrier_hz > 0)) fail("carrier_hz must be positive");
    if (!(bandwidth_hz > 0)) fail("bandwidth_hz must be positive");
    if (!(avg_power_w > 0)) fail("avg_power_w must be positive");
    if (!(rcs_m2 > 0)) fail("rcs_m2 must be positive");
    if (!(noise_psd_w_per_hz > 0)) fail("noise_psd_w_per_hz must be positive");
    if (!(noise_figure_db >= 0) || !std::isfinite(noise_figure_db)) fail("noise_figure_db must be >= 0");
    if (!(speed_of_light_mps > 0)) fail("speed_of_light_mps must be positive");
}

DerivedQuantities derive(const SystemConfig& config)
{
    if (!(config.bandwidth_hz > 0)) throw InvalidArgument("derive: bandwidth must be positive");
    if (!(config.carrier_hz > 0)) throw InvalidArgument("derive: carrier frequency must be positive");
    if (config.n_doppler < 1 || config.n_delay < 1) throw InvalidArgument("derive: grid dimensions must be >= 1");

    const double c = config.speed_of_light_mps;
    const double n = config.n_doppler;
    const double m = config.n_delay;
    DerivedQuantities d{};
    d.wavelength_m = c / config.carrier_hz;
    d.subcarrier_hz = config.bandwidth_hz / m;
    d.symbol_time_s = 1.0 / d.subcarrier_hz;
    d.noise_var_w = config.noise_psd_w_per_hz * std::pow(10.0, config.noise_figure_db / 10.0) * config.bandwidth_hz;
    d.range_res_m = c / (2.0 * config.bandwidth_hz);
    d.vel_res_mps = config.bandwidth_hz * c / (2.0 * n * m * config.carrier_hz);
    d.range_max_m = m * d.range_res_m;
    d.vel_max_mps = n * d.vel_res_mps;
    return d;
}

double two_way_pathloss(double range_m, double wavelength_m)
{
    if (!(range_m > 0)) throw InvalidArgument("two_way_pathloss: range must be positive");
    if (!(wavelength_m > 0)) throw InvalidArgument("two_way_pathloss: wavelength must be positive");
    const double four_pi = 4.0 * kPi;
    return four_pi * four_pi * four_pi * std::pow(range_m, 4) / (wavelength_m * wavelength_m);
}

double radar_snr(double range_m, double g_tx, double g_rx, const SystemConfig& config)
{
    if (!(range_m > 0)) throw InvalidArgument("radar_snr: range must be positive");
    if (g_tx < 0 || g_rx < 0) throw InvalidArgument("radar_snr: gains must be non-negative");
    const auto d = derive(config);
    return config.rcs_m2 * g_tx * g_rx / two_way_pathloss(range_m, d.wavelength_m) * config.avg_power_w /
           d.noise_var_w;
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg)
{
    throw ConfigError(ConfigError::Kind::Parse, "line " + std::to_string(line) + ": " + msg);
}

double to_double(std::string_view v, int line)
{
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        parse_fail(line, "expected a number, got '" + std::string(v) + "'");
    return out;
}

int to_int(std::string_view v, int line)
{
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc{} && ptr == v.data() + v.size()) return out;
    // Accept integral values written in float notation, e.g. 5.12e2.
    const double d = to_double(v, line);
    if (d != std::floor(d) || std::abs(d) > 1e9) parse_fail(line, "expected an integer, got '" + std::string(v) + "'");
    return static_cast<int>(d);
}

} // namespace

SystemConfig parse_config(std::string_view text)
{
    struct Entry {
        int line;
        std::string value;
    };
    std::map<std::string, Entry> entries;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) parse_fail(line_no, "expected key = value");
        const auto key = std::string(trim(line.substr(0, eq)));
        const auto value = std::string(trim(line.substr(eq + 1)));
        if (key.empty()) parse_fail(line_no, "empty key");
        if (value.empty()) parse_fail(line_no, "empty value for '" + key + "'");
        if (entries.contains(key)) parse_fail(line_no, "duplicate key '" + key + "'");
        entries.emplace(key, Entry{line_no, value});
    }

    SystemConfig cfg = SystemConfig::table1();
    if (auto it = entries.find("preset"); it != entries.end()) {
        if (it->second.value == "table1")
            cfg = SystemConfig::table1();
        else if (it->second.value == "desk")
            cfg = SystemConfig::desk();
        else
            parse_fail(it->second.line, "unknown preset '" + it->second.value + "'");
        entries.erase(it);
    }

    using Setter = std::function<void(SystemConfig&, const Entry&)>;
    auto int_key = [](int SystemConfig::*field) {
        return Setter([field](SystemConfig& c, const Entry& e) { c.*field = to_int(e.value, e.line); });
    };
    auto real_key = [](double SystemConfig::*field) {
        return Setter([field](SystemConfig& c, const Entry& e) { c.*field = to_double(e.value, e.line); });
    };
    const std::map<std::string, Setter> setters{
        {"n_doppler", int_key(&SystemConfig::n_doppler)},
        {"n_delay", int_key(&SystemConfig::n_delay)},
        {"carrier_hz", real_key(&SystemConfig::carrier_hz)},
        {"bandwidth_hz", real_key(&SystemConfig::bandwidth_hz)},
        {"avg_power_w", real_key(&SystemConfig::avg_power_w)},
        {"rcs_m2", real_key(&SystemConfig::rcs_m2)},
        {"noise_psd_w_per_hz", real_key(&SystemConfig::noise_psd_w_per_hz)},
        {"noise_figure_db", real_key(&SystemConfig::noise_figure_db)},
        {"n_antennas", int_key(&SystemConfig::n_antennas)},
        {"n_rf", int_key(&SystemConfig::n_rf)},
        {"n_streams", int_key(&SystemConfig::n_streams)},
        {"speed_of_light_mps", real_key(&SystemConfig::speed_of_light_mps)},
    };
    for (const auto& [key, entry] : entries) {
        const auto it = setters.find(key);
        if (it == setters.end()) parse_fail(entry.line, "unknown key '" + key + "'");
        it->second(cfg, entry);
    }
    cfg.validate();
    return cfg;
}

SystemConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigError::Kind::MissingFile, "cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace otfsradar
