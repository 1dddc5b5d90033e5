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

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace otfsradar {

// System parameters. Defaults are the full-scale automotive setup
// (N=6, M=512, 24.25 GHz carrier, 150 MHz bandwidth, 128 antennas, 8 RF chains).
struct SystemConfig {
    int n_doppler = 6;                  // N, OTFS symbols in time
    int n_delay = 512;                  // M, subcarriers
    double carrier_hz = 24.25e9;        // f_c
    double bandwidth_hz = 150e6;        // B = M * subcarrier spacing
    double avg_power_w = 0.04;          // P_avg
    double rcs_m2 = 1.0;                // radar cross-section
    double noise_psd_w_per_hz = 2e-21;  // thermal noise PSD
    double noise_figure_db = 3.0;
    int n_antennas = 128;               // N_a
    int n_rf = 8;                       // N_rf
    int n_streams = 1;                  // N_s
    double speed_of_light_mps = 3e8;

    static SystemConfig table1();
    // Reduced grid and array (N=4, M=64, N_a=16, N_rf=4) for fast runs.
    static SystemConfig desk();

    // Throws ConfigError(kind = Invariant) on violation.
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

struct DerivedQuantities {
    double wavelength_m;
    double symbol_time_s;   // T = 1 / subcarrier spacing
    double subcarrier_hz;   // B / M
    double noise_var_w;     // PSD * NF * B
    double range_res_m;     // c / (2B)
    double vel_res_mps;     // B c / (2 N M f_c)
    double range_max_m;     // M * range_res
    double vel_max_mps;     // N * vel_res
};

DerivedQuantities derive(const SystemConfig& config);

// (4 pi)^3 r^4 / lambda^2
double two_way_pathloss(double range_m, double wavelength_m);

// lambda^2 sigma G_tx G_rx / ((4 pi)^3 r^4) * P_avg / sigma_w^2
double radar_snr(double range_m, double g_tx, double g_rx, const SystemConfig& config);

class ConfigError : public std::runtime_error {
  public:
    enum class Kind { MissingFile, Parse, Invariant };
    ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// Flat `key = value` text; `#` starts a comment. Absent keys keep the defaults
// of the selected preset (`preset = table1 | desk`, default table1). Unknown
// keys are rejected.
SystemConfig parse_config(std::string_view text);
SystemConfig load_config(const std::filesystem::path& path);

} // namespace otfsradar
