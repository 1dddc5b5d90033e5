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

#include "otfsradar/config.hpp"
#include "otfsradar/estimator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace otfsradar {

enum class ScenarioKind { DetectionSingle, DetectionTwoSic, TrackingThree };

std::string scenario_name(ScenarioKind kind);  // detect1 | detect2-sic | track3
ScenarioKind parse_scenario(const std::string& name);

struct SweepPoint {
    double range_m = 0;   // the swept target (moving target for detect2-sic, reference for track3)
    int n_antennas = 0;   // 0: config value
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::DetectionSingle;
    std::vector<SweepPoint> sweep;
    double sector_deg = 10;
    int trials = 200;
    std::uint64_t seed = 1;

    double fixed_range_m = 10;  // detect2-sic: the near target
    bool sic = true;            // detect1/detect2-sic; without SIC every candidate of one pass is kept
    double pfa = 1e-2;
    int calibration_trials = 0;          // 0: ceil(50 / pfa)
    std::optional<double> threshold;     // skips calibration when set

    void validate() const;  // throws InvalidArgument
};

// Default sweeps for the desk preset.
Scenario default_scenario(ScenarioKind kind, const SystemConfig& config);

struct MetricsRow {
    double range_m = 0;
    int n_antennas = 0;
    double sector_deg = 0;
    int trials_used = 0;
    int targets_scored = 0;  // truth instances entering Pd
    int matched = 0;
    double pd = 0;
    double pd_lo = 0;  // 95% Wilson interval
    double pd_hi = 0;
    std::optional<double> rmse_range_m;  // absent when nothing was matched
    std::optional<double> rmse_vel_mps;
    std::optional<double> rmse_aoa_deg;
    std::optional<double> crlb_range_m;  // sqrt of the mean CRLB variance
    std::optional<double> crlb_vel_mps;
    std::optional<double> crlb_aoa_deg;
    double eps_bw_deg = 0;
    double threshold = 0;
    // Pd of the swept target alone (the moving one for detect2-sic); equals pd otherwise.
    double pd_swept = 0;
    double pd_swept_lo = 0;
    double pd_swept_hi = 0;
};

struct ScenarioResult {
    std::vector<MetricsRow> rows;  // sorted by (range, n_antennas)
    std::vector<double> thresholds;  // one per distinct N_a, in sweep order
};

ScenarioResult run_scenario(const SystemConfig& config, const Scenario& scenario, int workers = 1);

std::vector<MetricsRow> scenario_detection_single(const SystemConfig& config, std::span<const double> ranges_m,
                                                  double sector_deg, int trials, std::uint64_t seed, int workers = 1);
std::vector<MetricsRow> scenario_detection_two_sic(const SystemConfig& config, double fixed_range_m,
                                                   std::span<const double> ranges_m, int trials, std::uint64_t seed,
                                                   int workers = 1);
std::vector<MetricsRow> scenario_tracking_three(const SystemConfig& config, std::span<const SweepPoint> sweep,
                                                int trials, std::uint64_t seed, int workers = 1);

// RMS difference of two independent uniforms over the 3-dB beamwidth: W / sqrt(6), in degrees.
double eps_bw(int n_antennas);

struct Interval {
    double lo = 0;
    double hi = 0;
};
Interval wilson_interval(int successes, int n, double z = 1.959963984540054);

// Truth-to-detection assignment. A detection matches a truth when it lies
// within 3 range cells, 3 velocity cells and `angle_gate_rad`; detections are
// visited strongest first and each truth is taken at most once (the closest
// eligible one). Returns, per truth, the index of its detection or -1.
struct TruthKinematics {
    double range_m = 0;
    double velocity_mps = 0;
    double aoa_rad = 0;
};
std::vector<int> match_detections(std::span<const Detection> detections, std::span<const TruthKinematics> truths,
                                  const SystemConfig& config, double angle_gate_rad);

double estimate_range_m(const Hypothesis& h, const SystemConfig& config);
double estimate_velocity_mps(const Hypothesis& h, const SystemConfig& config);

inline constexpr const char* kCsvSchema = "otfsradar-metrics/1";

// `# schema=...` line, header, then one line per row. Absent values are empty fields.
void write_csv(std::ostream& out, ScenarioKind kind, std::span<const MetricsRow> rows);

} // namespace otfsradar
