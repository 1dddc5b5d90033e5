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

#include "otfsradar/experiments.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace otfsradar;

namespace {

Detection detection_at(double range_m, double velocity_mps, double aoa_rad, double s_peak, const SystemConfig& c)
{
    Detection d;
    d.estimate.at = {2.0 * range_m / c.speed_of_light_mps, 2.0 * velocity_mps * c.carrier_hz / c.speed_of_light_mps,
                     aoa_rad};
    d.s_peak = s_peak;
    return d;
}

std::string csv_of(ScenarioKind kind, const std::vector<MetricsRow>& rows)
{
    std::ostringstream out;
    write_csv(out, kind, rows);
    return out.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

TEST_CASE("systematic AoA error of a beamwidth-limited search")
{
    CHECK(eps_bw(128) == doctest::Approx(0.32).epsilon(0.015));
    for (int n : {4, 16, 64}) CHECK(eps_bw(2 * n) == doctest::Approx(eps_bw(n) / 2).epsilon(1e-12));
    CHECK_THROWS_AS(eps_bw(1), InvalidArgument);

    // Monte Carlo: RMS difference of two independent uniforms over W.
    const double w = rad2deg(three_db_beamwidth(32));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, w);
    double acc = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double d = u(rng) - u(rng);
        acc += d * d;
    }
    CHECK(std::sqrt(acc / n) == doctest::Approx(eps_bw(32)).epsilon(5e-3));
}

TEST_CASE("Wilson interval")
{
    const auto mid = wilson_interval(5, 10);
    CHECK(mid.lo == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(mid.hi == doctest::Approx(0.7634).epsilon(1e-3));
    CHECK(wilson_interval(0, 50).lo == 0.0);
    CHECK(wilson_interval(50, 50).hi == 1.0);
    CHECK_THROWS_AS(wilson_interval(3, 2), InvalidArgument);
    CHECK_THROWS_AS(wilson_interval(0, 0), InvalidArgument);

    SUBCASE("property: mirror symmetry, containment, narrowing")
    {
        for (int n : {7, 40, 333})
            for (int k = 0; k <= n; ++k) {
                const auto a = wilson_interval(k, n), b = wilson_interval(n - k, n);
                CHECK(a.lo == doctest::Approx(1 - b.hi).epsilon(1e-12));
                const double p = static_cast<double>(k) / n;
                CHECK(a.lo <= p);
                CHECK(p <= a.hi);
                const auto big = wilson_interval(4 * k, 4 * n);
                CHECK(big.hi - big.lo <= a.hi - a.lo + 1e-12);
            }
    }
}

TEST_CASE("truth matching")
{
    const auto c = SystemConfig::desk();
    const auto d = derive(c);
    const double gate = deg2rad(2.5);
    const std::vector<TruthKinematics> truths{{10.0, 100.0, 0.01}, {30.0, -200.0, -0.02}};

    SUBCASE("gates on range, velocity and angle")
    {
        const std::vector<Detection> dets{detection_at(10.0 + 3.5 * d.range_res_m, 100.0, 0.01, 5, c),
                                          detection_at(30.0, -200.0 + 3.5 * d.vel_res_mps, -0.02, 5, c),
                                          detection_at(30.0, -200.0, -0.02 + 1.1 * gate, 5, c)};
        const auto m = match_detections(dets, truths, c, gate);
        CHECK(m == std::vector<int>{-1, -1});
    }
    SUBCASE("strongest detection claims the truth, the other stays free")
    {
        const std::vector<Detection> dets{detection_at(10.2, 100.0, 0.01, 20, c), detection_at(10.0, 100.0, 0.01, 50, c)};
        CHECK(match_detections(dets, truths, c, gate) == std::vector<int>{1, -1});
    }
    SUBCASE("closest eligible truth wins")
    {
        const std::vector<TruthKinematics> near{{10.0, 0.0, 0.0}, {11.5, 0.0, 0.0}};
        const std::vector<Detection> dets{detection_at(11.2, 0.0, 0.0, 9, c)};
        CHECK(match_detections(dets, near, c, gate) == std::vector<int>{-1, 0});
    }
    SUBCASE("property: independent of detection order, each truth taken once")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<Detection> dets;
            for (int i = 0; i < 5; ++i) {
                const auto& t = truths[static_cast<std::size_t>(i % 2)];
                dets.push_back(detection_at(t.range_m + 4 * u(rng) * d.range_res_m, t.velocity_mps + 4 * u(rng) * d.vel_res_mps,
                                            t.aoa_rad + gate * u(rng), 10 + i + u(rng), c));
            }
            const auto m = match_detections(dets, truths, c, gate);
            if (m[0] >= 0 && m[1] >= 0) CHECK(m[0] != m[1]);

            std::vector<Detection> shuffled = dets;
            std::vector<int> perm{0, 1, 2, 3, 4};
            std::shuffle(perm.begin(), perm.end(), rng);
            for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = dets[static_cast<std::size_t>(perm[i])];
            const auto ms = match_detections(shuffled, truths, c, gate);
            for (std::size_t t = 0; t < truths.size(); ++t)
                CHECK((m[t] < 0 ? -1 : m[t]) == (ms[t] < 0 ? -1 : perm[static_cast<std::size_t>(ms[t])]));
        }
    }
}

TEST_CASE("scenario definitions")
{
    const auto c = SystemConfig::desk();
    for (auto k : {ScenarioKind::DetectionSingle, ScenarioKind::DetectionTwoSic, ScenarioKind::TrackingThree}) {
        CHECK(parse_scenario(scenario_name(k)) == k);
        const auto s = default_scenario(k, c);
        CHECK_NOTHROW(s.validate());
        for (const auto& p : s.sweep) CHECK(p.range_m < derive(c).range_max_m);
    }
    CHECK_THROWS_AS(parse_scenario("detect3"), InvalidArgument);

    Scenario bad = default_scenario(ScenarioKind::DetectionSingle, c);
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = default_scenario(ScenarioKind::DetectionSingle, c);
    bad.sweep.clear();
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    Scenario far = default_scenario(ScenarioKind::DetectionSingle, c);
    far.sweep = {{derive(c).range_max_m, 0}};
    far.threshold = 11.0;
    CHECK_THROWS_AS(run_scenario(c, far), InvalidArgument);
}

TEST_CASE("CSV output")
{
    MetricsRow r;
    r.range_m = 12.5;
    r.n_antennas = 16;
    r.sector_deg = 10;
    r.trials_used = 4;
    r.targets_scored = 4;
    r.pd = 0;
    r.pd_hi = 0.49;
    r.eps_bw_deg = 2.5;
    r.threshold = 11;
    const auto ls = lines(csv_of(ScenarioKind::DetectionSingle, {r}));
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == std::string("# schema=") + kCsvSchema);
    const auto header = fields(ls[1]);
    const auto row = fields(ls[2]);
    REQUIRE(header.size() == row.size());
    CHECK(row[0] == "detect1");
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i].starts_with("rmse_") || header[i].starts_with("crlb_")) CHECK(row[i].empty());
}

TEST_CASE("Monte Carlo driver")
{
    auto c = SystemConfig::desk();
    c.avg_power_w = 5e-4;

    SUBCASE("rows sorted, undetected ranges leave RMSE empty")
    {
        Scenario s = default_scenario(ScenarioKind::DetectionSingle, c);
        s.sweep = {{60.0, 0}, {10.0, 0}};
        s.trials = 6;
        s.threshold = 11.0;
        auto weak = c;
        weak.avg_power_w = 1e-12;
        const auto res = run_scenario(weak, s);
        REQUIRE(res.rows.size() == 2);
        CHECK(res.rows[0].range_m < res.rows[1].range_m);
        for (const auto& row : res.rows) {
            CHECK(row.pd == 0.0);
            CHECK(row.pd_swept == 0.0);
            CHECK_FALSE(row.rmse_range_m.has_value());
            CHECK(row.crlb_range_m.has_value());
            CHECK(row.trials_used == 6);
        }
    }
    SUBCASE("two targets are both scored")
    {
        Scenario s = default_scenario(ScenarioKind::DetectionTwoSic, c);
        s.sweep = {{25.0, 0}};
        s.trials = 5;
        s.threshold = 11.0;
        const auto row = run_scenario(c, s).rows.at(0);
        CHECK(row.targets_scored == 10);
        CHECK(row.pd_swept_lo <= row.pd_swept);
        CHECK(row.pd_swept <= row.pd_swept_hi);
        // The average over both targets lies between the swept target's Pd and 1.
        CHECK(row.pd >= 0.5 * row.pd_swept);
        CHECK(row.pd >= 0.0);
        CHECK(row.pd <= 1.0);
        CHECK(row.pd_lo <= row.pd);
        CHECK(row.pd <= row.pd_hi);
    }
    SUBCASE("tracking fills the beamwidth column")
    {
        Scenario s = default_scenario(ScenarioKind::TrackingThree, c);
        s.sweep = {{20.0, 32}};
        s.trials = 3;
        s.threshold = 11.0;
        const auto row = run_scenario(c, s).rows.at(0);
        CHECK(row.n_antennas == 32);
        CHECK(row.eps_bw_deg == doctest::Approx(eps_bw(32)));
    }
    SUBCASE("output does not depend on the worker count")
    {
        Scenario s = default_scenario(ScenarioKind::DetectionSingle, c);
        s.sweep = {{15.0, 0}, {40.0, 0}};
        s.trials = 12;
        s.pfa = 0.1;
        s.calibration_trials = 500;
        const auto one = run_scenario(c, s, 1);
        const auto three = run_scenario(c, s, 3);
        CHECK(csv_of(s.kind, one.rows) == csv_of(s.kind, three.rows));
        CHECK(one.thresholds == three.thresholds);
    }
}
