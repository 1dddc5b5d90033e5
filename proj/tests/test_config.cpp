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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstring>
#include <random>

using namespace otfsradar;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text)
{
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("full-size defaults")
{
    const auto c = SystemConfig::table1();
    CHECK(c.n_doppler == 6);
    CHECK(c.n_delay == 512);
    CHECK(c.carrier_hz == 24.25e9);
    CHECK(c.bandwidth_hz == 150e6);
    CHECK(c.avg_power_w == 0.04);
    CHECK(c.noise_psd_w_per_hz == 2e-21);
    CHECK(c.noise_figure_db == 3.0);
    CHECK(c.n_antennas == 128);
    CHECK(c.n_rf == 8);
    CHECK(c.rcs_m2 == 1.0);
}

TEST_CASE("derived quantities")
{
    const auto d = derive(SystemConfig::table1());
    CHECK(d.range_res_m == doctest::Approx(1.0).epsilon(1e-12));
    // B c / (2 N M f_c) = 150e6 * 3e8 / (2 * 6 * 512 * 24.25e9)
    CHECK(d.vel_res_mps == doctest::Approx(302.0296).epsilon(1e-6));
    CHECK(d.noise_var_w == doctest::Approx(2e-21 * std::pow(10.0, 0.3) * 150e6).epsilon(1e-12));
    CHECK(d.noise_var_w == doctest::Approx(5.99e-13).epsilon(1e-3));
    CHECK(d.wavelength_m == doctest::Approx(3e8 / 24.25e9));
    CHECK(d.symbol_time_s * d.subcarrier_hz == doctest::Approx(1.0));
    CHECK(d.range_max_m == doctest::Approx(512.0));
    CHECK(d.vel_max_mps == doctest::Approx(6 * d.vel_res_mps));
}

TEST_CASE("derive rejects bad grids")
{
    auto c = SystemConfig::table1();
    c.bandwidth_hz = 0;
    CHECK_THROWS_AS(derive(c), InvalidArgument);
    c = SystemConfig::table1();
    c.n_delay = 0;
    CHECK_THROWS_AS(derive(c), InvalidArgument);
}

TEST_CASE("pathloss")
{
    CHECK(two_way_pathloss(10.0, 0.012371) == doctest::Approx(1.297e11).epsilon(1e-3));
    CHECK(10 * std::log10(two_way_pathloss(10.0, 0.012371)) == doctest::Approx(111.1).epsilon(1e-3));
    CHECK(two_way_pathloss(10.0, 0.01) / two_way_pathloss(1.0, 0.01) == doctest::Approx(1e4).epsilon(1e-14));
    CHECK(two_way_pathloss(5.0, 0.01) / two_way_pathloss(5.0, 0.02) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(two_way_pathloss(0.0, 0.01), InvalidArgument);
}

TEST_CASE("radar snr")
{
    auto c = SystemConfig::table1();
    // the quoted 0.514 uses sigma_w^2 rounded to 6e-13; exact NF gives 0.5154
    CHECK(radar_snr(10.0, 1, 1, c) == doctest::Approx(0.514).epsilon(5e-3));
    CHECK(radar_snr(10.0, 128, 1, c) / radar_snr(10.0, 1, 1, c) == doctest::Approx(128.0));
    CHECK(radar_snr(10.0, 1, 1, c) / radar_snr(20.0, 1, 1, c) == doctest::Approx(16.0));
    CHECK_THROWS_AS(radar_snr(-1.0, 1, 1, c), InvalidArgument);
    CHECK_THROWS_AS(radar_snr(1.0, -1, 1, c), InvalidArgument);
}

TEST_CASE("property: snr and pathloss are consistent")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(0.5, 500.0), g(0.0, 200.0);
    const auto c = SystemConfig::table1();
    const auto d = derive(c);
    for (int i = 0; i < 200; ++i) {
        const double range = r(rng), gt = g(rng), gr = g(rng);
        const double lhs = radar_snr(range, gt, gr, c) * two_way_pathloss(range, d.wavelength_m) * d.noise_var_w / c.avg_power_w;
        CHECK(lhs == doctest::Approx(c.rcs_m2 * gt * gr).epsilon(1e-12));
    }
}

TEST_CASE("property: range resolution identity and purity")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> b(1e6, 4e9);
    for (int i = 0; i < 100; ++i) {
        auto c = SystemConfig::desk();
        c.bandwidth_hz = b(rng);
        const auto d1 = derive(c);
        const auto d2 = derive(c);
        CHECK(d1.range_res_m * 2 * c.bandwidth_hz / c.speed_of_light_mps == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::memcmp(&d1, &d2, sizeof d1) == 0);
    }
}

TEST_CASE("config files")
{
    CHECK(load_config(write_temp("otfsr_empty.cfg", "")) == SystemConfig::table1());

    try {
        load_config(write_temp("otfsr_bad_rf.cfg", "n_rf = 16\nn_antennas = 8\n"));
        FAIL("expected an invariant error");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == ConfigError::Kind::Invariant);
    }

    const auto c = load_config(write_temp("otfsr_bw.cfg", "# half bandwidth\nbandwidth_hz = 75e6\n"));
    CHECK(derive(c).range_res_m == doctest::Approx(2.0));

    try {
        load_config("/nonexistent/otfsr.cfg");
        FAIL("expected a missing-file error");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == ConfigError::Kind::MissingFile);
    }

    for (const char* text : {"n_rf 4\n", "n_rf = four\n", "colour = red\n", "n_rf = 4\nn_rf = 4\n", "n_delay = 6.5\n",
                             "preset = huge\n"}) {
        try {
            parse_config(text);
            FAIL("expected a parse error for: " << text);
        } catch (const ConfigError& e) {
            CHECK(e.kind() == ConfigError::Kind::Parse);
        }
    }

    const auto desk = parse_config("preset = desk\nn_rf = 2  # fewer chains\n");
    CHECK(desk.n_delay == 64);
    CHECK(desk.n_rf == 2);
    CHECK(parse_config("n_delay = 5.12e2").n_delay == 512);
}
