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

#include "otfsradar/array.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace otfsradar;

namespace {

SystemConfig with_array(int na, int nrf)
{
    auto c = SystemConfig::desk();
    c.n_antennas = na;
    c.n_rf = nrf;
    return c;
}

} // namespace

TEST_CASE("steering vectors")
{
    CHECK((steering(0.0, 8).array() - Complex(1, 0)).abs().maxCoeff() < 1e-15);
    CHECK(std::abs(steering(kPi / 6, 2)[1] - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(steering(kPi / 2, 2)[1] - Complex(-1, 0)) < 1e-15);
    CHECK_THROWS_AS(steering(1.6, 4), InvalidArgument);
    CHECK_THROWS_AS(steering(-1.6, 4), InvalidArgument);
}

TEST_CASE("property: steering entries are unit modulus and conjugate-symmetric")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> phi(-kPi / 2, kPi / 2);
    for (int i = 0; i < 200; ++i) {
        const double p = phi(rng);
        const CVector a = steering(p, 32);
        CHECK(a[0] == Complex(1, 0));
        CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK((steering(-p, 32) - a.conjugate()).norm() < 1e-12);
        const double h = 1e-6;
        const CVector fd = (steering(std::clamp(p + h, -kPi / 2, kPi / 2), 32) - steering(std::clamp(p - h, -kPi / 2, kPi / 2), 32)) / (2 * h);
        if (std::abs(p) < kPi / 2 - 2 * h) CHECK((fd - steering_derivative(p, 32)).norm() < 1e-6 * fd.norm() + 1e-9);
    }
}

TEST_CASE("detection angle set")
{
    // theta/(2 N_rf) + k theta/N_rf for a 10 degree sector and 8 chains
    const auto a = detection_angles(deg2rad(10.0), 8);
    const std::vector<double> expect{-4.375, -3.125, -1.875, -0.625, 0.625, 1.875, 3.125, 4.375};
    REQUIRE(a.size() == expect.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(rad2deg(a[i]) == doctest::Approx(expect[i]).epsilon(1e-12));
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(-a[a.size() - 1 - i]));
    CHECK_THROWS_WITH_AS(detection_angles(0.2, 3), doctest::Contains("even"), InvalidArgument);
}

TEST_CASE("detection beamformers")
{
    const auto c = with_array(32, 8);
    const double sector = deg2rad(20.0);
    const auto b = detection_beamformers(sector, c);
    CHECK(b.phase == BeamPhase::Detection);
    CHECK(b.f.rows() == 32);
    CHECK(b.f.cols() == 8);
    for (int i = 0; i < 8; ++i) CHECK(b.f.col(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
    const CMatrix fv = b.f * b.v;
    CHECK((fv * fv.adjoint()).trace().real() == doctest::Approx(32.0).epsilon(1e-10));
    CHECK((b.u - b.f.adjoint()).norm() < 1e-15);
    // single stream fanned out equally
    CHECK((b.v.array() - b.v(0, 0)).abs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(detection_beamformers(sector, with_array(32, 5)), InvalidArgument);
}

TEST_CASE("tracking beamformers")
{
    const double sector = deg2rad(20.0);
    {
        const auto c = with_array(16, 4);
        const std::vector<double> aoa{0.0};
        const auto b = tracking_beamformers(aoa, sector, c);
        CHECK(b.phase == BeamPhase::Tracking);
        const CVector col = b.f.col(0);
        CHECK((col.array() - col[0]).abs().maxCoeff() < 1e-15);
        const CMatrix fv = b.f * b.v;
        CHECK(fv.squaredNorm() == doctest::Approx(16.0).epsilon(1e-10));
        CHECK((b.u - detection_beamformers(sector, c).f.adjoint()).norm() < 1e-15);
    }
    {
        const auto c = with_array(128, 8);
        const std::vector<double> aoa{deg2rad(-5.0), deg2rad(1.0), deg2rad(7.0)};
        const auto b = tracking_beamformers(aoa, sector, c);
        const CMatrix gram = b.f.leftCols(3).adjoint() * b.f.leftCols(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(std::abs(gram(i, j)) < 0.1 * std::abs(gram(i, i)));
        CHECK(b.n_streams() == 3);
        CHECK((b.f * b.v).squaredNorm() == doctest::Approx(128.0).epsilon(1e-10));
    }
    {
        const auto c = with_array(16, 4);
        const std::vector<double> aoa{-0.1, 0.0, 0.1, 0.2};
        const auto b = tracking_beamformers(aoa, sector, c);
        CHECK((b.v.diagonal().array().abs() > 0).all());
        const std::vector<double> too_many{-0.1, 0.0, 0.1, 0.2, 0.3};
        CHECK_THROWS_AS(tracking_beamformers(too_many, sector, c), InvalidArgument);
        CHECK_THROWS_AS(tracking_beamformers(std::vector<double>{}, sector, c), InvalidArgument);
        CHECK_THROWS_AS(tracking_beamformers(std::vector<double>{2.0}, sector, c), InvalidArgument);
    }
}

TEST_CASE("transmit beam gain")
{
    const auto c = with_array(64, 4);
    const std::vector<double> aoa{0.0};
    const auto b = tracking_beamformers(aoa, deg2rad(20.0), c);
    CHECK(tx_beam_gain(b, 0.0) == doctest::Approx(64.0).epsilon(1e-9));
    CHECK(tx_beam_gain(b, std::asin(2.0 / 64)) < 1.0);

    const std::vector<double> off{deg2rad(3.3)};
    CHECK(tx_beam_gain(tracking_beamformers(off, deg2rad(20.0), c), deg2rad(3.3)) == doctest::Approx(64.0).epsilon(1e-9));

    double prev = tx_beam_gain(b, -kPi / 2);
    for (int i = 1; i <= 40000; ++i) {
        const double phi = -kPi / 2 + kPi * i / 40000;
        const double g = tx_beam_gain(b, phi);
        CHECK(g <= 64.0 * (1 + 1e-12));
        CHECK(std::abs(g - prev) < 1.0);
        prev = g;
    }
}

TEST_CASE("three dB beamwidth")
{
    CHECK(three_db_beamwidth(128) == doctest::Approx(0.0138).epsilon(2e-3));
    CHECK(rad2deg(three_db_beamwidth(128)) == doctest::Approx(0.79).epsilon(5e-3));
    CHECK(rad2deg(three_db_beamwidth(16)) == doctest::Approx(6.34).epsilon(1e-3));
    CHECK(three_db_beamwidth(64) == doctest::Approx(2 * three_db_beamwidth(128)));
    CHECK_THROWS_AS(three_db_beamwidth(1), InvalidArgument);
}

TEST_CASE("spatial factor, derivative and stream view")
{
    const auto c = with_array(16, 4);
    const std::vector<double> aoa{0.05, -0.12};
    const auto b = tracking_beamformers(aoa, deg2rad(20.0), c);
    const double phi = 0.03, h = 1e-6;
    const CMatrix fd = (b.spatial_factor(phi + h) - b.spatial_factor(phi - h)) / (2 * h);
    CHECK((fd - b.spatial_factor_derivative(phi)).norm() < 1e-6 * fd.norm());

    const auto v1 = b.stream_view(1);
    CHECK(v1.n_streams() == 1);
    CHECK(v1.n_rf() == 4);
    CHECK((v1.spatial_factor(phi) - b.spatial_factor(phi).col(1)).norm() < 1e-12);
    CHECK_THROWS_AS(b.stream_view(2), InvalidArgument);
}
