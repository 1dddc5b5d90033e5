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

#include "oracles.hpp"
#include "otfsradar/frame.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace otfsradar;

namespace {

Grid random_grid(int n, int m, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Grid x(n, m);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = {g(rng), g(rng)};
    return x;
}

std::vector<Complex> flat(const Grid& g) { return {g.data(), g.data() + g.size()}; }

} // namespace

TEST_CASE("isfft of an impulse and of zero")
{
    Grid x = Grid::Zero(4, 8);
    x(0, 0) = 1.0;
    const Grid tf = isfft(x);
    CHECK((tf.array() - Complex(1.0, 0.0)).abs().maxCoeff() < 1e-14);
    CHECK(isfft(Grid::Zero(4, 8)).norm() == 0.0);

    const Grid ones = Grid::Constant(4, 8, Complex(1.0, 0.0));
    Grid delta = Grid::Zero(4, 8);
    delta(0, 0) = 1.0;
    CHECK((sfft(ones) - delta).norm() < 1e-14);
}

TEST_CASE("transforms match the direct sums")
{
    std::mt19937_64 rng(11);
    const Grid x = random_grid(4, 8, rng);
    const auto ref = oracle::isfft_direct(flat(x), 4, 8);
    const auto got = flat(isfft(x));
    double err = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(ref[i] - got[i]));
    CHECK(err < 1e-12);

    const auto back_ref = oracle::sfft_direct(got, 4, 8);
    const auto back = flat(sfft(isfft(x)));
    err = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(back_ref[i] - back[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("property: round trip, linearity, parseval")
{
    std::mt19937_64 rng(5);
    const auto c = SystemConfig::desk();
    for (int i = 0; i < 100; ++i) {
        const Grid x = random_grid(c.n_doppler, c.n_delay, rng);
        CHECK((sfft(isfft(x)) - x).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((isfft(sfft(x)) - x).cwiseAbs().maxCoeff() < 1e-10);
        if (i < 10) {
            const Grid y = random_grid(c.n_doppler, c.n_delay, rng);
            const Complex a(0.3, -1.2), b(2.0, 0.5);
            CHECK((sfft(a * x + b * y) - (a * sfft(x) + b * sfft(y))).norm() < 1e-12 * (x.norm() + y.norm()));
            const double nm = static_cast<double>(x.size());
            CHECK(sfft(x).squaredNorm() == doctest::Approx(x.squaredNorm() / nm).epsilon(1e-12));
        }
    }
}

TEST_CASE("frame transforms check shapes")
{
    DelayDopplerFrame dd;
    CHECK_THROWS_AS(isfft(dd), InvalidArgument);
    dd.streams = {Grid::Zero(2, 3), Grid::Zero(3, 2)};
    CHECK_THROWS_AS(isfft(dd), InvalidArgument);
}

TEST_CASE("cross ambiguity values")
{
    const double t = 1e-6;
    const auto p = Pulse::rectangular(t);
    CHECK(std::abs(cross_ambiguity(p, p, 0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(cross_ambiguity(p, p, t / 2, 0) - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(cross_ambiguity(p, p, 0, 1 / t)) < 1e-15);
    CHECK(cross_ambiguity(p, p, t, 0) == Complex(0, 0));
    CHECK(cross_ambiguity(p, p, -1.5 * t, 0) == Complex(0, 0));
    CHECK_THROWS_AS(cross_ambiguity(p, Pulse::rectangular(2 * t), 0, 0), InvalidArgument);
}

TEST_CASE("property: ambiguity bounded by one, peak only at the origin")
{
    const double t = 2e-6;
    const auto p = Pulse::rectangular(t);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> tau(-1.2 * t, 1.2 * t), nu(-5 / t, 5 / t);
    for (int i = 0; i < 5000; ++i) {
        const double a = tau(rng), b = nu(rng);
        CHECK(std::abs(cross_ambiguity(p, p, a, b)) < 1.0);
    }
}

TEST_CASE("ambiguity is continuous at zero Doppler")
{
    const double t = 1e-6;
    const auto p = Pulse::rectangular(t);
    for (double tau : {-0.7 * t, -0.1 * t, 0.0, 0.4 * t, 0.95 * t}) {
        const Complex lim = cross_ambiguity(p, p, tau, 0.0);
        CHECK(std::abs(lim - Complex((t - std::abs(tau)) / t, 0)) < 1e-15);
        for (double nu : {1e-12 / t, 1e-7 / t, -3e-7 / t, 9.9e-7 / t}) {
            const Complex c = cross_ambiguity(p, p, tau, nu);
            CHECK(std::abs(c - oracle::ambiguity_exact(t, tau, nu)) < 1e-9);
            CHECK(std::abs(c - lim) < 4.0 * std::abs(nu) * t);
        }
    }
}

TEST_CASE("ambiguity matches quadrature and the antiderivative form")
{
    const double t = 1e-6;
    const auto p = Pulse::rectangular(t);
    double worst_quad = 0, worst_exact = 0;
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            const double tau = (-0.9 + 1.77 * i / 20.0) * t;
            const double nu = (-2.45 + 5.0 * j / 20.0) / t;
            const Complex c = cross_ambiguity(p, p, tau, nu);
            const auto q = oracle::ambiguity_trapezoid(t, tau, nu, 10000);
            const auto e = oracle::ambiguity_exact(t, tau, nu);
            worst_quad = std::max(worst_quad, std::abs(c - q) / std::abs(q));
            worst_exact = std::max(worst_exact, std::abs(c - e) / std::abs(e));
        }
    CHECK(worst_quad < 1e-6);
    CHECK(worst_exact < 1e-9);
}

TEST_CASE("random frames")
{
    auto c = SystemConfig::desk();
    const auto q = Constellation::qpsk();
    const auto a = random_frame(c, q, 42);
    const auto b = random_frame(c, q, 42);
    REQUIRE(a.n_streams() == 1);
    CHECK(a.streams[0] == b.streams[0]);
    CHECK(random_frame(c, q, 43).streams[0] != a.streams[0]);

    const double per_symbol = c.avg_power_w / (c.n_doppler * c.n_delay);
    CHECK(a.streams[0].cwiseAbs2().mean() == doctest::Approx(per_symbol).epsilon(1e-12));

    const auto ones = random_frame(c, Constellation(std::vector<Complex>{Complex(1.0, 0.0)}), 1);
    CHECK((ones.streams[0].cwiseAbs().array() - std::sqrt(per_symbol)).abs().maxCoeff() < 1e-15);

    c.n_streams = 2;
    const auto two = random_frame(c, q, 3);
    double total = 0;
    for (const auto& g : two.streams) total += g.cwiseAbs2().mean();
    CHECK(total == doctest::Approx(per_symbol).epsilon(1e-12));
    CHECK_THROWS_AS(Constellation(std::vector<Complex>{}), InvalidArgument);
}
