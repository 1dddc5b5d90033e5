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

#include "otfsradar/frame.hpp"

#include "otfsradar/fft.hpp"

#include <cmath>
#include <random>

namespace otfsradar {

namespace {

void check_shape(const std::vector<Grid>& grids, const char* what)
{
    if (grids.empty()) throw InvalidArgument(std::string(what) + ": frame has no streams");
    const auto rows = grids.front().rows();
    const auto cols = grids.front().cols();
    if (rows < 1 || cols < 1) throw InvalidArgument(std::string(what) + ": empty grid");
    for (const auto& g : grids)
        if (g.rows() != rows || g.cols() != cols)
            throw InvalidArgument(std::string(what) + ": streams have mismatched grid shapes");
}

// Doppler / time axis is the row index (stride M), delay / subcarrier the column.
void transform_rows(Grid& g, fft::Sign sign)
{
    fft::transform(g.data(), static_cast<int>(g.cols()), static_cast<int>(g.rows()), 1, static_cast<int>(g.cols()), sign);
}

void transform_cols(Grid& g, fft::Sign sign)
{
    fft::transform(g.data(), static_cast<int>(g.rows()), static_cast<int>(g.cols()), static_cast<int>(g.cols()), 1, sign);
}

double sinc(double x)
{
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

} // namespace

Pulse Pulse::rectangular(double duration_s)
{
    if (!(duration_s > 0)) throw InvalidArgument("Pulse: duration must be positive");
    return Pulse{PulseKind::Rectangular, duration_s};
}

Complex Pulse::value(double t) const
{
    return (t >= 0.0 && t < duration_s) ? Complex(1.0 / std::sqrt(duration_s), 0.0) : Complex(0.0, 0.0);
}

Grid isfft(const Grid& dd)
{
    Grid out = dd;
    transform_cols(out, fft::Sign::Backward);  // +j 2 pi n k / N
    transform_rows(out, fft::Sign::Forward);   // -j 2 pi m l / M
    return out;
}

Grid sfft(const Grid& tf)
{
    Grid out = tf;
    transform_cols(out, fft::Sign::Forward);   // -j 2 pi n k / N
    transform_rows(out, fft::Sign::Backward);  // +j 2 pi m l / M
    out /= static_cast<double>(tf.rows() * tf.cols());
    return out;
}

TimeFrequencyFrame isfft(const DelayDopplerFrame& dd)
{
    check_shape(dd.streams, "isfft");
    TimeFrequencyFrame tf;
    tf.streams.reserve(dd.streams.size());
    for (const auto& g : dd.streams) tf.streams.push_back(isfft(g));
    return tf;
}

DelayDopplerFrame sfft(const TimeFrequencyFrame& tf)
{
    check_shape(tf.streams, "sfft");
    DelayDopplerFrame dd;
    dd.streams.reserve(tf.streams.size());
    for (const auto& g : tf.streams) dd.streams.push_back(sfft(g));
    return dd;
}

Complex cross_ambiguity(const Pulse& rx, const Pulse& tx, double tau_s, double nu_hz)
{
    if (rx.kind != PulseKind::Rectangular || tx.kind != PulseKind::Rectangular || rx.duration_s != tx.duration_s)
        throw InvalidArgument("cross_ambiguity: only equal-duration rectangular pulses are supported");
    const double t = rx.duration_s;
    if (!(std::abs(tau_s) < t)) return {0.0, 0.0};
    // Overlap of rx on [0,T) and the shifted tx on [tau, T+tau).
    const double a = std::max(0.0, tau_s);
    const double b = std::min(t, t + tau_s);
    const double len = b - a;
    return std::polar(len / t * sinc(kPi * nu_hz * len), -kPi * nu_hz * (a + b));
}

Constellation::Constellation(std::vector<Complex> pts) : points(std::move(pts))
{
    if (points.empty()) throw InvalidArgument("Constellation: no points");
    double energy = 0;
    for (const auto& p : points) energy += std::norm(p);
    energy /= static_cast<double>(points.size());
    if (!(energy > 0)) throw InvalidArgument("Constellation: zero energy");
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& p : points) p *= scale;
}

Constellation Constellation::qpsk()
{
    return Constellation({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
}

DelayDopplerFrame random_frame(const SystemConfig& config, const Constellation& constellation, std::uint64_t seed)
{
    config.validate();
    const int n = config.n_doppler;
    const int m = config.n_delay;
    const int ns = config.n_streams;
    const double amplitude = std::sqrt(config.avg_power_w / (static_cast<double>(n) * m * ns));

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, constellation.points.size() - 1);
    DelayDopplerFrame frame;
    frame.streams.assign(static_cast<std::size_t>(ns), Grid(n, m));
    for (auto& g : frame.streams)
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = amplitude * constellation.points[pick(rng)];
    return frame;
}

} // namespace otfsradar
