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
#include "otfsradar/types.hpp"

#include <cstdint>
#include <vector>

namespace otfsradar {

// Symbols x_{k,l} on the N x M Doppler-delay grid, one grid per stream.
struct DelayDopplerFrame {
    std::vector<Grid> streams;

    int n_streams() const { return static_cast<int>(streams.size()); }
    int n_doppler() const { return streams.empty() ? 0 : static_cast<int>(streams.front().rows()); }
    int n_delay() const { return streams.empty() ? 0 : static_cast<int>(streams.front().cols()); }
};

// Symbols X[n, m] on the N x M time-frequency grid, one grid per stream.
struct TimeFrequencyFrame {
    std::vector<Grid> streams;

    int n_streams() const { return static_cast<int>(streams.size()); }
    int n_time() const { return streams.empty() ? 0 : static_cast<int>(streams.front().rows()); }
    int n_subcarriers() const { return streams.empty() ? 0 : static_cast<int>(streams.front().cols()); }
};

enum class PulseKind { Rectangular };

// Unit-energy pulse. Rectangular: 1/sqrt(T) on [0, T).
struct Pulse {
    PulseKind kind = PulseKind::Rectangular;
    double duration_s = 1.0;

    static Pulse rectangular(double duration_s);
    Complex value(double t) const;
};

// X[n,m] = sum_{k,l} x[k,l] exp(j 2 pi (n k / N - m l / M)), unnormalized.
Grid isfft(const Grid& dd);
TimeFrequencyFrame isfft(const DelayDopplerFrame& dd);

// x[k,l] = 1/(N M) sum_{n,m} X[n,m] exp(j 2 pi (m l / M - n k / N)).
Grid sfft(const Grid& tf);
DelayDopplerFrame sfft(const TimeFrequencyFrame& tf);

// C(tau, nu) = int rx(s) tx*(s - tau) exp(-j 2 pi nu s) ds, closed form for the
// supported pulse pair. Zero for |tau| >= T.
Complex cross_ambiguity(const Pulse& rx, const Pulse& tx, double tau_s, double nu_hz);

// Unit-energy constellation (points are rescaled to unit mean energy).
struct Constellation {
    std::vector<Complex> points;

    static Constellation qpsk();
    explicit Constellation(std::vector<Complex> pts);
};

// I.i.d. uniform symbols, N_s = config.n_streams streams, scaled so that the
// per-cell energy summed over streams is P_avg / (N M). Deterministic in seed.
DelayDopplerFrame random_frame(const SystemConfig& config, const Constellation& constellation, std::uint64_t seed);

} // namespace otfsradar
