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

#include "otfsradar/array.hpp"
#include "otfsradar/config.hpp"
#include "otfsradar/frame.hpp"
#include "otfsradar/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace otfsradar {

// Grid dimensions and timing shared by the forward model and the estimator.
struct FrameGeometry {
    int n_doppler = 0;       // N
    int n_delay = 0;         // M
    double symbol_time_s = 0;  // T
    double subcarrier_hz = 0;  // 1 / T

    static FrameGeometry from(const SystemConfig& config);

    // Grid spacing of the Doppler-delay lattice.
    double delay_cell_s() const { return symbol_time_s / n_delay; }
    double doppler_cell_hz() const { return subcarrier_hz / n_doppler; }
    int cells() const { return n_doppler * n_delay; }
};

// One point scatterer. `gain` is h' = h exp(j 2 pi nu tau).
struct Target {
    Complex gain;
    double delay_s = 0;
    double doppler_hz = 0;
    double aoa_rad = 0;
    double range_m = 0;
    double velocity_mps = 0;
};

// Builds a target from its kinematics: tau = 2r/c, nu = 2 v f_c / c,
// |h|^2 = lambda^2 sigma_rcs / ((4 pi)^3 r^4), phase of h uniform from `rng`.
// Rejects ranges outside (0, c T / 2) and |nu| >= subcarrier / 2.
Target make_target(double range_m, double velocity_mps, double aoa_rad, const SystemConfig& config,
                   std::mt19937_64& rng);

// Target with an explicit gain and delay-Doppler-angle triple (kinematics derived).
Target make_target_exact(Complex gain, double delay_s, double doppler_hz, double aoa_rad, const SystemConfig& config);

// Per-stream time-frequency response of the delay-Doppler channel,
//   Z[n,m] = sum_{n',m'} C((n-n')T - tau, (m-m')/T - nu) e^{j 2 pi n' T nu} e^{-j 2 pi m tau / T} X[n',m'],
// evaluated without forming the NM x NM channel matrix. With rectangular
// pulses and 0 <= tau < T only n' in {n, n-1} contribute. Holds the row
// spectra of the frame so repeated evaluations only pay for the kernels.
class DelayDopplerOperator {
  public:
    DelayDopplerOperator(const TimeFrequencyFrame& frame, const FrameGeometry& geometry);

    const FrameGeometry& geometry() const { return geometry_; }
    const TimeFrequencyFrame& frame() const { return frame_; }
    int n_streams() const { return frame_.n_streams(); }

    // Z_j for every stream j.
    std::vector<Grid> apply(double delay_s, double doppler_hz) const;

    struct WithDerivatives {
        std::vector<Grid> value;
        std::vector<Grid> d_delay;    // per second
        std::vector<Grid> d_doppler;  // per hertz
    };
    WithDerivatives apply_with_derivatives(double delay_s, double doppler_hz) const;

  private:
    TimeFrequencyFrame frame_;
    FrameGeometry geometry_;
    int padded_ = 0;
    std::vector<Grid> row_spectra_;  // N x padded, per stream

    Grid convolve_rows(int stream, std::span<const Complex> kernel) const;
};

// Spatial mixing of per-stream responses: chain r gets sum_j S[r,j] Z_j.
// Output layout is RF-chain-major: index r*N*M + n*M + m.
CVector mix_streams(const CMatrix& spatial, const std::vector<Grid>& per_stream);

// G_p(tau, nu, phi) x for the frame held by `op`.
CVector apply_target(double delay_s, double doppler_hz, double aoa_rad, const BeamformerSet& beams,
                     const DelayDopplerOperator& op);
CVector apply_target(double delay_s, double doppler_hz, double aoa_rad, const BeamformerSet& beams,
                     const TimeFrequencyFrame& frame, const FrameGeometry& geometry);
CVector apply_target(double delay_s, double doppler_hz, double aoa_rad, const BeamformerSet& beams,
                     const DelayDopplerFrame& frame, const FrameGeometry& geometry);

// sum_p h'_p G_p x + w, with w circularly-symmetric Gaussian of variance
// `noise_var` per complex sample. Deterministic in `seed`.
CVector synthesize(std::span<const Target> targets, const BeamformerSet& beams, const DelayDopplerOperator& op,
                   double noise_var, std::uint64_t seed);

// Adds i.i.d. CN(0, noise_var) samples to y.
void add_noise(CVector& y, double noise_var, std::mt19937_64& rng);

// SFFT of each RF chain of a received vector.
std::vector<Grid> delay_doppler_receive(const CVector& y, int n_rf, const FrameGeometry& geometry);

} // namespace otfsradar
