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

#include <span>
#include <vector>

namespace otfsradar {

// Half-wavelength ULA response a_n(phi) = exp(j (n-1) pi sin phi), n = 1..N_a.
// Transmit and receive responses coincide for a mono-static array.
CVector steering(double phi_rad, int n_antennas);

// d a(phi) / d phi.
CVector steering_derivative(double phi_rad, int n_antennas);

enum class BeamPhase { Detection, Tracking };

// Hybrid beamforming matrices for one operating phase.
//   f: N_a x N_rf transmit beamformer
//   u: N_rf x N_a receive reduction, always the Hermitian of the detection-phase F
//   v: N_rf x N_s stream-to-chain mapping, scaled so that tr(F V V^H F^H) = N_a
struct BeamformerSet {
    CMatrix f;
    CMatrix u;
    CMatrix v;
    BeamPhase phase = BeamPhase::Detection;
    std::vector<double> beam_centers_rad;

    int n_antennas() const { return static_cast<int>(f.rows()); }
    int n_rf() const { return static_cast<int>(u.rows()); }
    int n_streams() const { return static_cast<int>(v.cols()); }

    // U b(phi) a^H(phi) F V, an N_rf x N_s matrix.
    CMatrix spatial_factor(double phi_rad) const;
    CMatrix spatial_factor_derivative(double phi_rad) const;

    // Single-stream view that keeps only the transmit column feeding `stream`
    // (the reduced per-target model used while tracking).
    BeamformerSet stream_view(int stream) const;
};

// The N_rf sub-sector midpoints +-(theta/(2 N_rf) + k theta/N_rf), k = 0..N_rf/2-1,
// sorted ascending. Requires N_rf even.
std::vector<double> detection_angles(double sector_width_rad, int n_rf);

// Wide-sector beams for the detection phase with a single multicast stream.
BeamformerSet detection_beamformers(double sector_width_rad, const SystemConfig& config);

// Narrow beams towards each estimated AoA: stream p is carried by chain p,
// whose column is steered at aoa[p]. The remaining columns keep their
// detection-phase directions but carry no stream. U is the detection-phase Fᴴ
// for `sector_width_rad`.
BeamformerSet tracking_beamformers(std::span<const double> aoa_estimates_rad, double sector_width_rad,
                                   const SystemConfig& config);

// Transmit array gain toward phi: ||a^H F V||^2 / tr(F V V^H F^H).
double tx_beam_gain(const BeamformerSet& beams, double phi_rad);

// ULA half-power beamwidth 0.886 lambda / (N_a d) with d = lambda / 2.
double three_db_beamwidth(int n_antennas);

} // namespace otfsradar
