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
#include "otfsradar/channel.hpp"
#include "otfsradar/config.hpp"
#include "otfsradar/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace otfsradar {

// Parameter blocks of the Fisher matrix; element index = block * P + target.
enum class Param { Amplitude = 0, Phase = 1, Delay = 2, Doppler = 3, Aoa = 4 };
inline constexpr int kParamsPerTarget = 5;

// s = A e^{j psi} G(tau, nu, phi) x and its partials in (A, psi, tau, nu, phi),
// all as N_rf N M vectors in the received-signal layout.
struct ModelDerivatives {
    CVector value;
    std::array<CVector, kParamsPerTarget> partial;
};

ModelDerivatives model_derivatives(const Target& target, const DelayDopplerOperator& op, const BeamformerSet& beams);

// (2 / noise_var) Re sum conj(d mu / d theta_i) (d mu / d theta_j), 5P x 5P.
RMatrix fisher(std::span<const Target> targets, const DelayDopplerOperator& op, const BeamformerSet& beams,
               double noise_var);

struct TargetBounds {
    double amplitude_var = 0;
    double phase_var = 0;     // rad^2
    double delay_var = 0;     // s^2
    double doppler_var = 0;   // Hz^2
    double aoa_var = 0;       // rad^2
    double range_var = 0;     // m^2
    double velocity_var = 0;  // (m/s)^2
};

struct CrlbResult {
    std::vector<TargetBounds> targets;
    double condition_number = 0;  // of the diagonally scaled Fisher matrix
};

class SingularFisherError : public DegenerateError {
  public:
    SingularFisherError(const std::string& what, std::vector<double> null_direction)
        : DegenerateError(what), null_direction_(std::move(null_direction))
    {
    }
    // Unit vector in parameter space along which the data carry no information.
    const std::vector<double>& null_direction() const { return null_direction_; }

  private:
    std::vector<double> null_direction_;
};

// Diagonal of the inverse Fisher matrix, with delay and Doppler converted via
// tau = 2r/c and nu = 2 v f_c / c.
CrlbResult crlb_bounds(const RMatrix& fisher_matrix, const SystemConfig& config);

} // namespace otfsradar
