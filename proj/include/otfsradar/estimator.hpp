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
#include "otfsradar/coarse.hpp"
#include "otfsradar/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace otfsradar {

struct Hypothesis {
    double delay_s = 0;
    double doppler_hz = 0;
    double aoa_rad = 0;
};

struct Estimate {
    Complex gain;
    Hypothesis at;
};

// S = |y^H G x|^2 / ||G x||^2. Throws DegenerateError when ||G x|| = 0.
double statistic_s(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, const Hypothesis& h);

// I = (y^H G x)(x^H G^H sum_q h_q G_q x) / ||G x||^2 over the other targets.
Complex statistic_i(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, const Hypothesis& h,
                    std::span<const Estimate> others);

struct GainSolution {
    CVector gains;
    bool rank_deficient = false;
};

// Least-squares gains for fixed hypotheses: (G_p x)^H (G_q x) h = (G_p x)^H y.
// A rank-deficient Gram matrix yields the minimum-norm solution and a flag.
GainSolution solve_gains(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                         std::span<const Hypothesis> hypotheses);

// 1-D maximization of S over phi in [lo, hi] for fixed delay and Doppler.
double fine_aoa(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, double delay_s,
                double doppler_hz, double lo_rad, double hi_rad);

enum class InterferenceMode { RealPart, Magnitude };

struct RefineOptions {
    int max_iter = 10;
    double tol_cells = 1e-4;
    InterferenceMode interference = InterferenceMode::RealPart;
    bool polish = true;  // Newton polish after the simplex search
};

struct RefineResult {
    Estimate estimate;
    int iterations = 0;
    bool rank_deficient = false;
};

// Alternates a 2-D maximization of S - Re(I) over (tau, nu) within one grid
// cell of `start` and a joint gain solve over the candidate and the
// interferers (whose parameters stay fixed). The start gain is ignored.
RefineResult refine_delay_doppler(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                                  const Hypothesis& start, std::span<const Estimate> interferers,
                                  const RefineOptions& options = {});

// y - sum_p h_p G_p x.
CVector sic_cancel(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                   std::span<const Estimate> estimates);

struct Detection {
    Estimate estimate;
    double s_peak = 0;  // normalized coarse statistic
    int angle_cell = 0;
    int row = 0;
    int col = 0;
    int pass = 0;
};

struct DetectionReport {
    std::vector<Detection> detections;
    int passes = 0;
    double residual_energy = 0;
    bool rank_deficient = false;
    std::string stop_reason;
};

struct Algorithm1Options {
    int max_passes = 0;           // 0: N_rf
    int candidates_per_pass = 1;  // 0: every local maximum above the threshold
    bool sic = true;              // false: a single pass
    double aoa_tol_rad = 1e-5;
    // Stop once the residual energy falls below this fraction of ||y||^2.
    double residual_floor = 1e-14;
    RefineOptions refine;
};

// Coarse detection, fine AoA, delay-Doppler refinement with gain updates,
// AoA re-fit and successive cancellation, repeated until no candidate passes
// the threshold, a candidate repeats an explored (angle cell, grid cell) pair,
// or the pass budget is spent.
DetectionReport run_algorithm1(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids,
                               const Algorithm1Options& options = {});

} // namespace otfsradar
