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
#include "otfsradar/types.hpp"

#include <cstdint>
#include <vector>

namespace otfsradar {

struct AngleCell {
    double lo = 0;
    double hi = 0;
    double mid = 0;
};

// Coarse search space: the N x M delay-Doppler grid, the angle cells Omega
// and the threshold T_r applied to the normalized statistic.
struct SearchGrids {
    FrameGeometry geometry;
    std::vector<AngleCell> angle_cells;
    double threshold = 0;

    // `n_cells` equal cells over [-sector/2, sector/2].
    static SearchGrids make(const FrameGeometry& geometry, double sector_width_rad, int n_cells = 4,
                            double threshold = 0);
    // A single cell [center - width/2, center + width/2] (tracking windows).
    static SearchGrids window(const FrameGeometry& geometry, double center_rad, double width_rad, double threshold = 0);

    int find_cell(double phi_rad) const;  // -1 when outside every cell
};

// Grid row k holds Doppler index k for 2k < N and k - N otherwise, so the
// rows cover [-N/2, N/2) Doppler cells.
int signed_doppler(int row, int n_doppler);
double row_doppler_hz(int row, const FrameGeometry& geometry);
double col_delay_s(int col, const FrameGeometry& geometry);

// On-grid matched filter S(tau_l, nu_k, phi) = |y^H G x|^2 / ||G x||^2 for a
// fixed frame and beamformer set. Everything that depends only on the frame
// is precomputed; a statistic map then costs O(N^2 M log M) per angle.
class CoarseEngine {
  public:
    CoarseEngine(DelayDopplerOperator op, BeamformerSet beams);

    const DelayDopplerOperator& op() const { return op_; }
    const BeamformerSet& beams() const { return beams_; }
    const FrameGeometry& geometry() const { return op_.geometry(); }

    RMatrix statistic_map(const CVector& y, double phi_rad) const;
    // Reference path: one forward-model evaluation per cell.
    RMatrix statistic_map_direct(const CVector& y, double phi_rad) const;
    // Row N/2 evaluated at +N/2 Doppler cells instead of -N/2 (empty for odd N).
    RVector nyquist_positive_row(const CVector& y, double phi_rad) const;
    // ||G x||^2 at an on-grid cell.
    double hypothesis_energy(int row, int col, double phi_rad) const;

  private:
    RMatrix statistic_rows(const CVector& y, double phi_rad, bool nyquist_only) const;

    DelayDopplerOperator op_;
    BeamformerSet beams_;
    int padded_ = 0;
    std::vector<std::vector<Grid>> hx_;                 // [row][stream]: h * X_n per time row
    std::vector<std::vector<Complex>> h_rev_spectrum_;  // [row]: spectrum of lag -> h(-lag)
    std::vector<CMatrix> gram_;                         // [row * M + col]: <Z_j, Z_j'>
};

struct Candidate {
    int angle_cell = 0;
    int row = 0;
    int col = 0;
    double statistic = 0;  // normalized
    double doppler_cells = 0;  // signed; +N/2 when the Nyquist row read positive
};

struct CoarseResult {
    // Normalized, one per angle cell. Row N/2 holds the larger of its -N/2 and +N/2 readings.
    std::vector<RMatrix> maps;
    double mean = 0;            // normalization constant
    std::vector<Candidate> candidates;  // strongest first
};

// Statistic maps at every cell midpoint, divided by their common mean over
// all angles and cells; candidates are strict local maxima (8-neighbourhood
// within a slice, no wrap-around) above grids.threshold. A grid cell that
// peaks in several slices is reported once, with its strongest slice.
CoarseResult coarse_detect(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids);

// Largest normalized statistic over the whole search space.
double max_normalized_statistic(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids);

// Empirical (1 - pfa) quantile of the maximum normalized statistic over
// noise-only inputs. Requires n_trials >= 50 / pfa. Deterministic in seed and
// independent of the worker count.
double calibrate_threshold(const CoarseEngine& engine, const SearchGrids& grids, double pfa, int n_trials,
                           std::uint64_t seed, int workers = 1);

// Fraction of fresh noise-only trials whose maximum exceeds the threshold.
double measure_false_alarm_rate(const CoarseEngine& engine, const SearchGrids& grids, int n_trials,
                                std::uint64_t seed, int workers = 1);

} // namespace otfsradar
