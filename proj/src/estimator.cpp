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

#include "otfsradar/estimator.hpp"

#include "otfsradar/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

namespace otfsradar {

namespace {

CVector hypothesis_vector(const DelayDopplerOperator& op, const BeamformerSet& beams, const Hypothesis& h)
{
    return apply_target(h.delay_s, h.doppler_hz, h.aoa_rad, beams, op);
}

CVector interference_vector(const DelayDopplerOperator& op, const BeamformerSet& beams, std::span<const Estimate> others,
                            Eigen::Index len)
{
    CVector s = CVector::Zero(len);
    for (const auto& e : others)
        if (e.gain != Complex{}) s += e.gain * hypothesis_vector(op, beams, e.at);
    return s;
}

// S - Re(I) (or S - |I|) given the summed interference s = sum_q h_q G_q x.
double objective(const CVector& y, const CVector& g, const CVector& s, bool has_interference, InterferenceMode mode)
{
    const double e = g.squaredNorm();
    if (!(e > 0)) return -std::numeric_limits<double>::infinity();
    const Complex gy = g.dot(y);  // g^H y
    const double sv = std::norm(gy) / e;
    if (!has_interference) return sv;
    const Complex iv = std::conj(gy) * g.dot(s) / e;
    return sv - (mode == InterferenceMode::RealPart ? iv.real() : std::abs(iv));
}

struct Group {
    std::vector<Estimate> est;
    std::vector<bool> movable;
    std::vector<opt::Box2> box;  // cell units: {delay, doppler}
};

bool update_gains(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, Group& g)
{
    std::vector<Hypothesis> hs;
    for (const auto& e : g.est) hs.push_back(e.at);
    const auto sol = solve_gains(y, op, beams, hs);
    for (std::size_t i = 0; i < g.est.size(); ++i) g.est[i].gain = sol.gains[static_cast<Eigen::Index>(i)];
    return sol.rank_deficient;
}

std::pair<int, bool> refine_group(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, Group& g,
                                  const RefineOptions& options)
{
    const auto& geo = op.geometry();
    const double dc = geo.delay_cell_s();
    const double fc = geo.doppler_cell_hz();
    bool rank_deficient = false;
    int it = 0;
    for (; it < std::max(1, options.max_iter); ++it) {
        double change = 0;
        for (std::size_t p = 0; p < g.est.size(); ++p) {
            if (!g.movable[p]) continue;
            std::vector<Estimate> others;
            for (std::size_t q = 0; q < g.est.size(); ++q)
                if (q != p) others.push_back(g.est[q]);
            const CVector s = interference_vector(op, beams, others, y.size());
            const bool has_i = s.squaredNorm() > 0;
            const double phi = g.est[p].at.aoa_rad;
            auto f = [&](opt::Point2 u) {
                const CVector gx = apply_target(u[0] * dc, u[1] * fc, phi, beams, op);
                return objective(y, gx, s, has_i, options.interference);
            };
            const opt::Point2 start{g.est[p].at.delay_s / dc, g.est[p].at.doppler_hz / fc};
            auto r = opt::nelder_mead_max(f, start, {0.3, 0.3}, g.box[p], 1e-7, 400);
            if (options.polish) {
                const auto polished = opt::newton_polish_max(f, r.x, 1e-5, g.box[p], 6);
                if (polished.f >= r.f) r.x = polished.x, r.f = polished.f;
            }
            change = std::max(change, std::hypot(r.x[0] - start[0], r.x[1] - start[1]));
            g.est[p].at.delay_s = r.x[0] * dc;
            g.est[p].at.doppler_hz = r.x[1] * fc;
        }
        rank_deficient = update_gains(y, op, beams, g) || rank_deficient;
        if (change < options.tol_cells) {
            ++it;
            break;
        }
    }
    return {it, rank_deficient};
}

opt::Box2 cell_box(const Hypothesis& h, const FrameGeometry& geo)
{
    const double u = h.delay_s / geo.delay_cell_s();
    const double v = h.doppler_hz / geo.doppler_cell_hz();
    const double u_max = geo.n_delay * (1.0 - 1e-9);
    const double v_max = 0.5 * geo.n_doppler;
    return {{std::max(0.0, u - 1.0), std::max(-v_max, v - 1.0)}, {std::min(u_max, u + 1.0), std::min(v_max, v + 1.0)}};
}

// Fine AoA over the candidate's angle cell. A maximum pinned to an interior
// cell edge means the peak lies across it: widen into the neighbour and retry.
double fine_aoa_cell(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                     const SearchGrids& grids, int cell, const Hypothesis& h, double tol)
{
    const auto& cells = grids.angle_cells;
    const int last = static_cast<int>(cells.size()) - 1;
    int a = cell, b = cell;
    double phi = fine_aoa(y, op, beams, h.delay_s, h.doppler_hz, cells[a].lo, cells[b].hi);
    for (int guard = 0; guard < 2; ++guard) {
        const bool at_lo = a > 0 && phi - cells[a].lo <= 10 * tol;
        const bool at_hi = b < last && cells[b].hi - phi <= 10 * tol;
        if (!at_lo && !at_hi) break;
        if (at_lo) --a;
        if (at_hi) ++b;
        phi = fine_aoa(y, op, beams, h.delay_s, h.doppler_hz, cells[a].lo, cells[b].hi);
    }
    return phi;
}

} // namespace

double statistic_s(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, const Hypothesis& h)
{
    const CVector g = hypothesis_vector(op, beams, h);
    const double e = g.squaredNorm();
    if (!(e > 0)) throw DegenerateError("statistic_s: hypothesis has zero energy (||G x|| = 0)");
    return std::norm(g.dot(y)) / e;
}

Complex statistic_i(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, const Hypothesis& h,
                    std::span<const Estimate> others)
{
    const CVector g = hypothesis_vector(op, beams, h);
    const double e = g.squaredNorm();
    if (!(e > 0)) throw DegenerateError("statistic_i: hypothesis has zero energy (||G x|| = 0)");
    if (others.empty()) return {0.0, 0.0};
    const CVector s = interference_vector(op, beams, others, y.size());
    return std::conj(g.dot(y)) * g.dot(s) / e;
}

GainSolution solve_gains(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                         std::span<const Hypothesis> hypotheses)
{
    if (hypotheses.empty()) throw InvalidArgument("solve_gains: need at least one hypothesis");
    const auto p = static_cast<Eigen::Index>(hypotheses.size());
    CMatrix g(y.size(), p);
    for (Eigen::Index i = 0; i < p; ++i) g.col(i) = hypothesis_vector(op, beams, hypotheses[static_cast<std::size_t>(i)]);
    const CMatrix gram = g.adjoint() * g;
    const CVector rhs = g.adjoint() * y;
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
    cod.setThreshold(1e-12);
    cod.compute(gram);
    GainSolution sol;
    sol.rank_deficient = cod.rank() < p;
    sol.gains = cod.solve(rhs);
    return sol;
}

double fine_aoa(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams, double delay_s,
                double doppler_hz, double lo_rad, double hi_rad)
{
    if (!(hi_rad >= lo_rad) || !std::isfinite(lo_rad) || !std::isfinite(hi_rad))
        throw InvalidArgument("fine_aoa: invalid angle window");
    if (lo_rad < -kPi / 2 || hi_rad > kPi / 2) throw InvalidArgument("fine_aoa: window outside [-pi/2, pi/2]");
    const double bw = three_db_beamwidth(std::max(2, beams.n_antennas()));
    // The delay-Doppler response does not depend on phi: evaluate it once.
    const auto z = op.apply(delay_s, doppler_hz);
    auto f = [&](double phi) {
        const CVector g = mix_streams(beams.spatial_factor(phi), z);
        const double e = g.squaredNorm();
        return e > 0 ? std::norm(g.dot(y)) / e : 0.0;
    };
    const auto r = opt::maximize_in_window(f, lo_rad, hi_rad, bw / 4, 1e-5, 1e-4 * bw);
    return std::clamp(r.x, lo_rad, hi_rad);
}

RefineResult refine_delay_doppler(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                                  const Hypothesis& start, std::span<const Estimate> interferers,
                                  const RefineOptions& options)
{
    Group g;
    g.est.push_back({Complex{}, start});
    g.movable.push_back(true);
    g.box.push_back(cell_box(start, op.geometry()));
    for (const auto& e : interferers) {
        g.est.push_back(e);
        g.movable.push_back(false);
        g.box.push_back(cell_box(e.at, op.geometry()));
    }
    // Interferer gains enter I_p from the first iteration; the candidate starts at zero.
    const auto [iters, rd] = refine_group(y, op, beams, g, options);
    return {g.est.front(), iters, rd};
}

CVector sic_cancel(const CVector& y, const DelayDopplerOperator& op, const BeamformerSet& beams,
                   std::span<const Estimate> estimates)
{
    CVector out = y;
    for (const auto& e : estimates)
        if (e.gain != Complex{}) out -= e.gain * hypothesis_vector(op, beams, e.at);
    return out;
}

DetectionReport run_algorithm1(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids,
                               const Algorithm1Options& options)
{
    const auto& op = engine.op();
    const auto& beams = engine.beams();
    const auto& geo = engine.geometry();
    const int max_passes = options.max_passes > 0 ? options.max_passes : beams.n_rf();
    const double y_energy = y.squaredNorm();

    DetectionReport report;
    CVector residual = y;
    std::set<std::tuple<int, int, int>> explored;
    report.stop_reason = "pass budget";

    for (int pass = 0; pass < max_passes; ++pass) {
        if (pass > 0 && residual.squaredNorm() <= options.residual_floor * y_energy) {
            report.stop_reason = "residual floor";
            break;
        }
        const auto coarse = coarse_detect(residual, engine, grids);
        if (coarse.candidates.empty()) {
            report.stop_reason = "no candidate";
            break;
        }
        if (explored.contains({coarse.candidates.front().angle_cell, coarse.candidates.front().row,
                               coarse.candidates.front().col})) {
            report.stop_reason = "explored cell";
            break;
        }
        std::vector<Candidate> picked;
        for (const auto& c : coarse.candidates) {
            if (options.candidates_per_pass > 0 && static_cast<int>(picked.size()) >= options.candidates_per_pass) break;
            if (!explored.contains({c.angle_cell, c.row, c.col})) picked.push_back(c);
        }

        Group g;
        for (const auto& c : picked) {
            const auto& cell = grids.angle_cells[static_cast<std::size_t>(c.angle_cell)];
            Hypothesis h{col_delay_s(c.col, geo), c.doppler_cells * geo.doppler_cell_hz(), cell.mid};
            h.aoa_rad = fine_aoa_cell(residual, op, beams, grids, c.angle_cell, h, options.aoa_tol_rad);
            g.box.push_back(cell_box(h, geo));
            g.est.push_back({Complex{}, h});
            g.movable.push_back(true);
        }
        const auto [iters, rd] = refine_group(residual, op, beams, g, options.refine);
        (void)iters;
        report.rank_deficient = report.rank_deficient || rd;

        for (std::size_t i = 0; i < picked.size(); ++i) {
            auto& h = g.est[i].at;
            h.aoa_rad = fine_aoa_cell(residual, op, beams, grids, picked[i].angle_cell, h, options.aoa_tol_rad);
        }
        report.rank_deficient = update_gains(residual, op, beams, g) || report.rank_deficient;

        for (std::size_t i = 0; i < picked.size(); ++i) {
            const auto& c = picked[i];
            explored.insert({c.angle_cell, c.row, c.col});
            report.detections.push_back({g.est[i], c.statistic, c.angle_cell, c.row, c.col, pass});
        }
        report.passes = pass + 1;
        if (options.sic) residual = sic_cancel(residual, op, beams, g.est);
        if (!options.sic) {
            report.stop_reason = "single pass";
            break;
        }
    }
    report.residual_energy = residual.squaredNorm();
    return report;
}

} // namespace otfsradar
