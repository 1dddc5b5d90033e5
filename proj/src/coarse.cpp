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

#include "otfsradar/coarse.hpp"

#include "otfsradar/fft.hpp"
#include "otfsradar/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace otfsradar {

namespace {

int next_pow2(int v)
{
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

// Spectrum of a kernel given on lags -(M-1) .. M-1, padded to p.
std::vector<Complex> kernel_spectrum(const std::vector<Complex>& lags, int m, int p)
{
    std::vector<Complex> ks(static_cast<std::size_t>(p), Complex{});
    for (int i = 0; i < 2 * m - 1; ++i) ks[static_cast<std::size_t>((i - (m - 1) + p) % p)] = lags[static_cast<std::size_t>(i)];
    fft::transform(ks, fft::Sign::Forward);
    return ks;
}

// Row-wise linear convolution of x (rows of length M) with a kernel spectrum.
Grid convolve_rows(const Grid& x, const std::vector<Complex>& spectrum, int p)
{
    const auto n = static_cast<int>(x.rows());
    const auto m = static_cast<int>(x.cols());
    Grid buf = Grid::Zero(n, p);
    buf.leftCols(m) = x;
    fft::transform(buf.data(), p, n, 1, p, fft::Sign::Forward);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < p; ++c) buf(r, c) *= spectrum[static_cast<std::size_t>(c)];
    fft::transform(buf.data(), p, n, 1, p, fft::Sign::Backward);
    return buf.leftCols(m) / static_cast<double>(p);
}

// Rows in increasing signed-Doppler order.
std::vector<int> doppler_order(int n)
{
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    std::sort(rows.begin(), rows.end(), [n](int a, int b) { return signed_doppler(a, n) < signed_doppler(b, n); });
    return rows;
}

} // namespace

SearchGrids SearchGrids::make(const FrameGeometry& geometry, double sector_width_rad, int n_cells, double threshold)
{
    if (!(sector_width_rad > 0) || sector_width_rad > kPi) throw InvalidArgument("SearchGrids: sector width must lie in (0, pi]");
    if (n_cells < 1) throw InvalidArgument("SearchGrids: need at least one angle cell");
    SearchGrids g;
    g.geometry = geometry;
    g.threshold = threshold;
    const double w = sector_width_rad / n_cells;
    for (int i = 0; i < n_cells; ++i) {
        const double lo = -sector_width_rad / 2 + i * w;
        const double hi = -sector_width_rad / 2 + (i + 1) * w;
        g.angle_cells.push_back({lo, hi, 0.5 * (lo + hi)});
    }
    return g;
}

SearchGrids SearchGrids::window(const FrameGeometry& geometry, double center_rad, double width_rad, double threshold)
{
    if (!(width_rad >= 0)) throw InvalidArgument("SearchGrids: negative window width");
    SearchGrids g;
    g.geometry = geometry;
    g.threshold = threshold;
    const double lo = std::max(-kPi / 2, center_rad - width_rad / 2);
    const double hi = std::min(kPi / 2, center_rad + width_rad / 2);
    g.angle_cells.push_back({lo, hi, center_rad});
    return g;
}

int SearchGrids::find_cell(double phi_rad) const
{
    for (std::size_t i = 0; i < angle_cells.size(); ++i) {
        const auto& c = angle_cells[i];
        const bool last = i + 1 == angle_cells.size();
        if (phi_rad >= c.lo && (phi_rad < c.hi || (last && phi_rad <= c.hi))) return static_cast<int>(i);
    }
    return -1;
}

int signed_doppler(int row, int n_doppler) { return 2 * row < n_doppler ? row : row - n_doppler; }

namespace {

int entry_doppler(int entry, int n_doppler) { return entry == n_doppler ? n_doppler / 2 : signed_doppler(entry, n_doppler); }

} // namespace

double row_doppler_hz(int row, const FrameGeometry& geometry)
{
    return signed_doppler(row, geometry.n_doppler) * geometry.doppler_cell_hz();
}

double col_delay_s(int col, const FrameGeometry& geometry) { return col * geometry.delay_cell_s(); }

CoarseEngine::CoarseEngine(DelayDopplerOperator op, BeamformerSet beams) : op_(std::move(op)), beams_(std::move(beams))
{
    if (beams_.n_streams() != op_.n_streams())
        throw InvalidArgument("CoarseEngine: beamformer stream count does not match the frame");
    const auto& g = op_.geometry();
    const int n = g.n_doppler;
    const int m = g.n_delay;
    padded_ = next_pow2(2 * m - 1);

    // Rows 0..N-1 in signed order, plus +N/2 for even N (the Nyquist row read with the other sign).
    const int n_entries = n % 2 == 0 ? n + 1 : n;
    for (int row = 0; row < n_entries; ++row) {
        const double kappa = static_cast<double>(entry_doppler(row, n)) / n;
        std::vector<Complex> h(static_cast<std::size_t>(2 * m - 1)), h_rev(h.size());
        for (int i = 0; i < 2 * m - 1; ++i) {
            const int lag = i - (m - 1);
            const double d = lag - kappa;
            h[static_cast<std::size_t>(i)] = d == 0.0 ? Complex{} : 1.0 / Complex(0.0, kTwoPi * d);
        }
        for (int i = 0; i < 2 * m - 1; ++i) h_rev[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(2 * m - 2 - i)];
        const auto spec = kernel_spectrum(h, m, padded_);
        std::vector<Grid> per_stream;
        for (const auto& x : op_.frame().streams) per_stream.push_back(convolve_rows(x, spec, padded_));
        hx_.push_back(std::move(per_stream));
        h_rev_spectrum_.push_back(kernel_spectrum(h_rev, m, padded_));
    }

    const int ns = op_.n_streams();
    gram_.resize(static_cast<std::size_t>(n_entries * m));
    for (int row = 0; row < n_entries; ++row)
        for (int col = 0; col < m; ++col) {
            const auto z = op_.apply(col_delay_s(col, g), entry_doppler(row, n) * g.doppler_cell_hz());
            CMatrix gram(ns, ns);
            for (int a = 0; a < ns; ++a)
                for (int b = 0; b < ns; ++b)
                    gram(a, b) = z[static_cast<std::size_t>(a)].reshaped().dot(z[static_cast<std::size_t>(b)].reshaped());
            gram_[static_cast<std::size_t>(row * m + col)] = std::move(gram);
        }
}

double CoarseEngine::hypothesis_energy(int row, int col, double phi_rad) const
{
    const CMatrix s = beams_.spatial_factor(phi_rad);
    const CMatrix ss = s.adjoint() * s;
    return (ss.array() * gram_[static_cast<std::size_t>(row * geometry().n_delay + col)].array()).sum().real();
}

RMatrix CoarseEngine::statistic_map(const CVector& y, double phi_rad) const
{
    return statistic_rows(y, phi_rad, false);
}

RVector CoarseEngine::nyquist_positive_row(const CVector& y, double phi_rad) const
{
    if (geometry().n_doppler % 2 != 0) return {};
    return statistic_rows(y, phi_rad, true).row(0).transpose();
}

RMatrix CoarseEngine::statistic_rows(const CVector& y, double phi_rad, bool nyquist_only) const
{
    const auto& g = geometry();
    const int n = g.n_doppler;
    const int m = g.n_delay;
    const int nm = n * m;
    const int nrf = beams_.n_rf();
    const int ns = op_.n_streams();
    if (y.size() != static_cast<Eigen::Index>(nrf) * nm) throw InvalidArgument("statistic_map: y has the wrong length");

    const CMatrix s = beams_.spatial_factor(phi_rad);
    const CMatrix ss = s.adjoint() * s;

    // Combined observation per stream: Yt_j = sum_r conj(S[r,j]) Y_r, stored conjugated.
    std::vector<Grid> cy(static_cast<std::size_t>(ns), Grid::Zero(n, m));
    for (int j = 0; j < ns; ++j) {
        auto& c = cy[static_cast<std::size_t>(j)];
        for (int r = 0; r < nrf; ++r)
            c += s(r, j) * y.segment(static_cast<Eigen::Index>(r) * nm, nm).conjugate().reshaped<Eigen::RowMajor>(n, m);
    }

    const int first = nyquist_only ? n : 0;
    const int last = nyquist_only ? n + 1 : n;
    RMatrix out(last - first, m);
    std::vector<Complex> a(static_cast<std::size_t>(m)), b(static_cast<std::size_t>(m));
    std::vector<Complex> c0(static_cast<std::size_t>(m)), c1(static_cast<std::size_t>(m));
    for (int row = first; row < last; ++row) {
        const int kt = entry_doppler(row, n);
        const double kappa = static_cast<double>(kt) / n;
        const Complex gamma = std::exp(Complex(0.0, kTwoPi * kappa));
        std::fill(a.begin(), a.end(), Complex{});
        std::fill(b.begin(), b.end(), Complex{});
        std::fill(c0.begin(), c0.end(), Complex{});
        std::fill(c1.begin(), c1.end(), Complex{});

        for (int j = 0; j < ns; ++j) {
            const Grid& yc = cy[static_cast<std::size_t>(j)];
            const Grid& x = op_.frame().streams[static_cast<std::size_t>(j)];
            const Grid& hx = hx_[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)];
            const Grid rc = convolve_rows(yc, h_rev_spectrum_[static_cast<std::size_t>(row)], padded_);
            for (int t = 0; t < n; ++t)
                for (int d = 0; d < 2 && d <= t; ++d) {
                    const Complex ph = std::exp(Complex(0.0, kTwoPi * (t - d) * kappa));
                    const Complex ad = d == 0 ? ph : -gamma * ph;
                    const Complex bd = d == 0 ? -ph : ph;
                    for (int c = 0; c < m; ++c) {
                        a[static_cast<std::size_t>(c)] += ad * yc(t, c) * hx(t - d, c);
                        b[static_cast<std::size_t>(c)] += bd * x(t - d, c) * rc(t, c);
                    }
                }
            if (kt == 0)
                for (int t = 0; t < n; ++t)
                    for (int c = 0; c < m; ++c) {
                        c0[static_cast<std::size_t>(c)] += yc(t, c) * x(t, c);
                        if (t > 0) c1[static_cast<std::size_t>(c)] += yc(t, c) * x(t - 1, c);
                    }
        }
        fft::transform(a, fft::Sign::Forward);
        fft::transform(b, fft::Sign::Forward);
        if (kt == 0) {
            fft::transform(c0, fft::Sign::Forward);
            fft::transform(c1, fft::Sign::Forward);
        }
        for (int l = 0; l < m; ++l) {
            const auto ul = static_cast<std::size_t>(l);
            const double frac = static_cast<double>(l) / m;
            Complex q = a[ul] + std::exp(Complex(0.0, kTwoPi * kappa * (1.0 - frac))) * b[ul];
            if (kt == 0) q += (1.0 - frac) * c0[ul] + frac * c1[ul];
            const double energy =
                (ss.array() * gram_[static_cast<std::size_t>(row * m + l)].array()).sum().real();
            out(row - first, l) = energy > 0 ? std::norm(q) / energy : 0.0;
        }
    }
    return out;
}

RMatrix CoarseEngine::statistic_map_direct(const CVector& y, double phi_rad) const
{
    const auto& g = geometry();
    RMatrix out(g.n_doppler, g.n_delay);
    for (int row = 0; row < g.n_doppler; ++row)
        for (int col = 0; col < g.n_delay; ++col) {
            const CVector gx = apply_target(col_delay_s(col, g), row_doppler_hz(row, g), phi_rad, beams_, op_);
            const double e = gx.squaredNorm();
            out(row, col) = e > 0 ? std::norm(gx.dot(y)) / e : 0.0;
        }
    return out;
}

namespace {

// Per-slice maps with the Nyquist row holding the larger of its two readings.
struct SliceMaps {
    std::vector<RMatrix> maps;
    std::vector<std::vector<bool>> nyquist_positive;  // [slice][col]
    double total = 0;
};

SliceMaps slice_maps(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids)
{
    const auto& g = engine.geometry();
    const int ny = g.n_doppler / 2;
    SliceMaps out;
    for (const auto& cell : grids.angle_cells) {
        RMatrix map = engine.statistic_map(y, cell.mid);
        std::vector<bool> pos(static_cast<std::size_t>(g.n_delay), false);
        if (g.n_doppler % 2 == 0) {
            const RVector alt = engine.nyquist_positive_row(y, cell.mid);
            for (int l = 0; l < g.n_delay; ++l)
                if (alt[l] > map(ny, l)) map(ny, l) = alt[l], pos[static_cast<std::size_t>(l)] = true;
        }
        out.total += map.sum();
        out.maps.push_back(std::move(map));
        out.nyquist_positive.push_back(std::move(pos));
    }
    return out;
}

} // namespace

CoarseResult coarse_detect(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids)
{
    if (grids.angle_cells.empty()) throw InvalidArgument("coarse_detect: no angle cells");
    const auto& g = engine.geometry();
    auto sm = slice_maps(y, engine, grids);
    CoarseResult res;
    res.maps = std::move(sm.maps);
    res.mean = sm.total / (static_cast<double>(grids.angle_cells.size()) * g.cells());
    if (!(res.mean > 0)) return res;
    for (auto& map : res.maps) map /= res.mean;

    const auto order = doppler_order(g.n_doppler);
    for (std::size_t c = 0; c < res.maps.size(); ++c) {
        const RMatrix& map = res.maps[c];
        for (int p = 0; p < g.n_doppler; ++p)
            for (int l = 0; l < g.n_delay; ++l) {
                const int row = order[static_cast<std::size_t>(p)];
                const double v = map(row, l);
                if (!(v > grids.threshold)) continue;
                const bool even = g.n_doppler % 2 == 0;
                const auto& pos_read = sm.nyquist_positive[c];
                // Position on the signed Doppler axis; a positive Nyquist reading sits past the top row.
                const bool positive = even && p == 0 && pos_read[static_cast<std::size_t>(l)];
                const int p_eff = positive ? g.n_doppler : p;
                auto value_at = [&](int pp, int ll) {
                    if (ll < 0 || ll >= g.n_delay || pp < 0 || pp > g.n_doppler) return -1.0;
                    if (even && (pp == 0 || pp == g.n_doppler)) {
                        const bool want_positive = pp == g.n_doppler;
                        return pos_read[static_cast<std::size_t>(ll)] == want_positive ? map(order[0], ll) : -1.0;
                    }
                    return pp < g.n_doppler ? map(order[static_cast<std::size_t>(pp)], ll) : -1.0;
                };
                bool is_max = true;
                for (int dp = -1; dp <= 1 && is_max; ++dp)
                    for (int dl = -1; dl <= 1; ++dl) {
                        if (dp == 0 && dl == 0) continue;
                        if (!(v > value_at(p_eff + dp, l + dl))) {
                            is_max = false;
                            break;
                        }
                    }
                if (!is_max) continue;
                const double cells = positive ? 0.5 * g.n_doppler : static_cast<double>(signed_doppler(row, g.n_doppler));
                res.candidates.push_back({static_cast<int>(c), row, l, v, cells});
            }
    }
    std::stable_sort(res.candidates.begin(), res.candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.statistic > b.statistic; });
    // A scatterer peaks at the same cell in every slice; keep its strongest slice.
    std::vector<Candidate> unique;
    for (const auto& c : res.candidates)
        if (std::none_of(unique.begin(), unique.end(), [&](const Candidate& u) { return u.row == c.row && u.col == c.col; }))
            unique.push_back(c);
    res.candidates = std::move(unique);
    return res;
}

double max_normalized_statistic(const CVector& y, const CoarseEngine& engine, const SearchGrids& grids)
{
    const auto sm = slice_maps(y, engine, grids);
    double peak = 0;
    for (const auto& map : sm.maps) peak = std::max(peak, map.maxCoeff());
    const double mean = sm.total / (static_cast<double>(grids.angle_cells.size()) * engine.geometry().cells());
    return mean > 0 ? peak / mean : 0.0;
}

namespace {

std::vector<double> noise_maxima(const CoarseEngine& engine, const SearchGrids& grids, int n_trials, std::uint64_t seed,
                                 std::uint64_t stream, int workers)
{
    const Eigen::Index len = static_cast<Eigen::Index>(engine.beams().n_rf()) * engine.geometry().cells();
    std::vector<double> maxima(static_cast<std::size_t>(n_trials));
    parallel_for(n_trials, workers, [&](int t) {
        std::mt19937_64 rng(derive_seed({seed, stream, static_cast<std::uint64_t>(t)}));
        CVector y = CVector::Zero(len);
        add_noise(y, 1.0, rng);
        maxima[static_cast<std::size_t>(t)] = max_normalized_statistic(y, engine, grids);
    });
    return maxima;
}

} // namespace

double calibrate_threshold(const CoarseEngine& engine, const SearchGrids& grids, double pfa, int n_trials,
                           std::uint64_t seed, int workers)
{
    if (!(pfa > 0 && pfa < 1)) throw InvalidArgument("calibrate_threshold: pfa must lie in (0, 1)");
    if (static_cast<double>(n_trials) < 50.0 / pfa - 1e-9)
        throw InvalidArgument("calibrate_threshold: need at least 50 / pfa trials (" + std::to_string(50.0 / pfa) +
                              ") for a stable quantile");
    auto maxima = noise_maxima(engine, grids, n_trials, seed, 0xC0A75E, workers);
    std::sort(maxima.begin(), maxima.end());
    // The smallest threshold exceeded by at most pfa * n samples.
    const auto k = static_cast<std::size_t>(std::ceil((1.0 - pfa) * n_trials)) - 1;
    return maxima[std::min(k, maxima.size() - 1)];
}

double measure_false_alarm_rate(const CoarseEngine& engine, const SearchGrids& grids, int n_trials, std::uint64_t seed,
                                int workers)
{
    if (n_trials < 1) throw InvalidArgument("measure_false_alarm_rate: need at least one trial");
    const auto maxima = noise_maxima(engine, grids, n_trials, seed, 0xFA15E, workers);
    const auto hits = std::count_if(maxima.begin(), maxima.end(), [&](double v) { return v > grids.threshold; });
    return static_cast<double>(hits) / n_trials;
}

} // namespace otfsradar
