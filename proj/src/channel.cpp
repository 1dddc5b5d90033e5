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

#include "otfsradar/channel.hpp"

#include "otfsradar/fft.hpp"

#include <cmath>

namespace otfsradar {

namespace {

int next_pow2(int v)
{
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

// int_alpha^beta t e^{-j 2 pi D t} dt on the normalized time axis.
Complex first_moment(double d, double alpha, double beta)
{
    const double w = kTwoPi * d;
    if (std::abs(w) < 0.5) {
        Complex sum{0.0, 0.0};
        Complex coeff{1.0, 0.0};  // (-j w)^k / k!
        double pa = alpha * alpha;
        double pb = beta * beta;
        for (int k = 0; k < 30; ++k) {
            sum += coeff * (pb - pa) / static_cast<double>(k + 2);
            coeff *= Complex(0.0, -w) / static_cast<double>(k + 1);
            pa *= alpha;
            pb *= beta;
        }
        return sum;
    }
    auto anti = [w](double t) { return std::exp(Complex(0.0, -w * t)) * Complex(1.0 / (w * w), t / w); };
    return anti(beta) - anti(alpha);
}

// Kernels K_d(Delta) = C(dT - tau, Delta / T - nu), Delta = -(M-1) .. M-1,
// stored at index Delta + M - 1.
struct Kernels {
    std::vector<Complex> k0, k1;
    std::vector<Complex> dk0_tau, dk1_tau, dk0_nu, dk1_nu;
};

Kernels make_kernels(double delay_s, double doppler_hz, const FrameGeometry& g, bool derivatives)
{
    const int m = g.n_delay;
    const double t = g.symbol_time_s;
    const Pulse pulse = Pulse::rectangular(t);
    const double sigma = 1.0 - delay_s / t;
    const std::size_t taps = static_cast<std::size_t>(2 * m - 1);
    Kernels k;
    k.k0.resize(taps);
    k.k1.resize(taps);
    if (derivatives) {
        k.dk0_tau.resize(taps);
        k.dk1_tau.resize(taps);
        k.dk0_nu.resize(taps);
        k.dk1_nu.resize(taps);
    }
    for (int i = 0; i < 2 * m - 1; ++i) {
        const double delta = i - (m - 1);
        const double nu = delta * g.subcarrier_hz - doppler_hz;
        const auto u = static_cast<std::size_t>(i);
        k.k0[u] = cross_ambiguity(pulse, pulse, -delay_s, nu);
        k.k1[u] = cross_ambiguity(pulse, pulse, t - delay_s, nu);
        if (derivatives) {
            const double dn = nu * t;
            const Complex edge = std::exp(Complex(0.0, -kTwoPi * dn * sigma)) / t;
            k.dk0_tau[u] = -edge;
            k.dk1_tau[u] = edge;
            const Complex scale(0.0, kTwoPi * t);
            k.dk0_nu[u] = scale * first_moment(dn, 0.0, sigma);
            k.dk1_nu[u] = scale * first_moment(dn, sigma, 1.0);
        }
    }
    return k;
}

void check_delay(double delay_s, const FrameGeometry& g)
{
    if (!(delay_s >= 0.0 && delay_s < g.symbol_time_s))
        throw InvalidArgument("delay outside the modeled support 0 <= tau < T");
    if (!std::isfinite(g.symbol_time_s)) throw InvalidArgument("invalid geometry");
}

} // namespace

FrameGeometry FrameGeometry::from(const SystemConfig& config)
{
    const auto d = derive(config);
    return FrameGeometry{config.n_doppler, config.n_delay, d.symbol_time_s, d.subcarrier_hz};
}

Target make_target(double range_m, double velocity_mps, double aoa_rad, const SystemConfig& config,
                   std::mt19937_64& rng)
{
    const auto d = derive(config);
    if (!(range_m > 0.0 && range_m < d.range_max_m))
        throw InvalidArgument("make_target: range must lie in (0, c T / 2) so that the delay stays below one symbol");
    if (!(aoa_rad >= -kPi / 2 && aoa_rad <= kPi / 2)) throw InvalidArgument("make_target: AoA outside [-pi/2, pi/2]");
    const double c = config.speed_of_light_mps;
    const double tau = 2.0 * range_m / c;
    const double nu = 2.0 * velocity_mps * config.carrier_hz / c;
    if (!(std::abs(nu) < d.subcarrier_hz / 2)) throw InvalidArgument("make_target: Doppler beyond half a subcarrier");
    const double amp = std::sqrt(config.rcs_m2 / two_way_pathloss(range_m, d.wavelength_m));
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    const Complex h = std::polar(amp, phase(rng));
    Target target;
    target.gain = h * std::exp(Complex(0.0, kTwoPi * nu * tau));
    target.delay_s = tau;
    target.doppler_hz = nu;
    target.aoa_rad = aoa_rad;
    target.range_m = range_m;
    target.velocity_mps = velocity_mps;
    return target;
}

Target make_target_exact(Complex gain, double delay_s, double doppler_hz, double aoa_rad, const SystemConfig& config)
{
    const double c = config.speed_of_light_mps;
    Target target;
    target.gain = gain;
    target.delay_s = delay_s;
    target.doppler_hz = doppler_hz;
    target.aoa_rad = aoa_rad;
    target.range_m = delay_s * c / 2.0;
    target.velocity_mps = doppler_hz * c / (2.0 * config.carrier_hz);
    return target;
}

DelayDopplerOperator::DelayDopplerOperator(const TimeFrequencyFrame& frame, const FrameGeometry& geometry)
    : frame_(frame), geometry_(geometry)
{
    if (frame.streams.empty()) throw InvalidArgument("DelayDopplerOperator: frame has no streams");
    if (frame.n_time() != geometry.n_doppler || frame.n_subcarriers() != geometry.n_delay)
        throw InvalidArgument("DelayDopplerOperator: frame shape does not match the geometry");
    const int n = geometry.n_doppler;
    const int m = geometry.n_delay;
    padded_ = next_pow2(2 * m - 1);
    for (const auto& x : frame.streams) {
        Grid spec = Grid::Zero(n, padded_);
        spec.leftCols(m) = x;
        fft::transform(spec.data(), padded_, n, 1, padded_, fft::Sign::Forward);
        row_spectra_.push_back(std::move(spec));
    }
}

Grid DelayDopplerOperator::convolve_rows(int stream, std::span<const Complex> kernel) const
{
    const int n = geometry_.n_doppler;
    const int m = geometry_.n_delay;
    std::vector<Complex> ks(static_cast<std::size_t>(padded_), Complex{});
    for (int i = 0; i < 2 * m - 1; ++i) {
        const int lag = i - (m - 1);
        ks[static_cast<std::size_t>((lag + padded_) % padded_)] = kernel[static_cast<std::size_t>(i)];
    }
    fft::transform(ks, fft::Sign::Forward);
    Grid buf = row_spectra_[static_cast<std::size_t>(stream)];
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < padded_; ++c) buf(r, c) *= ks[static_cast<std::size_t>(c)];
    fft::transform(buf.data(), padded_, n, 1, padded_, fft::Sign::Backward);
    return buf.leftCols(m) / static_cast<double>(padded_);
}

std::vector<Grid> DelayDopplerOperator::apply(double delay_s, double doppler_hz) const
{
    check_delay(delay_s, geometry_);
    const int n = geometry_.n_doppler;
    const int m = geometry_.n_delay;
    const Kernels k = make_kernels(delay_s, doppler_hz, geometry_, false);
    const double nu_t = doppler_hz * geometry_.symbol_time_s;
    const double tau_n = delay_s / geometry_.symbol_time_s;

    std::vector<Complex> col_phase(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) col_phase[static_cast<std::size_t>(c)] = std::exp(Complex(0.0, -kTwoPi * c * tau_n));

    std::vector<Grid> out;
    out.reserve(row_spectra_.size());
    for (int s = 0; s < n_streams(); ++s) {
        const Grid w0 = convolve_rows(s, k.k0);
        const Grid w1 = convolve_rows(s, k.k1);
        Grid z(n, m);
        for (int r = 0; r < n; ++r) {
            const Complex p0 = std::exp(Complex(0.0, kTwoPi * r * nu_t));
            const Complex p1 = std::exp(Complex(0.0, kTwoPi * (r - 1) * nu_t));
            for (int c = 0; c < m; ++c) {
                Complex v = p0 * w0(r, c);
                if (r > 0) v += p1 * w1(r - 1, c);
                z(r, c) = col_phase[static_cast<std::size_t>(c)] * v;
            }
        }
        out.push_back(std::move(z));
    }
    return out;
}

DelayDopplerOperator::WithDerivatives DelayDopplerOperator::apply_with_derivatives(double delay_s,
                                                                                   double doppler_hz) const
{
    check_delay(delay_s, geometry_);
    const int n = geometry_.n_doppler;
    const int m = geometry_.n_delay;
    const double t = geometry_.symbol_time_s;
    const Kernels k = make_kernels(delay_s, doppler_hz, geometry_, true);
    const double nu_t = doppler_hz * t;
    const double tau_n = delay_s / t;

    WithDerivatives out;
    for (int s = 0; s < n_streams(); ++s) {
        const Grid w0 = convolve_rows(s, k.k0);
        const Grid w1 = convolve_rows(s, k.k1);
        const Grid w0t = convolve_rows(s, k.dk0_tau);
        const Grid w1t = convolve_rows(s, k.dk1_tau);
        const Grid w0n = convolve_rows(s, k.dk0_nu);
        const Grid w1n = convolve_rows(s, k.dk1_nu);
        Grid z(n, m), zt(n, m), zn(n, m);
        for (int r = 0; r < n; ++r) {
            const Complex p0 = std::exp(Complex(0.0, kTwoPi * r * nu_t));
            const Complex p1 = std::exp(Complex(0.0, kTwoPi * (r - 1) * nu_t));
            const Complex dp0 = Complex(0.0, kTwoPi * r * t) * p0;
            const Complex dp1 = Complex(0.0, kTwoPi * (r - 1) * t) * p1;
            for (int c = 0; c < m; ++c) {
                const Complex cp = std::exp(Complex(0.0, -kTwoPi * c * tau_n));
                Complex v = p0 * w0(r, c);
                Complex vt = p0 * w0t(r, c);
                Complex vn = dp0 * w0(r, c) + p0 * w0n(r, c);
                if (r > 0) {
                    v += p1 * w1(r - 1, c);
                    vt += p1 * w1t(r - 1, c);
                    vn += dp1 * w1(r - 1, c) + p1 * w1n(r - 1, c);
                }
                z(r, c) = cp * v;
                zt(r, c) = cp * vt + Complex(0.0, -kTwoPi * c / t) * z(r, c);
                zn(r, c) = cp * vn;
            }
        }
        out.value.push_back(std::move(z));
        out.d_delay.push_back(std::move(zt));
        out.d_doppler.push_back(std::move(zn));
    }
    return out;
}

CVector mix_streams(const CMatrix& spatial, const std::vector<Grid>& per_stream)
{
    if (per_stream.empty() || spatial.cols() != static_cast<Eigen::Index>(per_stream.size()))
        throw InvalidArgument("mix_streams: spatial factor does not match the stream count");
    const Eigen::Index nm = per_stream.front().size();
    CVector out = CVector::Zero(spatial.rows() * nm);
    for (Eigen::Index r = 0; r < spatial.rows(); ++r) {
        auto block = out.segment(r * nm, nm);
        for (Eigen::Index j = 0; j < spatial.cols(); ++j) {
            const Complex s = spatial(r, j);
            if (s == Complex{}) continue;
            block += s * per_stream[static_cast<std::size_t>(j)].reshaped<Eigen::RowMajor>();
        }
    }
    return out;
}

CVector apply_target(double delay_s, double doppler_hz, double aoa_rad, const BeamformerSet& beams,
                     const DelayDopplerOperator& op)
{
    if (beams.n_streams() != op.n_streams())
        throw InvalidArgument("apply_target: beamformer stream count does not match the frame");
    return mix_streams(beams.spatial_factor(aoa_rad), op.apply(delay_s, doppler_hz));
}

CVector apply_target(double delay_s, double doppler_hz, double aoa_rad, const BeamformerSet& beams,
                     const TimeFrequencyFrame& frame, const FrameGeometry& geometry)
{
    return apply_target(delay_s, doppler_hz, aoa_rad, beams, DelayDopplerOperator(frame, geometry));
}

CVector apply_target(double delay_s, double doppler_hz, double aoa_rad, const BeamformerSet& beams,
                     const DelayDopplerFrame& frame, const FrameGeometry& geometry)
{
    return apply_target(delay_s, doppler_hz, aoa_rad, beams, isfft(frame), geometry);
}

void add_noise(CVector& y, double noise_var, std::mt19937_64& rng)
{
    if (noise_var < 0) throw InvalidArgument("add_noise: negative variance");
    if (noise_var == 0) return;
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var / 2.0));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        y[i] += Complex(re, im);
    }
}

CVector synthesize(std::span<const Target> targets, const BeamformerSet& beams, const DelayDopplerOperator& op,
                   double noise_var, std::uint64_t seed)
{
    CVector y = CVector::Zero(static_cast<Eigen::Index>(beams.n_rf()) * op.geometry().cells());
    for (const auto& t : targets) y += t.gain * apply_target(t.delay_s, t.doppler_hz, t.aoa_rad, beams, op);
    std::mt19937_64 rng(seed);
    add_noise(y, noise_var, rng);
    return y;
}

std::vector<Grid> delay_doppler_receive(const CVector& y, int n_rf, const FrameGeometry& geometry)
{
    const Eigen::Index nm = geometry.cells();
    if (n_rf < 1 || y.size() != n_rf * nm) throw InvalidArgument("delay_doppler_receive: length is not N_rf * N * M");
    std::vector<Grid> out;
    out.reserve(static_cast<std::size_t>(n_rf));
    for (int r = 0; r < n_rf; ++r) {
        Grid tf = y.segment(r * nm, nm).reshaped<Eigen::RowMajor>(geometry.n_doppler, geometry.n_delay);
        out.push_back(sfft(tf));
    }
    return out;
}

} // namespace otfsradar
