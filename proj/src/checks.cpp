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

#include "otfsradar/checks.hpp"

#include "oracles.hpp"
#include "otfsradar/coarse.hpp"
#include "otfsradar/crlb.hpp"
#include "otfsradar/estimator.hpp"
#include "otfsradar/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>

namespace otfsradar {

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r{name, false, "", 0};
    try {
        std::tie(r.pass, r.detail) = body();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<Complex> flat(const Grid& g) { return {g.data(), g.data() + g.size()}; }

SystemConfig small_config()
{
    auto c = SystemConfig::desk();
    c.n_delay = 8;
    c.n_antennas = 8;
    c.n_rf = 2;
    return c;
}

// Unit-power symbols so that absolute and relative errors coincide.
SystemConfig unit_power(SystemConfig c)
{
    c.avg_power_w = static_cast<double>(c.n_doppler) * c.n_delay;
    return c;
}

struct DeskSetup {
    SystemConfig config;
    std::unique_ptr<CoarseEngine> engine;
    SearchGrids grids;
};

DeskSetup desk_setup(double sector_deg, double threshold)
{
    DeskSetup s;
    s.config = SystemConfig::desk();
    const auto geo = FrameGeometry::from(s.config);
    const double sector = deg2rad(sector_deg);
    s.engine = std::make_unique<CoarseEngine>(
        DelayDopplerOperator(isfft(random_frame(s.config, Constellation::qpsk(), 5)), geo),
        detection_beamformers(sector, s.config));
    s.grids = SearchGrids::make(geo, sector, 4, threshold);
    return s;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(int k, int n, double p)
{
    double sum = 0;
    for (int i = 0; i <= k; ++i)
        sum += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                        (n - i) * std::log1p(-p));
    return sum;
}

} // namespace

CheckResult check_transform_roundtrip(int frames)
{
    return timed("transform round trip", [&] {
        const auto c = unit_power(SystemConfig::desk());
        double worst = 0, worst_direct = 0;
        for (int f = 0; f < frames; ++f) {
            const Grid x = random_frame(c, Constellation::qpsk(), 1000 + static_cast<std::uint64_t>(f)).streams[0];
            const Grid tf = isfft(x);
            worst = std::max(worst, (sfft(tf) - x).cwiseAbs().maxCoeff());
            if (f == 0) {
                const auto ref = oracle::isfft_direct(flat(x), c.n_doppler, c.n_delay);
                for (std::size_t i = 0; i < ref.size(); ++i) worst_direct = std::max(worst_direct, std::abs(ref[i] - tf.data()[i]));
            }
        }
        return std::pair{worst < 1e-10 && worst_direct < 1e-10,
                         fmt("max |SFFT(ISFFT(x)) - x| = %.3g over %g frames; ISFFT vs direct sum %.3g", worst, frames,
                             worst_direct)};
    });
}

CheckResult check_ambiguity_quadrature()
{
    return timed("ambiguity vs quadrature", [] {
        const double t = derive(SystemConfig::desk()).symbol_time_s;
        const auto p = Pulse::rectangular(t);
        double worst = 0;
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const double tau = (-0.9 + 1.77 * i / 20.0) * t;
                const double nu = (-2.45 + 5.0 * j / 20.0) / t;
                const auto q = oracle::ambiguity_trapezoid(t, tau, nu, 10000);
                worst = std::max(worst, std::abs(cross_ambiguity(p, p, tau, nu) - q) / std::abs(q));
            }
        return std::pair{worst < 1e-6, fmt("max relative error %.3g on a 21 x 21 grid", worst)};
    });
}

CheckResult check_forward_model(int targets)
{
    return timed("forward model vs quadruple sum", [&] {
        const auto c = unit_power(small_config());
        const auto g = FrameGeometry::from(c);
        const auto dd = random_frame(c, Constellation::qpsk(), 17);
        const DelayDopplerOperator op(isfft(dd), g);
        const auto beams = detection_beamformers(deg2rad(20.0), c);
        const auto x = flat(dd.streams[0]);
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0;
        for (int i = 0; i < targets; ++i) {
            const double tau = u(rng) * 0.999 * g.symbol_time_s;
            const double nu = (u(rng) - 0.5) * g.subcarrier_hz;
            const double phi = (u(rng) - 0.5) * 0.3;
            const auto rx = delay_doppler_receive(apply_target(tau, nu, phi, beams, op), c.n_rf, g);
            const auto ref = oracle::dd_response_bruteforce(x, g.n_doppler, g.n_delay, g.symbol_time_s, tau, nu);
            const CMatrix s = beams.spatial_factor(phi);
            for (int r = 0; r < c.n_rf; ++r) {
                double err = 0, peak = 0;
                for (std::size_t k = 0; k < ref.size(); ++k) {
                    const Complex want = s(r, 0) * ref[k];
                    err = std::max(err, std::abs(rx[static_cast<std::size_t>(r)].data()[k] - want));
                    peak = std::max(peak, std::abs(want));
                }
                worst = std::max(worst, err / peak);
            }
        }
        return std::pair{worst < 1e-8, fmt("max relative error %.3g over %g off-grid targets", worst, targets)};
    });
}

CheckResult check_coarse_fft()
{
    return timed("FFT coarse statistic vs direct", [] {
        double worst = 0;
        for (int n : {4, 5}) {
            auto c = small_config();
            c.n_doppler = n;
            c.n_delay = 16;
            const auto g = FrameGeometry::from(c);
            const CoarseEngine engine(DelayDopplerOperator(isfft(random_frame(c, Constellation::qpsk(), 3)), g),
                                      detection_beamformers(deg2rad(20.0), c));
            std::mt19937_64 rng(9);
            CVector y = CVector::Zero(static_cast<Eigen::Index>(c.n_rf) * g.cells());
            add_noise(y, 1.0, rng);
            const double phi = deg2rad(2.5);
            const RMatrix fast = engine.statistic_map(y, phi), direct = engine.statistic_map_direct(y, phi);
            worst = std::max(worst, (fast - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff());
            if (n % 2 == 0) {
                const RVector alt = engine.nyquist_positive_row(y, phi);
                for (int l = 0; l < g.n_delay; ++l) {
                    const CVector gx = apply_target(col_delay_s(l, g), 0.5 * n * g.doppler_cell_hz(), phi, engine.beams(), engine.op());
                    worst = std::max(worst, rel(alt[l], std::norm(gx.dot(y)) / gx.squaredNorm()));
                }
            }
        }
        return std::pair{worst < 1e-8, fmt("max relative difference %.3g", worst)};
    });
}

CheckResult check_noiseless_recovery()
{
    return timed("noiseless on-grid recovery", [] {
        auto s = desk_setup(20.0, 11.0);
        const auto g = s.engine->geometry();
        const auto t = make_target_exact({3e-6, -1.2e-6}, 12 * g.delay_cell_s(), -1 * g.doppler_cell_hz(), deg2rad(3.3), s.config);
        const std::vector<Target> truth{t};
        const CVector y = synthesize(truth, s.engine->beams(), s.engine->op(), 0.0, 0);
        const auto rep = run_algorithm1(y, *s.engine, s.grids);
        if (rep.detections.empty()) return std::pair{false, std::string("no detection")};
        const auto& e = rep.detections.front().estimate;
        const double worst = std::max({rel(e.at.delay_s, t.delay_s), rel(e.at.doppler_hz, t.doppler_hz),
                                       rel(e.at.aoa_rad, t.aoa_rad), std::abs(e.gain - t.gain) / std::abs(t.gain)});
        const double resid = std::sqrt(rep.residual_energy) / y.norm();
        return std::pair{worst < 1e-6 && resid < 1e-8 && rep.detections.size() == 1,
                         fmt("max relative parameter error %.3g, SIC residual %.3g of ||y||, %g detection(s)", worst,
                             resid, static_cast<double>(rep.detections.size()))};
    });
}

CheckResult check_super_resolution()
{
    return timed("off-grid super-resolution", [] {
        auto s = desk_setup(20.0, 11.0);
        const auto g = s.engine->geometry();
        const double cells = 21.37;
        const auto t = make_target_exact({2e-6, 1e-6}, cells * g.delay_cell_s(), 0.41 * g.doppler_cell_hz(), deg2rad(-4.1), s.config);
        const std::vector<Target> truth{t};
        const CVector y = synthesize(truth, s.engine->beams(), s.engine->op(), 0.0, 0);
        const auto rep = run_algorithm1(y, *s.engine, s.grids);
        if (rep.detections.empty()) return std::pair{false, std::string("no detection")};
        const double err = std::abs(rep.detections.front().estimate.at.delay_s / g.delay_cell_s() - cells);
        return std::pair{err < 1e-2, fmt("delay error %.3g cells (target %.2f cells)", err, cells)};
    });
}

CheckResult check_fisher()
{
    return timed("Fisher validity", [] {
        const auto c = SystemConfig::desk();
        const auto g = FrameGeometry::from(c);
        const DelayDopplerOperator op(isfft(random_frame(c, Constellation::qpsk(), 8)), g);
        const auto beams = detection_beamformers(deg2rad(20.0), c);
        std::mt19937_64 rng(4);
        const std::vector<Target> ts{make_target(17.3, 420.0, deg2rad(2.2), c, rng),
                                     make_target(31.9, -810.0, deg2rad(-6.4), c, rng)};

        double worst = 0;
        for (const auto& t : ts) {
            const auto d = model_derivatives(t, op, beams);
            const double a = std::abs(t.gain);
            const std::array<double, kParamsPerTarget> step{1e-5 * a, 1e-5, 1e-4 * g.delay_cell_s(),
                                                            1e-4 * g.doppler_cell_hz(), 1e-6};
            for (int p = 0; p < kParamsPerTarget; ++p) {
                auto shifted = [&](double h) {
                    Target u = t;
                    switch (static_cast<Param>(p)) {
                    case Param::Amplitude: u.gain *= (a + h) / a; break;
                    case Param::Phase: u.gain *= std::exp(Complex(0.0, h)); break;
                    case Param::Delay: u.delay_s += h; break;
                    case Param::Doppler: u.doppler_hz += h; break;
                    case Param::Aoa: u.aoa_rad += h; break;
                    }
                    return model_derivatives(u, op, beams).value;
                };
                const double h = step[static_cast<std::size_t>(p)];
                const CVector fd = (shifted(h) - shifted(-h)) / (2 * h);
                const CVector& an = d.partial[static_cast<std::size_t>(p)];
                worst = std::max(worst, (fd - an).norm() / an.norm());
            }
        }

        const double var = derive(c).noise_var_w;
        const RMatrix f = fisher(ts, op, beams, var);
        const double asym = (f - f.transpose()).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff();
        const RVector d = f.diagonal().cwiseSqrt().cwiseInverse();
        const Eigen::SelfAdjointEigenSolver<RMatrix> scaled(d.asDiagonal() * f * d.asDiagonal());
        const bool psd = scaled.eigenvalues().minCoeff() > 0;
        const auto b1 = crlb_bounds(f, c), b2 = crlb_bounds(fisher(ts, op, beams, 0.5 * var), c);
        double halving = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const auto& x = b1.targets[i];
            const auto& y = b2.targets[i];
            for (auto [u, v] : {std::pair{x.delay_var, y.delay_var}, {x.doppler_var, y.doppler_var}, {x.aoa_var, y.aoa_var},
                                {x.amplitude_var, y.amplitude_var}, {x.phase_var, y.phase_var}})
                halving = std::max(halving, rel(v, 0.5 * u));
        }
        return std::pair{worst < 1e-4 && asym < 1e-12 && psd && halving < 1e-10,
                         fmt("derivative rel. error %.3g, asymmetry %.3g, CRLB halving error %.3g", worst, asym, halving) +
                             (psd ? ", positive definite" : ", NOT positive definite")};
    });
}

CheckResult check_false_alarm(double pfa, int calibration_trials, int validation_trials, int workers)
{
    return timed("threshold calibration", [&] {
        auto s = desk_setup(10.0, 0.0);
        s.grids.threshold = calibrate_threshold(*s.engine, s.grids, pfa, calibration_trials, 101, workers);
        const double rate = measure_false_alarm_rate(*s.engine, s.grids, validation_trials, 101, workers);
        // Central 95% binomial interval for the count at the nominal rate.
        int lo = 0, hi = validation_trials;
        while (lo < validation_trials && binomial_cdf(lo, validation_trials, pfa) < 0.025) ++lo;
        while (hi > 0 && binomial_cdf(hi - 1, validation_trials, pfa) >= 0.975) --hi;
        const int count = static_cast<int>(std::lround(rate * validation_trials));
        return std::pair{count >= lo && count <= hi,
                         fmt("threshold %.4g, measured pfa %.4g", s.grids.threshold, rate) +
                             fmt(" (95%% interval [%.4g, %.4g])", static_cast<double>(lo) / validation_trials,
                                 static_cast<double>(hi) / validation_trials)};
    });
}

CheckResult check_eps_bw()
{
    return timed("eps_BW vs Monte Carlo", [] {
        const double want = eps_bw(128);
        const double mc = oracle::uniform_difference_rmse_mc(rad2deg(three_db_beamwidth(128)), 1000000, 77);
        return std::pair{rel(mc, want) < 5e-3, fmt("W/sqrt(6) = %.5g deg, Monte Carlo %.5g deg", want, mc)};
    });
}

std::vector<CheckResult> selftest_suite()
{
    return {check_transform_roundtrip(20), check_ambiguity_quadrature(), check_forward_model(5),
            check_coarse_fft(),          check_noiseless_recovery(),   check_super_resolution(),
            check_fisher(),              check_eps_bw(),               check_false_alarm(0.1, 1000, 1000, 1)};
}

} // namespace otfsradar
