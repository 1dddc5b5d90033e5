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

#include "otfsradar/experiments.hpp"

#include "otfsradar/crlb.hpp"
#include "otfsradar/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <tuple>

namespace otfsradar {

std::string scenario_name(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::DetectionSingle: return "detect1";
    case ScenarioKind::DetectionTwoSic: return "detect2-sic";
    case ScenarioKind::TrackingThree: return "track3";
    }
    return "?";
}

ScenarioKind parse_scenario(const std::string& name)
{
    for (auto k : {ScenarioKind::DetectionSingle, ScenarioKind::DetectionTwoSic, ScenarioKind::TrackingThree})
        if (scenario_name(k) == name) return k;
    throw InvalidArgument("unknown scenario '" + name + "' (expected detect1, detect2-sic or track3)");
}

void Scenario::validate() const
{
    if (trials < 1) throw InvalidArgument("scenario: trials must be at least 1");
    if (sweep.empty()) throw InvalidArgument("scenario: empty sweep");
    if (!(pfa > 0 && pfa < 1)) throw InvalidArgument("scenario: pfa must lie in (0, 1)");
    if (!(sector_deg > 0 && sector_deg <= 180)) throw InvalidArgument("scenario: sector must lie in (0, 180] degrees");
    for (const auto& p : sweep) {
        if (!(p.range_m > 0)) throw InvalidArgument("scenario: sweep ranges must be positive");
        if (p.n_antennas < 0) throw InvalidArgument("scenario: negative antenna count");
    }
    if (kind == ScenarioKind::DetectionTwoSic && !(fixed_range_m > 0))
        throw InvalidArgument("scenario: fixed range must be positive");
}

Scenario default_scenario(ScenarioKind kind, const SystemConfig& config)
{
    Scenario s;
    s.kind = kind;
    const double r_max = derive(config).range_max_m;
    auto ranges = [&](double lo, double step) {
        for (double r = lo; r < r_max - 1e-9; r += step) s.sweep.push_back({r, 0});
    };
    switch (kind) {
    case ScenarioKind::DetectionSingle: ranges(5, 5); break;
    case ScenarioKind::DetectionTwoSic: ranges(20, 5); break;
    case ScenarioKind::TrackingThree:
        for (int na : {16, 32, 64}) s.sweep.push_back({0.4 * r_max, na});
        break;
    }
    return s;
}

double eps_bw(int n_antennas)
{
    if (n_antennas < 2) throw InvalidArgument("eps_bw: need at least two antennas");
    return rad2deg(three_db_beamwidth(n_antennas)) / std::sqrt(6.0);
}

Interval wilson_interval(int successes, int n, double z)
{
    if (n <= 0 || successes < 0 || successes > n) throw InvalidArgument("wilson_interval: need 0 <= k <= n, n > 0");
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {successes == 0 ? 0.0 : std::max(0.0, center - half), successes == n ? 1.0 : std::min(1.0, center + half)};
}

double estimate_range_m(const Hypothesis& h, const SystemConfig& config)
{
    return 0.5 * h.delay_s * config.speed_of_light_mps;
}

double estimate_velocity_mps(const Hypothesis& h, const SystemConfig& config)
{
    return h.doppler_hz * config.speed_of_light_mps / (2.0 * config.carrier_hz);
}

std::vector<int> match_detections(std::span<const Detection> detections, std::span<const TruthKinematics> truths,
                                  const SystemConfig& config, double angle_gate_rad)
{
    const auto d = derive(config);
    std::vector<std::size_t> order(detections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return detections[a].s_peak > detections[b].s_peak; });

    std::vector<int> match(truths.size(), -1);
    for (const auto i : order) {
        const auto& h = detections[i].estimate.at;
        const double r = estimate_range_m(h, config);
        const double v = estimate_velocity_mps(h, config);
        int best = -1;
        double best_dist = 0;
        for (std::size_t t = 0; t < truths.size(); ++t) {
            if (match[t] >= 0) continue;
            const double dr = std::abs(r - truths[t].range_m) / d.range_res_m;
            const double dv = std::abs(v - truths[t].velocity_mps) / d.vel_res_mps;
            const double da = std::abs(h.aoa_rad - truths[t].aoa_rad);
            if (dr > 3 || dv > 3 || da > angle_gate_rad) continue;
            const double dist = std::max(dr, dv);
            if (best < 0 || dist < best_dist) best = static_cast<int>(t), best_dist = dist;
        }
        if (best >= 0) match[static_cast<std::size_t>(best)] = static_cast<int>(i);
    }
    return match;
}

namespace {

std::uint64_t kind_tag(ScenarioKind kind) { return 0x5CE0 + static_cast<std::uint64_t>(kind); }

// One scored truth instance of one trial.
struct Scored {
    bool swept = false;  // the target whose range is the sweep coordinate
    bool matched = false;
    double err_range = 0, err_vel = 0, err_aoa = 0;
    bool has_crlb = false;
    double var_range = 0, var_vel = 0, var_aoa = 0;
};

using TrialOutcome = std::vector<Scored>;

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Strictly inside the unambiguous velocity band.
double draw_velocity(std::mt19937_64& rng, const DerivedQuantities& d)
{
    return uniform(rng, -1.0, 1.0) * 0.5 * d.vel_max_mps * (1.0 - 1e-9);
}

TruthKinematics kinematics(const Target& t) { return {t.range_m, t.velocity_mps, t.aoa_rad}; }

void score(TrialOutcome& out, std::span<const Target> truths, std::span<const std::size_t> scored,
           const DetectionReport& rep, const SystemConfig& config, double angle_gate_rad,
           const std::optional<CrlbResult>& crlb)
{
    std::vector<TruthKinematics> tk;
    for (const auto& t : truths) tk.push_back(kinematics(t));
    const auto match = match_detections(rep.detections, tk, config, angle_gate_rad);
    for (const auto i : scored) {
        Scored s;
        s.swept = i == scored.back();
        if (match[i] >= 0) {
            const auto& h = rep.detections[static_cast<std::size_t>(match[i])].estimate.at;
            s.matched = true;
            s.err_range = estimate_range_m(h, config) - truths[i].range_m;
            s.err_vel = estimate_velocity_mps(h, config) - truths[i].velocity_mps;
            s.err_aoa = h.aoa_rad - truths[i].aoa_rad;
        }
        if (crlb) {
            const auto& b = crlb->targets[i];
            s.has_crlb = true;
            s.var_range = b.range_var;
            s.var_vel = b.velocity_var;
            s.var_aoa = b.aoa_var;
        }
        out.push_back(s);
    }
}

std::optional<CrlbResult> try_crlb(std::span<const Target> targets, const DelayDopplerOperator& op,
                                   const BeamformerSet& beams, double noise_var, const SystemConfig& config)
{
    try {
        return crlb_bounds(fisher(targets, op, beams, noise_var), config);
    } catch (const DegenerateError&) {
        return std::nullopt;
    }
}

MetricsRow aggregate(const SweepPoint& pt, int n_antennas, double sector_deg, std::span<const TrialOutcome> trials,
                     double threshold)
{
    MetricsRow row;
    row.range_m = pt.range_m;
    row.n_antennas = n_antennas;
    row.sector_deg = sector_deg;
    row.trials_used = static_cast<int>(trials.size());
    row.threshold = threshold;
    row.eps_bw_deg = eps_bw(n_antennas);
    double er = 0, ev = 0, ea = 0, cr = 0, cv = 0, ca = 0;
    int n_crlb = 0;
    int swept_scored = 0, swept_matched = 0;
    for (const auto& t : trials)
        for (const auto& s : t) {
            ++row.targets_scored;
            if (s.swept) ++swept_scored;
            if (s.matched) {
                ++row.matched;
                if (s.swept) ++swept_matched;
                er += s.err_range * s.err_range;
                ev += s.err_vel * s.err_vel;
                ea += s.err_aoa * s.err_aoa;
            }
            if (s.has_crlb) {
                ++n_crlb;
                cr += s.var_range;
                cv += s.var_vel;
                ca += s.var_aoa;
            }
        }
    if (row.targets_scored > 0) {
        row.pd = static_cast<double>(row.matched) / row.targets_scored;
        const auto ci = wilson_interval(row.matched, row.targets_scored);
        row.pd_lo = ci.lo;
        row.pd_hi = ci.hi;
    }
    if (swept_scored > 0) {
        row.pd_swept = static_cast<double>(swept_matched) / swept_scored;
        const auto ci = wilson_interval(swept_matched, swept_scored);
        row.pd_swept_lo = ci.lo;
        row.pd_swept_hi = ci.hi;
    }
    if (row.matched > 0) {
        row.rmse_range_m = std::sqrt(er / row.matched);
        row.rmse_vel_mps = std::sqrt(ev / row.matched);
        row.rmse_aoa_deg = rad2deg(std::sqrt(ea / row.matched));
    }
    if (n_crlb > 0) {
        row.crlb_range_m = std::sqrt(cr / n_crlb);
        row.crlb_vel_mps = std::sqrt(cv / n_crlb);
        row.crlb_aoa_deg = rad2deg(std::sqrt(ca / n_crlb));
    }
    return row;
}

SystemConfig point_config(const SystemConfig& base, const SweepPoint& pt)
{
    SystemConfig c = base;
    if (pt.n_antennas > 0) c.n_antennas = pt.n_antennas;
    return c;
}

// Detection-phase machinery shared by every trial with the same antenna count.
struct DetectionSetup {
    SystemConfig config;
    std::unique_ptr<CoarseEngine> engine;
    SearchGrids grids;
};

DetectionSetup make_detection_setup(const SystemConfig& config, const Scenario& sc, int workers)
{
    DetectionSetup s;
    s.config = config;
    s.config.n_streams = 1;
    s.config.validate();
    const auto geo = FrameGeometry::from(s.config);
    const auto frame = random_frame(s.config, Constellation::qpsk(), derive_seed({sc.seed, kind_tag(sc.kind), 0xF4A3E}));
    const double sector = deg2rad(sc.sector_deg);
    s.engine = std::make_unique<CoarseEngine>(DelayDopplerOperator(isfft(frame), geo),
                                              detection_beamformers(sector, s.config));
    s.grids = SearchGrids::make(geo, sector);
    if (sc.threshold) {
        s.grids.threshold = *sc.threshold;
    } else {
        const int n_cal =
            sc.calibration_trials > 0 ? sc.calibration_trials : static_cast<int>(std::ceil(50.0 / sc.pfa - 1e-9));
        s.grids.threshold = calibrate_threshold(
            *s.engine, s.grids, sc.pfa, n_cal,
            derive_seed({sc.seed, kind_tag(sc.kind), 0xCA1, static_cast<std::uint64_t>(s.config.n_antennas)}), workers);
    }
    return s;
}

TrialOutcome detection_trial(const DetectionSetup& s, const Scenario& sc, const SweepPoint& pt, std::mt19937_64& rng)
{
    const auto& c = s.config;
    const auto d = derive(c);
    const double half = 0.5 * deg2rad(sc.sector_deg);
    std::vector<Target> truths;
    std::vector<std::size_t> scored;
    if (sc.kind == ScenarioKind::DetectionTwoSic) {
        truths.push_back(make_target(sc.fixed_range_m, draw_velocity(rng, d), uniform(rng, -half, half), c, rng));
        scored.push_back(0);
    }
    truths.push_back(make_target(pt.range_m, draw_velocity(rng, d), uniform(rng, -half, half), c, rng));
    scored.push_back(truths.size() - 1);

    const auto& op = s.engine->op();
    const auto& beams = s.engine->beams();
    const CVector y = synthesize(truths, beams, op, d.noise_var_w, rng());
    Algorithm1Options opts;
    opts.sic = sc.sic;
    if (!sc.sic) opts.candidates_per_pass = 0;
    const auto rep = run_algorithm1(y, *s.engine, s.grids, opts);
    const double cell_width = s.grids.angle_cells.front().hi - s.grids.angle_cells.front().lo;
    TrialOutcome out;
    score(out, truths, scored, rep, c, cell_width, try_crlb(truths, op, beams, d.noise_var_w, c));
    return out;
}

// Tracking: three beams, reference target 0 estimated inside its 3-dB window.
TrialOutcome tracking_trial(const SystemConfig& c, const DelayDopplerFrame& frame, const SweepPoint& pt,
                            std::mt19937_64& rng)
{
    constexpr int kTargets = 3;
    const auto d = derive(c);
    const auto geo = FrameGeometry::from(c);
    const double w = three_db_beamwidth(c.n_antennas);
    const double sector = c.n_rf * w;
    const TimeFrequencyFrame tf = isfft(frame);
    const DelayDopplerOperator op(tf, geo);
    const DelayDopplerOperator op_ref(TimeFrequencyFrame{{tf.streams.front()}}, geo);

    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> centers(kTargets);
        for (auto& phi : centers) phi = uniform(rng, -0.5 * sector + 0.5 * w, 0.5 * sector - 0.5 * w);
        bool separated = true;
        for (int a = 0; a < kTargets; ++a)
            for (int b = a + 1; b < kTargets; ++b)
                separated = separated && std::abs(centers[static_cast<std::size_t>(a)] - centers[static_cast<std::size_t>(b)]) >= w;
        if (!separated) continue;
        std::vector<Target> truths;
        for (int p = 0; p < kTargets; ++p) {
            const double range = p == 0 ? pt.range_m : uniform(rng, 3 * d.range_res_m, 0.9 * d.range_max_m);
            const double aoa = centers[static_cast<std::size_t>(p)] + uniform(rng, -0.5 * w, 0.5 * w);
            truths.push_back(make_target(range, draw_velocity(rng, d), aoa, c, rng));
        }
        const auto beams = tracking_beamformers(centers, sector, c);
        const CoarseEngine engine(op_ref, beams.stream_view(0));

        // Complete masking: an interferer outshining the reference inside its own window.
        const std::vector<Target> ref{truths.front()};
        const double s_ref = statistic_s(synthesize(ref, beams, op, 0.0, 0), op_ref, engine.beams(),
                                         {truths[0].delay_s, truths[0].doppler_hz, centers[0]});
        bool masked = false;
        for (int q = 1; q < kTargets && !masked; ++q) {
            const std::vector<Target> one{truths[static_cast<std::size_t>(q)]};
            masked = engine.statistic_map(synthesize(one, beams, op, 0.0, 0), centers[0]).maxCoeff() >= s_ref;
        }
        if (masked) continue;

        const CVector y = synthesize(truths, beams, op, d.noise_var_w, rng());
        const auto grids = SearchGrids::window(geo, centers[0], w, 0.0);
        Algorithm1Options opts;
        opts.max_passes = 1;
        opts.sic = false;
        const auto rep = run_algorithm1(y, engine, grids, opts);
        TrialOutcome out;
        const std::size_t scored[] = {0};
        score(out, truths, scored, rep, c, w, try_crlb(truths, op, beams, d.noise_var_w, c));
        return out;
    }
    throw DegenerateError("tracking scenario: no unmasked configuration after 1000 draws");
}

} // namespace

ScenarioResult run_scenario(const SystemConfig& config, const Scenario& sc, int workers)
{
    sc.validate();
    config.validate();
    ScenarioResult result;

    std::vector<std::size_t> order(sc.sweep.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto na = point_config(config, sc.sweep[a]).n_antennas, nb = point_config(config, sc.sweep[b]).n_antennas;
        return std::tie(sc.sweep[a].range_m, na) < std::tie(sc.sweep[b].range_m, nb);
    });

    std::map<int, DetectionSetup> setups;
    for (const auto& pt : sc.sweep) {
        const auto c = point_config(config, pt);
        if (!(pt.range_m < derive(c).range_max_m))
            throw InvalidArgument("scenario: range " + std::to_string(pt.range_m) + " m is outside (0, r_max)");
        if (sc.kind == ScenarioKind::TrackingThree) {
            if (c.n_rf < 3) throw InvalidArgument("track3 needs at least 3 RF chains");
            continue;
        }
        if (!setups.contains(c.n_antennas)) {
            setups.emplace(c.n_antennas, make_detection_setup(c, sc, workers));
            result.thresholds.push_back(setups.at(c.n_antennas).grids.threshold);
        }
    }

    for (const auto idx : order) {
        const auto& pt = sc.sweep[idx];
        std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(sc.trials));
        auto seed_of = [&](int t) {
            return derive_seed({sc.seed, kind_tag(sc.kind), static_cast<std::uint64_t>(idx), static_cast<std::uint64_t>(t)});
        };
        if (sc.kind == ScenarioKind::TrackingThree) {
            auto c = point_config(config, pt);
            c.n_streams = 3;
            c.validate();
            const auto frame = random_frame(c, Constellation::qpsk(), derive_seed({sc.seed, kind_tag(sc.kind), 0xF4A3E}));
            parallel_for(sc.trials, workers, [&](int t) {
                std::mt19937_64 rng(seed_of(t));
                outcomes[static_cast<std::size_t>(t)] = tracking_trial(c, frame, pt, rng);
            });
            result.rows.push_back(
                aggregate(pt, c.n_antennas, rad2deg(c.n_rf * three_db_beamwidth(c.n_antennas)), outcomes, 0.0));
        } else {
            const auto& s = setups.at(point_config(config, pt).n_antennas);
            parallel_for(sc.trials, workers, [&](int t) {
                std::mt19937_64 rng(seed_of(t));
                outcomes[static_cast<std::size_t>(t)] = detection_trial(s, sc, pt, rng);
            });
            result.rows.push_back(aggregate(pt, s.config.n_antennas, sc.sector_deg, outcomes, s.grids.threshold));
        }
    }
    return result;
}

std::vector<MetricsRow> scenario_detection_single(const SystemConfig& config, std::span<const double> ranges_m,
                                                  double sector_deg, int trials, std::uint64_t seed, int workers)
{
    Scenario sc;
    sc.kind = ScenarioKind::DetectionSingle;
    for (double r : ranges_m) sc.sweep.push_back({r, 0});
    sc.sector_deg = sector_deg;
    sc.trials = trials;
    sc.seed = seed;
    return run_scenario(config, sc, workers).rows;
}

std::vector<MetricsRow> scenario_detection_two_sic(const SystemConfig& config, double fixed_range_m,
                                                   std::span<const double> ranges_m, int trials, std::uint64_t seed,
                                                   int workers)
{
    Scenario sc;
    sc.kind = ScenarioKind::DetectionTwoSic;
    sc.fixed_range_m = fixed_range_m;
    for (double r : ranges_m) sc.sweep.push_back({r, 0});
    sc.trials = trials;
    sc.seed = seed;
    return run_scenario(config, sc, workers).rows;
}

std::vector<MetricsRow> scenario_tracking_three(const SystemConfig& config, std::span<const SweepPoint> sweep,
                                                int trials, std::uint64_t seed, int workers)
{
    Scenario sc;
    sc.kind = ScenarioKind::TrackingThree;
    sc.sweep.assign(sweep.begin(), sweep.end());
    sc.trials = trials;
    sc.seed = seed;
    return run_scenario(config, sc, workers).rows;
}

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

} // namespace

void write_csv(std::ostream& out, ScenarioKind kind, std::span<const MetricsRow> rows)
{
    out << "# schema=" << kCsvSchema << '\n';
    out << "scenario,range_m,n_antennas,sector_deg,trials_used,targets_scored,matched,pd,pd_lo,pd_hi,"
           "rmse_range_m,rmse_vel_mps,rmse_aoa_deg,crlb_range_m,crlb_vel_mps,crlb_aoa_deg,eps_bw_deg,threshold,"
           "pd_swept,pd_swept_lo,pd_swept_hi\n";
    for (const auto& r : rows) {
        out << scenario_name(kind) << ',' << num(r.range_m) << ',' << r.n_antennas << ',' << num(r.sector_deg) << ','
            << r.trials_used << ',' << r.targets_scored << ',' << r.matched << ',' << num(r.pd) << ',' << num(r.pd_lo)
            << ',' << num(r.pd_hi) << ',' << opt_num(r.rmse_range_m) << ',' << opt_num(r.rmse_vel_mps) << ','
            << opt_num(r.rmse_aoa_deg) << ',' << opt_num(r.crlb_range_m) << ',' << opt_num(r.crlb_vel_mps) << ','
            << opt_num(r.crlb_aoa_deg) << ',' << num(r.eps_bw_deg) << ',' << num(r.threshold) << ','
            << num(r.pd_swept) << ',' << num(r.pd_swept_lo) << ',' << num(r.pd_swept_hi) << '\n';
    }
}

} // namespace otfsradar
