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

#include "otfsradar/cli.hpp"

#include "otfsradar/checks.hpp"
#include "otfsradar/crlb.hpp"
#include "otfsradar/experiments.hpp"
#include "otfsradar/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#ifndef OTFSRADAR_GIT_DESCRIBE
#define OTFSRADAR_GIT_DESCRIBE "unknown"
#endif

namespace otfsradar {

namespace {

using Json = nlohmann::ordered_json;

Json config_json(const SystemConfig& c)
{
    return Json{{"n_doppler", c.n_doppler},
                {"n_delay", c.n_delay},
                {"carrier_hz", c.carrier_hz},
                {"bandwidth_hz", c.bandwidth_hz},
                {"avg_power_w", c.avg_power_w},
                {"rcs_m2", c.rcs_m2},
                {"noise_psd_w_per_hz", c.noise_psd_w_per_hz},
                {"noise_figure_db", c.noise_figure_db},
                {"n_antennas", c.n_antennas},
                {"n_rf", c.n_rf},
                {"n_streams", c.n_streams},
                {"speed_of_light_mps", c.speed_of_light_mps}};
}

SystemConfig load(const std::string& path) { return path.empty() ? SystemConfig::desk() : load_config(path); }

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string command_line(int argc, const char* const* argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

struct RunArgs {
    std::string scenario;
    std::string config;
    int trials = 200;
    std::uint64_t seed = 1;
    std::string out;
    std::string manifest;
    std::vector<double> ranges;
    std::vector<int> na;
    double sector_deg = 10;
    double fixed_range_m = 10;
    bool no_sic = false;
    double pfa = 1e-2;
    int calibration_trials = 0;
    std::optional<double> threshold;
};

int do_run(const RunArgs& a, int workers, const std::string& cmdline, std::ostream& out)
{
    const auto config = load(a.config);
    const auto kind = parse_scenario(a.scenario);
    Scenario sc = default_scenario(kind, config);
    sc.trials = a.trials;
    sc.seed = a.seed;
    sc.sector_deg = a.sector_deg;
    sc.fixed_range_m = a.fixed_range_m;
    sc.sic = !a.no_sic;
    sc.pfa = a.pfa;
    sc.calibration_trials = a.calibration_trials;
    sc.threshold = a.threshold;

    std::vector<double> ranges = a.ranges;
    std::vector<int> na = a.na;
    if (ranges.empty())
        for (const auto& p : sc.sweep)
            if (std::find(ranges.begin(), ranges.end(), p.range_m) == ranges.end()) ranges.push_back(p.range_m);
    if (na.empty()) {
        for (const auto& p : sc.sweep)
            if (std::find(na.begin(), na.end(), p.n_antennas) == na.end()) na.push_back(p.n_antennas);
    }
    sc.sweep.clear();
    for (double r : ranges)
        for (int n : na) sc.sweep.push_back({r, n});

    const auto result = run_scenario(config, sc, workers);
    std::ostringstream csv;
    write_csv(csv, kind, result.rows);
    write_file(a.out, csv.str());

    Json sweep = Json::array();
    for (const auto& p : sc.sweep) sweep.push_back({{"range_m", p.range_m}, {"n_antennas", p.n_antennas ? p.n_antennas : config.n_antennas}});
    Json manifest{
        {"tool", "otfs-radar"},
        {"git_describe", OTFSRADAR_GIT_DESCRIBE},
        {"command", cmdline},
        {"scenario", scenario_name(kind)},
        {"seed", sc.seed},
        {"trials", sc.trials},
        {"workers", workers},
        {"config_file", a.config.empty() ? "(desk preset)" : a.config},
        {"config", config_json(config)},
        {"sweep", sweep},
        {"sector_deg", kind == ScenarioKind::TrackingThree ? Json("n_rf * 3-dB beamwidth") : Json(sc.sector_deg)},
        {"fixed_range_m", sc.fixed_range_m},
        {"sic", sc.sic},
        {"pfa", sc.pfa},
        {"calibration_trials", sc.calibration_trials > 0 ? sc.calibration_trials : static_cast<int>(std::ceil(50.0 / sc.pfa - 1e-9))},
        {"thresholds", result.thresholds},
        {"draws",
         {{"aoa", "uniform over the sector (detection) or the 3-dB beam around a random beam center (tracking)"},
          {"velocity", "uniform on (-v_max/2, v_max/2)"},
          {"gain_phase", "uniform on [0, 2 pi)"},
          {"tracking_interferer_range", "uniform on [3 r_res, 0.9 r_max]"}}},
        {"matching", "3 range cells, 3 velocity cells, one angle cell; greedy by statistic"},
        {"csv", a.out},
        {"csv_schema", kCsvSchema}};
    write_file(a.manifest.empty() ? a.out + ".json" : a.manifest, manifest.dump(2) + "\n");
    out << "wrote " << result.rows.size() << " rows to " << a.out << "\n";
    return kExitOk;
}

struct CrlbArgs {
    std::string config;
    double range_m = 0;
    int na = 0;
    std::string out;
    double velocity_mps = 0;
    double aoa_deg = 0;
    double sector_deg = 10;
    std::uint64_t seed = 1;
};

int do_crlb(const CrlbArgs& a, const std::string& cmdline, std::ostream& out)
{
    auto c = load(a.config);
    if (a.na > 0) c.n_antennas = a.na;
    c.n_streams = 1;
    c.validate();
    const auto d = derive(c);
    const auto g = FrameGeometry::from(c);
    const DelayDopplerOperator op(isfft(random_frame(c, Constellation::qpsk(), derive_seed({a.seed, 0xC71B}))), g);
    const auto beams = detection_beamformers(deg2rad(a.sector_deg), c);
    std::mt19937_64 rng(derive_seed({a.seed, 0x7A6}));
    const std::vector<Target> ts{make_target(a.range_m, a.velocity_mps, deg2rad(a.aoa_deg), c, rng)};
    const auto res = crlb_bounds(fisher(ts, op, beams, d.noise_var_w), c);
    const auto& b = res.targets.front();

    std::ostringstream csv;
    csv << "# schema=otfsradar-crlb/1\n"
        << "range_m,n_antennas,velocity_mps,aoa_deg,sector_deg,noise_var_w,gain_abs,crlb_range_m,crlb_vel_mps,"
           "crlb_aoa_deg,crlb_amplitude,crlb_phase_rad,condition_number\n"
        << num(a.range_m) << ',' << c.n_antennas << ',' << num(a.velocity_mps) << ',' << num(a.aoa_deg) << ','
        << num(a.sector_deg) << ',' << num(d.noise_var_w) << ',' << num(std::abs(ts[0].gain)) << ','
        << num(std::sqrt(b.range_var)) << ',' << num(std::sqrt(b.velocity_var)) << ','
        << num(rad2deg(std::sqrt(b.aoa_var))) << ',' << num(std::sqrt(b.amplitude_var)) << ','
        << num(std::sqrt(b.phase_var)) << ',' << num(res.condition_number) << '\n';
    write_file(a.out, csv.str());
    const Json manifest{{"tool", "otfs-radar"},          {"git_describe", OTFSRADAR_GIT_DESCRIBE},
                        {"command", cmdline},            {"seed", a.seed},
                        {"config_file", a.config.empty() ? "(desk preset)" : a.config},
                        {"config", config_json(c)},      {"csv", a.out}};
    write_file(a.out + ".json", manifest.dump(2) + "\n");
    out << csv.str().substr(csv.str().find('\n') + 1);  // without the schema line
    return kExitOk;
}

struct CalibrateArgs {
    std::string config;
    double pfa = 1e-2;
    int trials = 0;
    std::uint64_t seed = 1;
    double sector_deg = 10;
    int validate = 0;
};

int do_calibrate(const CalibrateArgs& a, int workers, std::ostream& out)
{
    auto c = load(a.config);
    c.n_streams = 1;
    c.validate();
    const auto g = FrameGeometry::from(c);
    const double sector = deg2rad(a.sector_deg);
    const CoarseEngine engine(DelayDopplerOperator(isfft(random_frame(c, Constellation::qpsk(), derive_seed({a.seed, 0xF4A3E}))), g),
                              detection_beamformers(sector, c));
    auto grids = SearchGrids::make(g, sector);
    const int n = a.trials > 0 ? a.trials : static_cast<int>(std::ceil(50.0 / a.pfa - 1e-9));
    grids.threshold = calibrate_threshold(engine, grids, a.pfa, n, a.seed, workers);
    out << "threshold " << num(grids.threshold) << " (pfa " << num(a.pfa) << ", " << n << " noise-only trials)\n";
    if (a.validate > 0) {
        const double rate = measure_false_alarm_rate(engine, grids, a.validate, a.seed, workers);
        const auto ci = wilson_interval(static_cast<int>(std::lround(rate * a.validate)), a.validate);
        out << "measured_pfa " << num(rate) << " [" << num(ci.lo) << ", " << num(ci.hi) << "] over " << a.validate
            << " fresh trials\n";
    }
    return kExitOk;
}

int do_selftest(std::ostream& out)
{
    bool ok = true;
    for (const auto& r : selftest_suite()) {
        ok = ok && r.pass;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-4s %-32s %7.2fs  ", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
        out << buf << r.detail << '\n';
    }
    return ok ? kExitOk : kExitRuntime;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"OTFS MIMO radar detection and estimation simulator", "otfs-radar"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(OTFSRADAR_GIT_DESCRIBE));
    int workers = default_workers();
    app.add_option("--workers", workers, "Worker threads (default: OTFSR_WORKERS or the core count)")
        ->check(CLI::PositiveNumber);

    CalibrateArgs cal;
    auto* c_cal = app.add_subcommand("calibrate-threshold", "Calibrate the detection threshold on noise-only frames");
    c_cal->add_option("--config", cal.config, "Config file (default: desk preset)");
    c_cal->add_option("--pfa", cal.pfa, "Target false-alarm probability")->check(CLI::Range(1e-9, 0.999999));
    c_cal->add_option("--trials", cal.trials, "Calibration trials (default: ceil(50 / pfa))")->check(CLI::NonNegativeNumber);
    c_cal->add_option("--seed", cal.seed, "Master seed");
    c_cal->add_option("--sector", cal.sector_deg, "Angular sector in degrees")->check(CLI::Range(1e-6, 180.0));
    c_cal->add_option("--validate", cal.validate, "Fresh noise-only trials to measure the achieved rate")
        ->check(CLI::NonNegativeNumber);

    RunArgs run;
    auto* c_run = app.add_subcommand("run", "Run a Monte Carlo scenario and write metrics CSV plus a JSON manifest");
    c_run->add_option("--scenario", run.scenario, "detect1 | detect2-sic | track3")
        ->required()
        ->check(CLI::IsMember({"detect1", "detect2-sic", "track3"}));
    c_run->add_option("--config", run.config, "Config file (default: desk preset)");
    c_run->add_option("--trials", run.trials, "Trials per sweep point")->check(CLI::PositiveNumber);
    c_run->add_option("--seed", run.seed, "Master seed");
    c_run->add_option("--out", run.out, "Output CSV path")->required();
    c_run->add_option("--manifest", run.manifest, "Manifest path (default: <out>.json)");
    c_run->add_option("--ranges", run.ranges, "Comma-separated sweep ranges in m")->delimiter(',');
    c_run->add_option("--na", run.na, "Comma-separated antenna counts")->delimiter(',');
    c_run->add_option("--sector", run.sector_deg, "Detection sector in degrees")->check(CLI::Range(1e-6, 180.0));
    c_run->add_option("--fixed-range", run.fixed_range_m, "detect2-sic: range of the fixed target in m");
    c_run->add_flag("--no-sic", run.no_sic, "Single pass keeping every candidate (masking baseline)");
    c_run->add_option("--pfa", run.pfa, "False-alarm target for threshold calibration")->check(CLI::Range(1e-9, 0.999999));
    c_run->add_option("--calibration-trials", run.calibration_trials, "Calibration trials (default: ceil(50 / pfa))")
        ->check(CLI::NonNegativeNumber);
    c_run->add_option("--threshold", run.threshold, "Use this threshold instead of calibrating");

    CrlbArgs cr;
    auto* c_crlb = app.add_subcommand("crlb", "Cramer-Rao bounds for one target in the detection phase");
    c_crlb->add_option("--config", cr.config, "Config file (default: desk preset)");
    c_crlb->add_option("--range", cr.range_m, "Target range in m")->required();
    c_crlb->add_option("--na", cr.na, "Antenna count (default: config)")->check(CLI::NonNegativeNumber);
    c_crlb->add_option("--out", cr.out, "Output CSV path")->required();
    c_crlb->add_option("--velocity", cr.velocity_mps, "Target velocity in m/s");
    c_crlb->add_option("--aoa", cr.aoa_deg, "Target angle in degrees");
    c_crlb->add_option("--sector", cr.sector_deg, "Detection sector in degrees")->check(CLI::Range(1e-6, 180.0));
    c_crlb->add_option("--seed", cr.seed, "Seed for the frame and the gain phase");

    auto* c_self = app.add_subcommand("selftest", "Check the fast paths against the reference implementations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::string cmdline = command_line(argc, argv);
    try {
        if (*c_cal) return do_calibrate(cal, workers, out);
        if (*c_run) return do_run(run, workers, cmdline, out);
        if (*c_crlb) return do_crlb(cr, cmdline, out);
        if (*c_self) return do_selftest(out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

} // namespace otfsradar
