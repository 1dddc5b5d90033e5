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

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace otfsradar;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::initializer_list<std::string> args)
{
    std::vector<std::string> store{"otfs-radar"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : store) argv.push_back(s.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "otfsradar-test-cli";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Value of `column` in the first data row of a CSV that may start with a `#` line.
double csv_value(const std::string& text, const std::string& column)
{
    std::istringstream in(text);
    std::string header, row;
    do std::getline(in, header);
    while (header.starts_with("#"));
    std::getline(in, row);
    std::istringstream h(header), r(row);
    for (std::string name, value; std::getline(h, name, ',') && std::getline(r, value, ',');)
        if (name == column) return std::stod(value);
    FAIL("missing column " << column);
    return 0;
}

} // namespace

TEST_CASE("usage errors exit with 1")
{
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"run", "--scenario", "detect1"}).code == kExitUsage);  // --out missing
    CHECK(cli({"run", "--scenario", "detect9", "--out", scratch("x.csv").string()}).code == kExitUsage);
    CHECK(cli({"crlb", "--range", "10", "--out", scratch("x.csv").string(), "--bogus"}).code == kExitUsage);
    const auto far = cli({"run", "--scenario", "detect1", "--ranges", "500", "--threshold", "11", "--trials", "2", "--out",
                          scratch("far.csv").string()});
    CHECK(far.code == kExitUsage);
    CHECK_FALSE(far.err.empty());
}

TEST_CASE("help exits with 0")
{
    const auto r = cli({"--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("selftest") != std::string::npos);
}

TEST_CASE("config problems exit with 2")
{
    CHECK(cli({"crlb", "--config", scratch("does-not-exist.cfg").string(), "--range", "10", "--out",
               scratch("c.csv").string()})
              .code == kExitConfig);
    write(scratch("bad.cfg"), "preset = desk\nwarp_factor = 9\n");
    const auto r = cli({"crlb", "--config", scratch("bad.cfg").string(), "--range", "10", "--out", scratch("c.csv").string()});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("warp_factor") != std::string::npos);
}

TEST_CASE("run writes a CSV and a manifest, reproducibly")
{
    const auto a = scratch("run-a.csv"), b = scratch("run-b.csv");
    auto go = [](const fs::path& out, const std::string& workers) {
        return cli({"--workers", workers, "run", "--scenario", "detect1", "--ranges", "12,30", "--trials", "4", "--seed",
                    "9", "--threshold", "11", "--out", out.string()});
    };
    REQUIRE(go(a, "1").code == kExitOk);
    REQUIRE(go(b, "2").code == kExitOk);
    const auto csv = slurp(a);
    CHECK(csv == slurp(b));
    CHECK(csv.starts_with("# schema=otfsradar-metrics/1\n"));

    const auto manifest = nlohmann::json::parse(slurp(fs::path(a.string() + ".json")));
    CHECK(manifest.at("seed") == 9);
    CHECK(manifest.at("trials") == 4);
    CHECK(manifest.at("scenario") == "detect1");
    CHECK(manifest.contains("git_describe"));
    CHECK(manifest.contains("config"));
}

TEST_CASE("crlb bounds scale with the SNR")
{
    write(scratch("p1.cfg"), "preset = desk\navg_power_w = 1e-3\n");
    write(scratch("p4.cfg"), "preset = desk\navg_power_w = 4e-3\n");
    const auto r1 = cli({"crlb", "--config", scratch("p1.cfg").string(), "--range", "25", "--out", scratch("b1.csv").string()});
    const auto r4 = cli({"crlb", "--config", scratch("p4.cfg").string(), "--range", "25", "--out", scratch("b4.csv").string()});
    REQUIRE(r1.code == kExitOk);
    REQUIRE(r4.code == kExitOk);
    const auto c1 = slurp(scratch("b1.csv")), c4 = slurp(scratch("b4.csv"));
    // Standard deviations: four times the SNR halves them.
    for (const char* col : {"crlb_range_m", "crlb_vel_mps", "crlb_aoa_deg"})
        CHECK(csv_value(c1, col) / csv_value(c4, col) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fs::exists(scratch("b1.csv.json")));
}

TEST_CASE("selftest passes")
{
    const auto r = cli({"selftest"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
}
