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

#include <string>
#include <vector>

namespace otfsradar {

// Self-contained numerical checks of the fast paths against slow references.
// Shared by `otfs-radar selftest` and the acceptance runner.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// SFFT(ISFFT(x)) on random desk frames; also ISFFT against the direct double sum.
CheckResult check_transform_roundtrip(int frames = 100);
// Closed-form cross-ambiguity against trapezoid quadrature on a 21 x 21 (tau, nu) grid.
CheckResult check_ambiguity_quadrature();
// Fast forward model against the quadruple sum at N=4, M=8.
CheckResult check_forward_model(int targets = 20);
// FFT coarse statistic against per-cell evaluation.
CheckResult check_coarse_fft();
// Noiseless on-grid target through the full detector.
CheckResult check_noiseless_recovery();
// Noiseless target 0.37 cells off the delay grid.
CheckResult check_super_resolution();
// Analytic model derivatives against central differences, Fisher symmetry and
// PSD, and exact CRLB scaling with the noise variance.
CheckResult check_fisher();
// Calibrate at pfa on noise-only frames, then measure the rate on fresh noise.
CheckResult check_false_alarm(double pfa, int calibration_trials, int validation_trials, int workers);
// W / sqrt(6) against a Monte Carlo of the uniform difference.
CheckResult check_eps_bw();

std::vector<CheckResult> selftest_suite();

} // namespace otfsradar
