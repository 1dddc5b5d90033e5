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

#include <array>
#include <functional>

namespace otfsradar::opt {

struct Result1 {
    double x = 0;
    double f = 0;
    int evaluations = 0;
};

// Golden-section maximization of a unimodal f on [lo, hi] down to bracket width tol.
Result1 golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

// Maximization on a window where f may be multimodal: scan at `seed_step`,
// bracket the best sample, golden-section to `tol`, then Newton steps on
// finite differences of width `h`. The result never leaves [lo, hi].
Result1 maximize_in_window(const std::function<double(double)>& f, double lo, double hi, double seed_step, double tol,
                           double h);

using Point2 = std::array<double, 2>;

struct Result2 {
    Point2 x{};
    double f = 0;
    int evaluations = 0;
    bool converged = false;
};

struct Box2 {
    Point2 lo{};
    Point2 hi{};
    Point2 clamp(Point2 p) const;
};

// Nelder-Mead maximization inside a box (trial points outside it are rejected).
// Stops when the simplex diameter drops below tol or after max_evaluations.
Result2 nelder_mead_max(const std::function<double(Point2)>& f, Point2 start, Point2 step, const Box2& box, double tol,
                        int max_evaluations);

// Newton iterations with a central-difference gradient and Hessian of step h.
// A step is kept only if it stays in the box and does not decrease f.
Result2 newton_polish_max(const std::function<double(Point2)>& f, Point2 start, double h, const Box2& box,
                          int iterations);

} // namespace otfsradar::opt
