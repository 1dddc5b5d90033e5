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

#include "otfsradar/optimize.hpp"

#include "otfsradar/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otfsradar::opt {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

} // namespace

Result1 golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    if (!(hi >= lo)) throw InvalidArgument("golden_section_max: empty interval");
    Result1 r;
    if (hi - lo <= tol) {
        r.x = 0.5 * (lo + hi);
        r.f = f(r.x);
        r.evaluations = 1;
        return r;
    }
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    int evals = 2;
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    if (fc >= fd) {
        r.x = c;
        r.f = fc;
    } else {
        r.x = d;
        r.f = fd;
    }
    r.evaluations = evals;
    return r;
}

Result1 maximize_in_window(const std::function<double(double)>& f, double lo, double hi, double seed_step, double tol,
                           double h)
{
    if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("maximize_in_window: invalid window");
    if (hi == lo) return {lo, f(lo), 1};
    if (!(seed_step > 0)) throw InvalidArgument("maximize_in_window: seed step must be positive");

    const int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / seed_step)) + 1);
    const double step = (hi - lo) / (n - 1);
    int best = 0;
    double best_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double v = f(lo + i * step);
        if (v > best_f) {
            best_f = v;
            best = i;
        }
    }
    const double a = lo + std::max(0, best - 1) * step;
    const double b = lo + std::min(n - 1, best + 1) * step;
    Result1 r = golden_section_max(f, a, b, tol);
    r.evaluations += n;
    if (best_f > r.f) r = {lo + best * step, best_f, r.evaluations};

    for (int it = 0; it < 4 && h > 0; ++it) {
        if (r.x - h < lo || r.x + h > hi) break;
        const double fp = f(r.x + h), fm = f(r.x - h);
        r.evaluations += 2;
        const double g = (fp - fm) / (2 * h);
        const double c = (fp - 2 * r.f + fm) / (h * h);
        if (!(c < 0)) break;
        const double dx = -g / c;
        if (std::abs(dx) > 10 * tol) break;  // polish only; a large step means the quadratic model is poor
        const double x = std::clamp(r.x + dx, lo, hi);
        const double fx = f(x);
        ++r.evaluations;
        if (!(fx >= r.f)) break;
        const bool small = std::abs(x - r.x) < 1e-3 * h;
        r.x = x;
        r.f = fx;
        if (small) break;
    }
    return r;
}

Point2 Box2::clamp(Point2 p) const
{
    return {std::clamp(p[0], lo[0], hi[0]), std::clamp(p[1], lo[1], hi[1])};
}

Result2 nelder_mead_max(const std::function<double(Point2)>& f, Point2 start, Point2 step, const Box2& box, double tol,
                        int max_evaluations)
{
    struct Vertex {
        Point2 x;
        double f;
    };
    int evals = 0;
    // Infeasible trial points lose every comparison, so the simplex contracts
    // away from the walls instead of flattening onto them.
    auto eval = [&](Point2 p) {
        ++evals;
        if (box.clamp(p) != p) return Vertex{p, -std::numeric_limits<double>::infinity()};
        return Vertex{p, f(p)};
    };
    auto along = [](const Point2& a, const Point2& b, double t) {
        return Point2{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    };

    start = box.clamp(start);
    // Initial edges point into the box; shortened when the box is thinner than the step.
    Point2 d = step;
    for (int i = 0; i < 2; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double up = box.hi[ui] - start[ui], down = start[ui] - box.lo[ui];
        d[ui] = up >= down ? std::min(step[ui], up) : -std::min(step[ui], down);
    }
    std::array<Vertex, 3> s{eval(start), eval({start[0] + d[0], start[1]}), eval({start[0], start[1] + d[1]})};

    bool converged = false;
    while (evals < max_evaluations) {
        std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
        double diam = 0;
        for (int i = 1; i < 3; ++i)
            diam = std::max(diam, std::hypot(s[i].x[0] - s[0].x[0], s[i].x[1] - s[0].x[1]));
        if (diam < tol) {
            converged = true;
            break;
        }
        const Point2 centroid{0.5 * (s[0].x[0] + s[1].x[0]), 0.5 * (s[0].x[1] + s[1].x[1])};
        const Vertex r = eval(along(centroid, s[2].x, -1.0));
        if (r.f > s[0].f) {
            const Vertex e = eval(along(centroid, s[2].x, -2.0));
            s[2] = e.f > r.f ? e : r;
        } else if (r.f > s[1].f) {
            s[2] = r;
        } else {
            const bool outside = r.f > s[2].f;
            const Vertex c = outside ? eval(along(centroid, r.x, 0.5)) : eval(along(centroid, s[2].x, 0.5));
            if (c.f > std::max(r.f, s[2].f) || (!outside && c.f > s[2].f)) {
                s[2] = c;
            } else {
                for (int i = 1; i < 3; ++i) s[i] = eval(along(s[0].x, s[i].x, 0.5));
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    return {s[0].x, s[0].f, evals, converged};
}

Result2 newton_polish_max(const std::function<double(Point2)>& f, Point2 start, double h, const Box2& box,
                          int iterations)
{
    Result2 r{box.clamp(start), 0, 0, false};
    r.f = f(r.x);
    r.evaluations = 1;
    for (int it = 0; it < iterations; ++it) {
        const auto [x, y] = r.x;
        if (x - h < box.lo[0] || x + h > box.hi[0] || y - h < box.lo[1] || y + h > box.hi[1]) break;
        const double fxp = f({x + h, y}), fxm = f({x - h, y});
        const double fyp = f({x, y + h}), fym = f({x, y - h});
        const double fpp = f({x + h, y + h}), fpm = f({x + h, y - h});
        const double fmp = f({x - h, y + h}), fmm = f({x - h, y - h});
        r.evaluations += 8;
        const double gx = (fxp - fxm) / (2 * h), gy = (fyp - fym) / (2 * h);
        const double hxx = (fxp - 2 * r.f + fxm) / (h * h);
        const double hyy = (fyp - 2 * r.f + fym) / (h * h);
        const double hxy = (fpp - fpm - fmp + fmm) / (4 * h * h);
        const double det = hxx * hyy - hxy * hxy;
        if (!(hxx < 0 && det > 0)) break;  // not locally concave
        const double dx = -(hyy * gx - hxy * gy) / det;
        const double dy = -(-hxy * gx + hxx * gy) / det;
        const Point2 next = box.clamp({x + dx, y + dy});
        const double fn = f(next);
        ++r.evaluations;
        if (!(fn >= r.f)) break;
        const bool small = std::hypot(next[0] - x, next[1] - y) < 1e-3 * h;
        r.x = next;
        r.f = fn;
        if (small) {
            r.converged = true;
            break;
        }
    }
    return r;
}

} // namespace otfsradar::opt
