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

// Slow reference implementations used to check the fast paths. Deliberately
// independent of the otfsradar library: nothing here includes its headers.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace otfsradar::oracle {

using cd = std::complex<double>;

// (1/T) int over the pulse overlap of e^{-j 2 pi nu s} ds, via the antiderivative.
cd ambiguity_exact(double symbol_time, double tau, double nu);

// Same integral by the composite trapezoid rule with `points` nodes on the overlap.
cd ambiguity_trapezoid(double symbol_time, double tau, double nu, int points);

// Row-major N x M grid transforms written as explicit double sums.
std::vector<cd> isfft_direct(const std::vector<cd>& dd, int n, int m);
std::vector<cd> sfft_direct(const std::vector<cd>& tf, int n, int m);

// Delay-Doppler output y[k,l] = sum_{k',l'} x[k',l'] Psi_{k,k'}[l,l'] of one
// scatterer with unit gain and unit spatial factor, Psi formed term by term
// from the quadruple sum over (n, n', m, m'). Cost O((NM)^4).
std::vector<cd> dd_response_bruteforce(const std::vector<cd>& x_dd, int n, int m, double symbol_time, double tau,
                                       double nu);

// RMSE of u_hat - u for u_hat, u independent uniform on an interval of width w.
double uniform_difference_rmse_mc(double width, int samples, std::uint64_t seed);

} // namespace otfsradar::oracle
