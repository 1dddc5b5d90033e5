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

#include "otfsradar/types.hpp"

#include <span>
#include <vector>

namespace otfsradar::fft {

// Exponent sign convention: Forward is e^{-j 2 pi k n / L}, Backward e^{+j ...}.
// Neither direction is normalized.
enum class Sign { Forward = -1, Backward = +1 };

// In-place DFTs of `count` sequences of length `n`; element stride `stride`,
// distance between consecutive sequences `dist`. Thread-safe.
void transform(Complex* data, int n, int count, int stride, int dist, Sign sign);

inline void transform(std::span<Complex> data, Sign sign)
{
    transform(data.data(), static_cast<int>(data.size()), 1, 1, static_cast<int>(data.size()), sign);
}

// Linear convolution of length-L inputs with a fixed kernel supported on
// lags -(L-1) .. L-1, truncated to outputs 0 .. L-1:
//   out[m] = sum_{m'=0}^{L-1} kernel(m - m') in[m'].
class LinearConvolver {
  public:
    LinearConvolver() = default;
    // kernel[i] holds lag i - (L-1), i.e. kernel.size() == 2L - 1.
    LinearConvolver(int length, std::span<const Complex> kernel);

    int length() const { return length_; }
    void apply(std::span<const Complex> in, std::span<Complex> out) const;

  private:
    int length_ = 0;
    int padded_ = 0;
    std::vector<Complex> kernel_spectrum_;
};

} // namespace otfsradar::fft
