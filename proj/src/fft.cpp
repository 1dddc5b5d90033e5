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

#include "otfsradar/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace otfsradar::fft {

namespace {

struct PlanCache {
    std::mutex mutex;
    std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans;

    ~PlanCache()
    {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int count, int stride, int dist, int sign)
    {
        const auto key = std::make_tuple(n, count, stride, dist, sign);
        std::lock_guard lock(mutex);
        if (auto it = plans.find(key); it != plans.end()) return it->second;
        const std::size_t span = static_cast<std::size_t>(count - 1) * dist + static_cast<std::size_t>(n - 1) * stride + 1;
        auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * span));
        fftw_plan plan = fftw_plan_many_dft(1, &n, count, scratch, nullptr, stride, dist, scratch, nullptr, stride, dist,
                                            sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
        plans.emplace(key, plan);
        return plan;
    }
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

int next_pow2(int v)
{
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

} // namespace

void transform(Complex* data, int n, int count, int stride, int dist, Sign sign)
{
    if (n <= 0 || count <= 0) return;
    const int s = sign == Sign::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    auto plan = cache().get(n, count, stride, dist, s);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
}

LinearConvolver::LinearConvolver(int length, std::span<const Complex> kernel)
    : length_(length), padded_(next_pow2(2 * length - 1)), kernel_spectrum_(static_cast<std::size_t>(padded_))
{
    if (length < 1 || kernel.size() != static_cast<std::size_t>(2 * length - 1))
        throw InvalidArgument("LinearConvolver: kernel must have 2L-1 taps");
    for (int i = 0; i < 2 * length - 1; ++i) {
        const int lag = i - (length - 1);
        kernel_spectrum_[static_cast<std::size_t>((lag + padded_) % padded_)] = kernel[static_cast<std::size_t>(i)];
    }
    transform(kernel_spectrum_, Sign::Forward);
    const double scale = 1.0 / padded_;
    for (auto& v : kernel_spectrum_) v *= scale;
}

void LinearConvolver::apply(std::span<const Complex> in, std::span<Complex> out) const
{
    std::vector<Complex> buf(static_cast<std::size_t>(padded_));
    std::copy(in.begin(), in.begin() + length_, buf.begin());
    transform(buf, Sign::Forward);
    for (int i = 0; i < padded_; ++i) buf[static_cast<std::size_t>(i)] *= kernel_spectrum_[static_cast<std::size_t>(i)];
    transform(buf, Sign::Backward);
    std::copy(buf.begin(), buf.begin() + length_, out.begin());
}

} // namespace otfsradar::fft
