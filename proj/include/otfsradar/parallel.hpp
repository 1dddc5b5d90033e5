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

#include <cstdint>
#include <functional>
#include <initializer_list>

namespace otfsradar {

// splitmix64 finalizer folded over the inputs; independent streams per
// (master seed, scenario, sweep index, trial index) tuple.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Worker count: OTFSR_WORKERS if set and positive, else the hardware concurrency.
int default_workers();

// Calls fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; callers store results by index so the outcome does not depend
// on scheduling. The first exception thrown by fn is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace otfsradar
