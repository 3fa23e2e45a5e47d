// Copyright 2026 The covox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace covox {

/// Name of the environment variable that overrides the worker count.
inline constexpr const char* kThreadsEnv = "COVOX_THREADS";

/// COVOX_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
int default_workers();

/// Resolves a requested worker count: <= 0 means default_workers().
int resolve_workers(int requested);

/// Runs body(0) .. body(n - 1) on up to `workers` threads, handing out
/// indices in increasing order. The first exception thrown by any body is
/// rethrown on the calling thread after all workers have stopped.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace covox
