// Copyright 2026 The negrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NEGREC_PARALLEL_HPP_
#define NEGREC_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace negrec {

// Worker count: NEGREC_THREADS when set, otherwise the hardware concurrency
// (at least 1). Throws ConfigError unless the variable is a positive integer.
int ThreadCount();

// Calls fn(i) for every i in [0, n) on up to ThreadCount() threads. Callers
// write results into pre-sized slots so output order never depends on
// scheduling. If any call throws, the exception from the lowest index is
// rethrown after all workers finish.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace negrec

#endif  // NEGREC_PARALLEL_HPP_
