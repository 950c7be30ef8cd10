// Copyright 2026 The scdmetric Authors.
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

#ifndef SCD_PARALLEL_H_
#define SCD_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace scd {

// Calls task(i) for every i in [0, count) using up to `workers` threads
// (workers <= 1 runs inline). Tasks are claimed in index order. If any task
// throws, the first exception is rethrown after all threads join.
void ParallelFor(std::size_t count, std::size_t workers,
                 const std::function<void(std::size_t)>& task);

}  // namespace scd

#endif  // SCD_PARALLEL_H_
