// Copyright 2026 The branchlab authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace branchlab {

/// Splits [0, count) into contiguous chunks, runs `fn(begin, end)` on each
/// (one worker thread per chunk), and returns the partial results in chunk
/// order. Chunk boundaries depend only on (count, num_threads), so any
/// reduction performed in returned order is deterministic for every thread
/// count.
template <typename Partial, typename Fn>
std::vector<Partial> chunked_scan(std::int64_t count, int num_threads, Fn&& fn) {
  if (count <= 0) return {};
  const int workers = static_cast<int>(
      std::min<std::int64_t>(std::max(num_threads, 1), count));
  std::vector<Partial> partials(static_cast<std::size_t>(workers));
  if (workers == 1) {
    partials[0] = fn(std::int64_t{0}, count);
    return partials;
  }
  const std::int64_t base = count / workers;
  const std::int64_t extra = count % workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::int64_t begin = 0;
  for (int t = 0; t < workers; ++t) {
    const std::int64_t end = begin + base + (t < extra ? 1 : 0);
    pool.emplace_back([&partials, &fn, t, begin, end] {
      partials[static_cast<std::size_t>(t)] = fn(begin, end);
    });
    begin = end;
  }
  for (auto& worker : pool) worker.join();
  return partials;
}

}  // namespace branchlab
