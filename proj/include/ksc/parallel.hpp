/*
 * Copyright 2026 The ksclib Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace ksc {

// Global worker cap. Defaults to 1 so every run is sequential and
// reproducible unless the caller explicitly raises it.
inline std::atomic<int>& detail_thread_cap() {
  static std::atomic<int> cap{1};
  return cap;
}

inline void set_max_threads(int n) { detail_thread_cap().store(n < 1 ? 1 : n); }

inline int max_threads() { return detail_thread_cap().load(); }

// Runs f(begin, end) over a contiguous partition of [0, n). Workers write
// disjoint output ranges, so results do not depend on the thread count.
template <typename F>
void parallel_for(Eigen::Index n, F&& f) {
  if (n <= 0) return;
  const Eigen::Index workers =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(max_threads()), n);
  if (workers <= 1) {
    f(Eigen::Index(0), n);
    return;
  }
  const Eigen::Index chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&f, begin, end] { f(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ksc
