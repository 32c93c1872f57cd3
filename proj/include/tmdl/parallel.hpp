// Copyright 2026 The tmdl Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace tmdl {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// out[i] = f(i) for i in [0, count), evaluated on a pool of threads. The
// result only depends on f, never on scheduling. If any call throws, the
// exception of the lowest index is rethrown after all workers finish.
template <typename F>
auto parallel_map(long count, int workers, F&& f) -> std::vector<std::invoke_result_t<F&, long>> {
  using R = std::invoke_result_t<F&, long>;
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<long> next{0};
  auto work = [&]() {
    for (long i = next++; i < count; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(count)));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace tmdl
