// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace cachenet {

// Order-preserving parallel map over an index range.  `fn(i)` must be a
// pure function of i.  Results land at their own index, so output order
// is deterministic regardless of scheduling.
template <typename Fn>
auto parallel_index_map(std::size_t count, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  if (count == 0) return out;

  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }

  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& f : futures) f.get();  // propagates the first exception
  return out;
}

}  // namespace cachenet
