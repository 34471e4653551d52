#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "perfsim/rand.hpp"

namespace perfsim {

/// Runs fn(k, derive_stream(seed, k), acc) for k in [0, n), split into
/// contiguous chunks across worker threads, and merges the per-worker
/// accumulators in chunk order. Acc must be default constructible and provide
/// merge(const Acc&). With order-independent accumulators (integer counts)
/// the result does not depend on the number of workers.
template <class Acc, class Fn>
Acc replicate(std::uint64_t n, Seed seed, Fn fn, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));

  std::vector<Acc> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    try {
      for (std::uint64_t k = begin; k < end; ++k) fn(k, derive_stream(seed, k), partial[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  Acc total;
  for (const Acc& acc : partial) total.merge(acc);
  return total;
}

}  // namespace perfsim
