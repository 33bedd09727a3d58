#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace canclab {

inline unsigned default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Splits [begin, end) into contiguous chunks, one worker thread per chunk.
// body(i) must not touch shared mutable state outside its own index.
template <typename Body>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Body body) {
  if (end <= begin) return;
  std::size_t n = end - begin;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = begin + n * w / workers;
    std::size_t hi = begin + n * (w + 1) / workers;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace canclab
