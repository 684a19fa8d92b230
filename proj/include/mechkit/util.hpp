//
// Project MechKit - Copyright 2026 MechKit Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MECHKIT_UTIL_HPP
#define MECHKIT_UTIL_HPP

#include <atomic>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mechkit {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform [0,1) from (seed, id); stable across platforms and runs.
inline double split_unit(std::string_view id, std::uint64_t seed) {
  std::uint64_t h = mix64(fnv1a64(id) ^ mix64(seed));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

inline std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs fn(i) for i in [0, n) on `workers` threads. Callers keep outputs in
// per-index slots so the overall result is schedule-independent.
template <typename F>
inline void parallel_for(int n, int workers, F&& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int count = std::min(workers, n);
  std::vector<std::exception_ptr> errors(count);
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          int i = next.fetch_add(1);
          if (i >= n) break;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace mechkit

#endif // MECHKIT_UTIL_HPP
