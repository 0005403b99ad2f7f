#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "ulab/field.hpp"

namespace ulab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-sample seed: results depend on (seed, index) only, never on which
/// worker ran the sample.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with distribution code of our own, so streams are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  Elem elem(const Field& f) { return static_cast<Elem>(below(f.order())); }
  Elem nonzero_elem(const Field& f) { return static_cast<Elem>(1 + below(f.order() - 1)); }

 private:
  std::mt19937_64 engine_;
};

/// Run fn(i) for i in [0, count) on `workers` threads.  fn must only write
/// to slots owned by index i.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::clamp<std::size_t>(workers <= 0 ? 1 : static_cast<std::size_t>(workers), 1, std::max<std::size_t>(count, 1));
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  pool.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < count; i += w) fn(i);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ulab
