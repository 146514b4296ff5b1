#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace treecover {

// Relative tolerance used by every distance comparison in the library.
inline constexpr double rel_tol = 1e-9;

enum class Errc {
  invalid_argument,
  disconnected,
  degenerate_metric,
  invalid_metric,
  invalid_graph,
  unmapped_point,
  cover_mismatch,
  invalid_hst,
  invalid_tree,
  non_planar,
  invalid_separator_path,
  recursion_depth,
  resampling_failed,
  ramsey_extraction_failed,
  size_cap,
  invariant_violation,
  parse_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline bool approx_leq(double a, double b, double tol = rel_tol) {
  return a <= b + tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool approx_eq(double a, double b, double tol = rel_tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Smallest integer i with 2^i >= x (x > 0), robust to log2 rounding near powers of two.
inline int ceil_log2(double x) {
  int i = static_cast<int>(std::ceil(std::log2(x)));
  while (std::ldexp(1.0, i - 1) >= x) --i;
  while (std::ldexp(1.0, i) < x) ++i;
  return i;
}

// Worker cap shared by all parallel sections. 0 means hardware concurrency.
inline unsigned& thread_cap() {
  static unsigned cap = 0;
  return cap;
}

inline void set_thread_count(unsigned n) { thread_cap() = n; }

inline unsigned thread_count() {
  unsigned cap = thread_cap();
  if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
  return cap;
}

// Runs fn(i) for i in [0, count). Each index must write only its own output slot,
// which keeps results independent of scheduling.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace treecover
