#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace fractal_heat {

// FRACTAL_HEAT_THREADS caps experiment-cell parallelism; 0 or unset = auto.
inline std::int64_t thread_cap() {
  const char* env = std::getenv("FRACTAL_HEAT_THREADS");
  std::int64_t cap = 0;
  if (env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      throw argument_error("FRACTAL_HEAT_THREADS must be a non-negative integer, got '" +
                           std::string(env) + "'");
    cap = v;
  }
  if (cap == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    cap = hw ? static_cast<std::int64_t>(hw) : 1;
  }
  return cap;
}

// Runs f(0..cells-1) on up to thread_cap() threads. Callers index their
// results by cell, so scheduling order never affects merged output.
template <typename F>
void parallel_cells(std::int64_t cells, F&& f) {
  if (cells <= 0) return;
  const std::int64_t workers = std::min(cells, thread_cap());
  if (workers <= 1) {
    for (std::int64_t i = 0; i < cells; ++i) f(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1)) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fractal_heat
