#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mdcd {

/// Worker-thread budget: BGM_THREADS caps it when set, otherwise the hardware
/// concurrency. Always at least 1.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("BGM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < hw) return static_cast<unsigned>(v);
    if (v >= 1) return static_cast<unsigned>(v) > hw ? hw : static_cast<unsigned>(v);
  }
  return hw;
}

/// Runs fn(i) for i in [0, count). Each index writes only its own slot, so
/// results are identical to a serial loop regardless of the thread count.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned threads = thread_budget();
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned used = threads < count ? threads : static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (unsigned t = 0; t < used; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += used) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mdcd
