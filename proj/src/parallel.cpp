#include "dtil/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace dtil::parallel {

namespace {

int initial_thread_count() {
  if (const char* env = std::getenv("DTIL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& threads_setting() {
  static std::atomic<int> value{initial_thread_count()};
  return value;
}

constexpr std::size_t kMinChunk = 512;
constexpr std::size_t kSumBlock = 4096;

}  // namespace

int thread_count() { return threads_setting().load(); }

void set_thread_count(int n) { threads_setting().store(std::max(1, n)); }

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(thread_count()), (n + kMinChunk - 1) / kMinChunk);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
}

double deterministic_sum(std::span<const double> values) {
  const std::size_t blocks = (values.size() + kSumBlock - 1) / kSumBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const std::size_t lo = k * kSumBlock;
      const std::size_t hi = std::min(values.size(), lo + kSumBlock);
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += values[i];
      partial[k] = s;
    }
  });
  // pairwise over blocks
  while (partial.size() > 1) {
    std::vector<double> next((partial.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double a = partial[2 * i];
      next[i] = 2 * i + 1 < partial.size() ? a + partial[2 * i + 1] : a;
    }
    partial.swap(next);
  }
  return partial.empty() ? 0.0 : partial.front();
}

}  // namespace dtil::parallel
