#include "ldg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace ldg {

int worker_count() {
  if (const char* env = std::getenv("LDG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t nc = chunk_count(n, chunk);
  const std::size_t workers = std::min<std::size_t>(worker_count(), nc);
  if (workers <= 1) {
    for (std::size_t c = 0; c < nc; ++c) body(c * chunk, std::min(n, (c + 1) * chunk), c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t c = next++; c < nc; c = next++) body(c * chunk, std::min(n, (c + 1) * chunk), c);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double parallel_sum(std::size_t n, std::size_t chunk, Reduction mode,
                    const std::function<double(std::size_t, std::size_t)>& body) {
  if (mode == Reduction::Deterministic) {
    std::vector<double> partial(chunk_count(n, chunk), 0.0);
    parallel_chunks(n, chunk, [&](std::size_t b, std::size_t e, std::size_t c) { partial[c] = body(b, e); });
    return pairwise_sum(partial.data(), partial.size());
  }
  double total = 0;
  std::mutex mu;
  parallel_chunks(n, chunk, [&](std::size_t b, std::size_t e, std::size_t) {
    const double s = body(b, e);
    std::lock_guard<std::mutex> lock(mu);
    total += s;
  });
  return total;
}

double parallel_dot(const std::vector<double>& a, const std::vector<double>& b, Reduction mode) {
  return parallel_sum(a.size(), 8192, mode, [&](std::size_t lo, std::size_t hi) {
    double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

}  // namespace ldg
