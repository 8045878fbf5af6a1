#ifndef PHYLOKERN_PARALLEL_HPP
#define PHYLOKERN_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace phylokern {

// Resolves a worker count: explicit flag > PHYLOKERN_THREADS env var >
// hardware concurrency. Always at least 1.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n). Tasks are claimed from a shared atomic
// counter; each task writes to its own output slot, so results are
// identical for any worker count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  if (n == 0) return;
  threads = resolve_threads(threads);
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t nworkers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  pool.reserve(nworkers);
  for (std::size_t t = 0; t < nworkers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace phylokern

#endif  // PHYLOKERN_PARALLEL_HPP
