// SPDX-License-Identifier: Apache-2.0

#include "hpfas/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hpfas::parallel {

namespace {

std::atomic<int> g_override{0};
thread_local bool t_in_worker = false;

int env_workers()
{
  const char* env = std::getenv("HPFAS_THREADS");
  if (env == nullptr || *env == '\0')
    return 0;
  try {
    return std::max(0, std::stoi(env));
  } catch (const std::exception&) {
    return 0;
  }
}

} // namespace

int default_workers()
{
  if (const int n = g_override.load(); n > 0)
    return n;
  if (const int n = env_workers(); n > 0)
    return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_workers(int n) { g_override.store(std::max(0, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers)
{
  if (workers <= 0)
    workers = default_workers();
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (count <= 1 || t_in_worker) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&]() {
    t_in_worker = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load())
        break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::current_exception();
        failed.store(true);
      }
    }
    t_in_worker = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(count - 1);
  for (std::size_t w = 1; w < count; ++w)
    pool.emplace_back(work);
  work();
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

} // namespace hpfas::parallel
