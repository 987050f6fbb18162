#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mmseq::detail
{
// Runs body(i) for i in [0, count) on up to `threads` workers. Work is handed
// out dynamically, so body must only write to slots owned by index i.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
  if (threads == 0)
  {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    try
    {
      for (std::size_t i = next++; i < count; i = next++)
      {
        body(i);
      }
    }
    catch (...)
    {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error)
      {
        error = std::current_exception();
      }
      next = count;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
  {
    pool.emplace_back(worker);
  }
  for (auto& t : pool)
  {
    t.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}
}  // namespace mmseq::detail
