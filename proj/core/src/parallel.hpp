#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace subpop::detail {

/// Runs fn(part, parts) for part in [0, parts) on up to `threads` workers and
/// rethrows the first failure by part order.
template <class F>
void run_parts(std::size_t threads, F&& fn) {
  const std::size_t parts = std::max<std::size_t>(threads, 1);
  if (parts == 1) {
    fn(std::size_t{0}, std::size_t{1});
    return;
  }
  std::vector<std::exception_ptr> errors(parts);
  {
    std::vector<std::jthread> workers;
    workers.reserve(parts);
    for (std::size_t p = 0; p < parts; ++p) {
      workers.emplace_back([&, p] {
        try {
          fn(p, parts);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace subpop::detail
