/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_PARALLEL_HPP
#define WMM_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wmm::detail {

// Runs contiguous index ranges on worker threads; the first exception is
// rethrown on the caller thread after all workers join. Work must write
// only to caller-owned slots indexed by the range, so results do not
// depend on the thread count.
template <typename Fn>
void parallel_rows(std::size_t rows, unsigned threads, Fn&& fn) {
  if (threads <= 1 || rows < 2) {
    fn(std::size_t{0}, rows);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, rows);
  const std::size_t chunk = (rows + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(rows, begin + chunk);
    pool.emplace_back([&fn, &errors, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& worker : pool) worker.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace wmm::detail

#endif  // WMM_PARALLEL_HPP
