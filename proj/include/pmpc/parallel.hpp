// Copyright 2026 The PMPC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PMPC__PARALLEL_HPP_
#define PMPC__PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pmpc {

/// Splits [0, count) into at most `workers` contiguous chunks and calls
/// body(begin, end, chunk) for each, the first chunk on the calling thread.
/// Chunk boundaries depend only on (count, workers). The first exception
/// by chunk order is rethrown after all chunks finish.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body && body)
{
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    body(std::size_t{0}, count, std::size_t{0});
    return;
  }
  const std::size_t base = count / workers;
  const std::size_t extra = count % workers;
  auto chunk_begin = [&](std::size_t c) { return c * base + std::min(c, extra); };

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t c = 1; c < workers; ++c) {
    threads.emplace_back([&, c] {
      try {
        body(chunk_begin(c), chunk_begin(c + 1), c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  try {
    body(chunk_begin(0), chunk_begin(1), std::size_t{0});
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto & t : threads) {
    t.join();
  }
  for (auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace pmpc

#endif  // PMPC__PARALLEL_HPP_
